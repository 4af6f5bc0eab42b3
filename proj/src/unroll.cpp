// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "rtlic/unroll.hpp"

#include <functional>

namespace rtlic {

namespace {

int addr_width_of(const SignalInfo &sig) {
    int w = 1;
    while ((uint64_t(1) << w) < sig.depth) {
        ++w;
    }
    return w;
}

} // namespace

Unroller::Unroller(const ElaboratedDesign &d, const CfgSet &cs, BvBuilder &b)
    : design_(d), cfg_(cs), b_(b) {
    cycles_.resize(1); // index 0 unused; state enters cycle 1 as all zeros
}

BvRef Unroller::input_var(const std::string &name, int cycle) {
    return b_.var(name, cycle, design_.signal(name).width);
}

std::vector<InputVar> Unroller::input_vars(int max_cycle) const {
    std::vector<InputVar> out;
    for (int c = 1; c <= max_cycle; ++c) {
        for (const auto &name : design_.input_names()) {
            out.push_back({name, c, design_.signal(name).width});
        }
    }
    return out;
}

BvRef Unroller::compile(const Expr &e, const State &st, const std::map<std::string, BvRef> &comb,
                        int cycle) {
    switch (e.kind) {
    case ExprKind::Const:
        return b_.constant(e.value, e.width > 0 ? e.width : 32);
    case ExprKind::Ref: {
        const SignalInfo &sig = design_.signal(e.name);
        if (sig.kind == SignalKind::Input) {
            return input_var(e.name, cycle);
        }
        if (sig.comb_driven) {
            auto it = comb.find(e.name);
            return it != comb.end() ? it->second : b_.constant(0, sig.width);
        }
        return st.regs.at(e.name);
    }
    case ExprKind::Index: {
        const SignalInfo &sig = design_.signal(e.name);
        BvRef idx = compile(*e.index, st, comb, cycle);
        if (sig.kind == SignalKind::Memory) {
            int aw = addr_width_of(sig);
            BvRef mem = st.mems.at(e.name);
            BvRef value = b_.mem_select(mem, b_.zero_ext(idx, aw));
            if (sig.depth < (uint64_t(1) << aw)) {
                BvRef in_range = b_.ult(b_.zero_ext(idx, aw + 1), b_.constant(sig.depth, aw + 1));
                value = b_.ite(in_range, value, b_.constant(0, sig.width));
            }
            return value;
        }
        BvRef v = compile_ref(e.name, st, comb, cycle);
        return b_.extract(b_.shr(v, idx), 0, 0);
    }
    case ExprKind::Slice: {
        BvRef v = compile_ref(e.name, st, comb, cycle);
        return b_.extract(v, e.msb, e.lsb);
    }
    case ExprKind::Unary: {
        BvRef v = compile(*e.lhs, st, comb, cycle);
        switch (e.unary_op) {
        case UnaryOp::BitNot: return b_.bv_not(v);
        case UnaryOp::LogNot: return b_.log_not(v);
        case UnaryOp::Neg: return b_.neg(v);
        }
        return v;
    }
    case ExprKind::Binary: {
        BvRef a = compile(*e.lhs, st, comb, cycle);
        BvRef c = compile(*e.rhs, st, comb, cycle);
        switch (e.binary_op) {
        case BinaryOp::Eq: return b_.eq(a, c);
        case BinaryOp::Ne: return b_.ne(a, c);
        case BinaryOp::Lt: return b_.ult(a, c);
        case BinaryOp::Le: return b_.ule(a, c);
        case BinaryOp::Gt: return b_.ult(c, a);
        case BinaryOp::Ge: return b_.ule(c, a);
        case BinaryOp::And: return b_.bv_and(a, c);
        case BinaryOp::Or: return b_.bv_or(a, c);
        case BinaryOp::Xor: return b_.bv_xor(a, c);
        case BinaryOp::LogAnd: return b_.log_and(a, c);
        case BinaryOp::LogOr: return b_.log_or(a, c);
        case BinaryOp::Add: return b_.add(a, c);
        case BinaryOp::Sub: return b_.sub(a, c);
        case BinaryOp::Shl: return b_.shl(a, c);
        case BinaryOp::Shr: return b_.shr(a, c);
        case BinaryOp::Mul:
        case BinaryOp::Div:
        case BinaryOp::Pow:
            throw Error("constant-only operator reached symbolic execution");
        }
        return a;
    }
    case ExprKind::Ternary: {
        BvRef c = compile(*e.lhs, st, comb, cycle);
        BvRef x = compile(*e.rhs, st, comb, cycle);
        BvRef y = compile(*e.tern, st, comb, cycle);
        return b_.ite(c, x, y);
    }
    case ExprKind::Concat: {
        std::vector<BvRef> parts;
        for (const auto &p : e.parts) {
            parts.push_back(compile(*p, st, comb, cycle));
        }
        return b_.concat(std::move(parts));
    }
    }
    throw Error("unexpected expression kind in symbolic execution");
}

BvRef Unroller::compile_ref(const std::string &name, const State &st,
                            const std::map<std::string, BvRef> &comb, int cycle) {
    const SignalInfo &sig = design_.signal(name);
    if (sig.kind == SignalKind::Input) {
        return input_var(name, cycle);
    }
    if (sig.comb_driven) {
        auto it = comb.find(name);
        return it != comb.end() ? it->second : b_.constant(0, sig.width);
    }
    return st.regs.at(name);
}

void Unroller::exec_clocked(const Process &p, const State &st,
                            const std::map<std::string, BvRef> &comb, int cycle, BvRef path,
                            State &next) {
    std::function<void(const std::vector<StmtPtr> &, BvRef)> walk =
        [&](const std::vector<StmtPtr> &stmts, BvRef pc) {
            for (const auto &s : stmts) {
                switch (s->kind) {
                case StmtKind::Block:
                    walk(s->stmts, pc);
                    break;
                case StmtKind::If: {
                    BvRef cond = b_.truthy(compile(*s->cond, st, comb, cycle));
                    walk(s->then_stmts, b_.bv_and(pc, cond));
                    walk(s->else_stmts, b_.bv_and(pc, b_.bv_not(cond)));
                    break;
                }
                case StmtKind::AssignNb: {
                    const SignalInfo &sig = design_.signal(s->lhs_name);
                    BvRef rhs = b_.zero_ext(compile(*s->rhs, st, comb, cycle), sig.width);
                    if (sig.kind == SignalKind::Memory) {
                        int aw = addr_width_of(sig);
                        BvRef idx = b_.zero_ext(compile(*s->lhs_index, st, comb, cycle), aw);
                        BvRef guard = pc;
                        if (sig.depth < (uint64_t(1) << aw)) {
                            BvRef raw = compile(*s->lhs_index, st, comb, cycle);
                            BvRef in_range = b_.ult(b_.zero_ext(raw, aw + 1),
                                                    b_.constant(sig.depth, aw + 1));
                            guard = b_.bv_and(pc, in_range);
                        }
                        BvRef cur = next.mems.at(s->lhs_name);
                        next.mems[s->lhs_name] = b_.ite(guard, b_.mem_store(cur, idx, rhs), cur);
                    } else {
                        BvRef cur = next.regs.at(s->lhs_name);
                        next.regs[s->lhs_name] = b_.ite(pc, rhs, cur);
                    }
                    break;
                }
                case StmtKind::AssignB:
                    throw Error("blocking assignment in clocked process reached symbolic execution");
                case StmtKind::Display:
                    break;
                }
            }
        };
    walk(p.body, path);
}

void Unroller::settle_pass(const Process &p, const State &st, int cycle,
                           std::map<std::string, BvRef> &comb, BvRef path,
                           const std::vector<StmtPtr> &stmts) {
    for (const auto &s : stmts) {
        switch (s->kind) {
        case StmtKind::Block:
            settle_pass(p, st, cycle, comb, path, s->stmts);
            break;
        case StmtKind::If: {
            BvRef cond = b_.truthy(compile(*s->cond, st, comb, cycle));
            settle_pass(p, st, cycle, comb, b_.bv_and(path, cond), s->then_stmts);
            settle_pass(p, st, cycle, comb, b_.bv_and(path, b_.bv_not(cond)), s->else_stmts);
            break;
        }
        case StmtKind::AssignB: {
            const SignalInfo &sig = design_.signal(s->lhs_name);
            BvRef rhs = b_.zero_ext(compile(*s->rhs, st, comb, cycle), sig.width);
            BvRef cur = comb.count(s->lhs_name) ? comb.at(s->lhs_name) : b_.constant(0, sig.width);
            comb[s->lhs_name] = b_.ite(path, rhs, cur);
            break;
        }
        case StmtKind::AssignNb:
            throw Error("nonblocking assignment in combinational process reached symbolic execution");
        case StmtKind::Display:
            break;
        }
    }
}

std::map<std::string, BvRef> Unroller::settle_comb(const State &st, int cycle) {
    std::map<std::string, BvRef> comb;
    int comb_count = 0;
    for (const auto &p : design_.ast.processes) {
        if (p.kind == ProcessKind::Combinational) {
            ++comb_count;
        }
    }
    if (comb_count == 0) {
        return comb;
    }
    int bound = 2 * comb_count + 2;
    for (int pass = 0; pass < bound; ++pass) {
        std::map<std::string, BvRef> before = comb;
        for (const auto &p : design_.ast.processes) {
            if (p.kind != ProcessKind::Combinational) {
                continue;
            }
            settle_pass(p, st, cycle, comb, b_.constant(1, 1), p.body);
        }
        bool stable = before.size() == comb.size();
        if (stable) {
            for (const auto &[name, term] : comb) {
                auto it = before.find(name);
                if (it == before.end() || it->second->uid != term->uid) {
                    stable = false;
                    break;
                }
            }
        }
        if (stable) {
            break;
        }
    }
    return comb;
}

void Unroller::extend_to(int cycle) {
    while (static_cast<int>(cycles_.size()) <= cycle) {
        int c = static_cast<int>(cycles_.size());
        CycleEnv env;
        if (c == 1) {
            for (const auto &sig : design_.signals) {
                if (sig.kind == SignalKind::Memory) {
                    env.pre.mems[sig.name] = b_.mem_zero(addr_width_of(sig), sig.width);
                } else if (sig.kind != SignalKind::Input && !sig.comb_driven) {
                    env.pre.regs[sig.name] = b_.constant(0, sig.width);
                }
            }
        } else {
            env.pre = cycles_.back().post;
        }
        env.comb_pre = settle_comb(env.pre, c);
        env.post = env.pre;
        for (size_t i = 0; i < design_.ast.processes.size(); ++i) {
            const Process &p = design_.ast.processes[i];
            if (p.kind == ProcessKind::ClockedPosedge) {
                exec_clocked(p, env.pre, env.comb_pre, c, b_.constant(1, 1), env.post);
            }
        }
        env.comb_post = settle_comb(env.post, c);
        cycles_.push_back(std::move(env));
    }
}

BvRef Unroller::guard_term(BlockId block, int cycle, Phase phase) {
    extend_to(cycle);
    const Block &b = cfg_.block(block);
    if (!b.guard) {
        throw Error("block " + b.label + " has no guard");
    }
    const CycleEnv &env = cycles_[static_cast<size_t>(cycle)];
    const State &st = (phase == Phase::PostComb) ? env.post : env.pre;
    const auto &comb = (phase == Phase::PostComb) ? env.comb_post : env.comb_pre;
    return b_.truthy(compile(*b.guard->cond, st, comb, cycle));
}

} // namespace rtlic
