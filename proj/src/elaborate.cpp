// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "rtlic/elaborate.hpp"

#include <algorithm>
#include <cmath>

namespace rtlic {

namespace {

constexpr int kMaxWidth = 64;
constexpr uint64_t kMaxDepth = 65536;

struct ElabCtx {
    const std::string &file;
    std::map<std::string, int64_t> params;
    std::map<std::string, int> *signal_index = nullptr;
    std::vector<SignalInfo> *signals = nullptr;

    const SignalInfo *find(const std::string &name) const {
        auto it = signal_index->find(name);
        return it == signal_index->end() ? nullptr : &(*signals)[static_cast<size_t>(it->second)];
    }
};

[[noreturn]] void fail(const ElabCtx &ctx, SourcePos pos, const std::string &msg) {
    throw Error(ctx.file, pos, msg);
}

int64_t fold_const(const ElabCtx &ctx, const Expr &e);

int64_t pow_i64(const ElabCtx &ctx, SourcePos pos, int64_t base, int64_t exp) {
    if (exp < 0) {
        fail(ctx, pos, "negative exponent in constant expression");
    }
    int64_t r = 1;
    for (int64_t i = 0; i < exp; ++i) {
        r *= base;
        if (r > (int64_t(1) << 40)) {
            fail(ctx, pos, "constant expression overflow");
        }
    }
    return r;
}

int64_t fold_const(const ElabCtx &ctx, const Expr &e) {
    switch (e.kind) {
    case ExprKind::Const:
        return static_cast<int64_t>(e.value);
    case ExprKind::Ref: {
        auto it = ctx.params.find(e.name);
        if (it == ctx.params.end()) {
            if (ctx.find(e.name)) {
                fail(ctx, e.pos, "signal \"" + e.name + "\" in constant expression");
            }
            fail(ctx, e.pos, "undefined parameter " + e.name);
        }
        return it->second;
    }
    case ExprKind::Unary: {
        int64_t v = fold_const(ctx, *e.lhs);
        switch (e.unary_op) {
        case UnaryOp::Neg: return -v;
        case UnaryOp::LogNot: return v == 0 ? 1 : 0;
        case UnaryOp::BitNot: return ~v;
        }
        return 0;
    }
    case ExprKind::Binary: {
        int64_t a = fold_const(ctx, *e.lhs);
        int64_t b = fold_const(ctx, *e.rhs);
        switch (e.binary_op) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div:
            if (b == 0) {
                fail(ctx, e.pos, "division by zero in constant expression");
            }
            return a / b;
        case BinaryOp::Pow: return pow_i64(ctx, e.pos, a, b);
        case BinaryOp::Shl: return a << b;
        case BinaryOp::Shr: return static_cast<int64_t>(static_cast<uint64_t>(a) >> b);
        case BinaryOp::And: return a & b;
        case BinaryOp::Or: return a | b;
        case BinaryOp::Xor: return a ^ b;
        case BinaryOp::Eq: return a == b;
        case BinaryOp::Ne: return a != b;
        case BinaryOp::Lt: return a < b;
        case BinaryOp::Le: return a <= b;
        case BinaryOp::Gt: return a > b;
        case BinaryOp::Ge: return a >= b;
        case BinaryOp::LogAnd: return (a != 0 && b != 0) ? 1 : 0;
        case BinaryOp::LogOr: return (a != 0 || b != 0) ? 1 : 0;
        }
        return 0;
    }
    case ExprKind::Ternary:
        return fold_const(ctx, *e.lhs) != 0 ? fold_const(ctx, *e.rhs) : fold_const(ctx, *e.tern);
    default:
        fail(ctx, e.pos, "unsupported construct in constant expression");
    }
}

int resolve_width(const ElabCtx &ctx, const ExprPtr &msb, const ExprPtr &lsb, SourcePos pos,
                  ExprPtr &msb_out, ExprPtr &lsb_out) {
    if (!msb || !lsb) {
        return 1;
    }
    int64_t hi = fold_const(ctx, *msb);
    int64_t lo = fold_const(ctx, *lsb);
    if (lo != 0) {
        fail(ctx, pos, "range must end at bit 0");
    }
    int64_t width = hi - lo + 1;
    if (width <= 0) {
        fail(ctx, pos, "non-positive width");
    }
    if (width > kMaxWidth) {
        fail(ctx, pos, "width exceeds " + std::to_string(kMaxWidth) + " bits");
    }
    msb_out = make_const(static_cast<uint64_t>(hi), -1, pos);
    lsb_out = make_const(0, -1, pos);
    return static_cast<int>(width);
}

// Rewrites parameter refs to constants and assigns a width to every node.
void elab_expr(const ElabCtx &ctx, Expr &e, bool in_process) {
    switch (e.kind) {
    case ExprKind::Const:
        if (e.width < 0) {
            e.width = 32;
        }
        if (e.width > kMaxWidth) {
            fail(ctx, e.pos, "literal width exceeds 64 bits");
        }
        e.value &= (e.width >= 64) ? ~0ull : ((1ull << e.width) - 1);
        return;
    case ExprKind::Ref: {
        if (const SignalInfo *sig = ctx.find(e.name)) {
            if (sig->kind == SignalKind::Memory) {
                fail(ctx, e.pos, "memory \"" + e.name + "\" used without an index");
            }
            e.width = sig->width;
            return;
        }
        auto it = ctx.params.find(e.name);
        if (it == ctx.params.end()) {
            fail(ctx, e.pos, "undefined parameter " + e.name);
        }
        e.kind = ExprKind::Const;
        e.value = static_cast<uint64_t>(it->second);
        e.name.clear();
        e.width = 32;
        return;
    }
    case ExprKind::Index: {
        const SignalInfo *sig = ctx.find(e.name);
        if (!sig) {
            fail(ctx, e.pos, "unknown signal \"" + e.name + "\"");
        }
        elab_expr(ctx, *e.index, in_process);
        if (sig->kind == SignalKind::Memory) {
            e.width = sig->width;
        } else {
            e.width = 1; // dynamic bit select
        }
        return;
    }
    case ExprKind::Slice: {
        const SignalInfo *sig = ctx.find(e.name);
        if (!sig) {
            fail(ctx, e.pos, "unknown signal \"" + e.name + "\"");
        }
        if (sig->kind == SignalKind::Memory) {
            fail(ctx, e.pos, "bit slice of a memory is not supported");
        }
        int64_t hi = e.msb_expr ? fold_const(ctx, *e.msb_expr) : e.msb;
        int64_t lo = e.lsb_expr ? fold_const(ctx, *e.lsb_expr) : e.lsb;
        if (lo < 0 || hi < lo || hi >= sig->width) {
            fail(ctx, e.pos, "slice bounds out of range for \"" + e.name + "\"");
        }
        e.msb = static_cast<int>(hi);
        e.lsb = static_cast<int>(lo);
        e.msb_expr = make_const(static_cast<uint64_t>(hi), -1, e.pos);
        e.lsb_expr = make_const(static_cast<uint64_t>(lo), -1, e.pos);
        e.width = static_cast<int>(hi - lo + 1);
        return;
    }
    case ExprKind::Unary:
        elab_expr(ctx, *e.lhs, in_process);
        e.width = (e.unary_op == UnaryOp::LogNot) ? 1 : e.lhs->width;
        return;
    case ExprKind::Binary: {
        if (in_process && (e.binary_op == BinaryOp::Mul || e.binary_op == BinaryOp::Div ||
                           e.binary_op == BinaryOp::Pow)) {
            // try constant folding first: folded parameters often leave
            // constant arithmetic like 2**ADDR_W behind
            bool folded = true;
            int64_t v = 0;
            try {
                v = fold_const(ctx, e);
            } catch (const Error &) {
                folded = false;
            }
            if (folded) {
                e.kind = ExprKind::Const;
                e.value = static_cast<uint64_t>(v);
                e.lhs.reset();
                e.rhs.reset();
                e.width = 32;
                return;
            }
            fail(ctx, e.pos, "unsupported operator in process context");
        }
        elab_expr(ctx, *e.lhs, in_process);
        elab_expr(ctx, *e.rhs, in_process);
        bool is_compare = e.binary_op == BinaryOp::Eq || e.binary_op == BinaryOp::Ne ||
                          e.binary_op == BinaryOp::Lt || e.binary_op == BinaryOp::Le ||
                          e.binary_op == BinaryOp::Gt || e.binary_op == BinaryOp::Ge;
        if (is_compare) {
            // comparisons zero-extend, so a fitting constant may take the
            // other operand's width (folded parameters print naturally)
            auto narrow = [](Expr &cst, const Expr &other) {
                if (cst.kind == ExprKind::Const && other.kind != ExprKind::Const &&
                    cst.width > other.width &&
                    (other.width >= 64 || cst.value <= ((1ull << other.width) - 1))) {
                    cst.width = other.width;
                }
            };
            narrow(*e.lhs, *e.rhs);
            narrow(*e.rhs, *e.lhs);
        }
        int w = std::max(e.lhs->width, e.rhs->width);
        switch (e.binary_op) {
        case BinaryOp::Eq:
        case BinaryOp::Ne:
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge:
        case BinaryOp::LogAnd:
        case BinaryOp::LogOr:
            e.width = 1;
            break;
        case BinaryOp::Shl:
        case BinaryOp::Shr:
            e.width = e.lhs->width;
            break;
        default:
            e.width = w;
            break;
        }
        if (e.width > kMaxWidth) {
            fail(ctx, e.pos, "expression width exceeds 64 bits");
        }
        return;
    }
    case ExprKind::Ternary:
        elab_expr(ctx, *e.lhs, in_process);
        elab_expr(ctx, *e.rhs, in_process);
        elab_expr(ctx, *e.tern, in_process);
        e.width = std::max(e.rhs->width, e.tern->width);
        return;
    case ExprKind::Concat: {
        int total = 0;
        for (auto &p : e.parts) {
            elab_expr(ctx, *p, in_process);
            total += p->width;
        }
        if (total > kMaxWidth) {
            fail(ctx, e.pos, "concatenation width exceeds 64 bits");
        }
        e.width = total;
        return;
    }
    }
}

struct AssignScan {
    std::map<std::string, std::vector<int>> comb_writers;    // signal -> process ids
    std::map<std::string, std::vector<int>> clocked_writers;
};

void elab_stmts(const ElabCtx &ctx, std::vector<StmtPtr> &stmts, const Process &proc,
                AssignScan &scan) {
    for (auto &s : stmts) {
        switch (s->kind) {
        case StmtKind::Block:
            elab_stmts(ctx, s->stmts, proc, scan);
            break;
        case StmtKind::If:
            elab_expr(ctx, *s->cond, true);
            elab_stmts(ctx, s->then_stmts, proc, scan);
            elab_stmts(ctx, s->else_stmts, proc, scan);
            break;
        case StmtKind::AssignNb:
        case StmtKind::AssignB: {
            const SignalInfo *sig = ctx.find(s->lhs_name);
            SourcePos pos{s->span.line_begin, 1};
            if (!sig) {
                fail(ctx, pos, "assignment to unknown signal \"" + s->lhs_name + "\"");
            }
            if (sig->kind == SignalKind::Input) {
                fail(ctx, pos, "assignment to input \"" + s->lhs_name + "\"");
            }
            if (sig->kind == SignalKind::Memory) {
                if (!s->lhs_index) {
                    fail(ctx, pos, "memory \"" + s->lhs_name + "\" assigned without an index");
                }
                if (proc.kind == ProcessKind::Combinational) {
                    fail(ctx, pos, "unsupported feature: memory assignment in combinational process");
                }
            } else if (s->lhs_index) {
                fail(ctx, pos, "unsupported feature: bit-select assignment");
            }
            if (s->lhs_index) {
                elab_expr(ctx, *s->lhs_index, true);
            }
            elab_expr(ctx, *s->rhs, true);
            auto &writers = (proc.kind == ProcessKind::Combinational) ? scan.comb_writers
                                                                      : scan.clocked_writers;
            auto &v = writers[s->lhs_name];
            if (std::find(v.begin(), v.end(), proc.id) == v.end()) {
                v.push_back(proc.id);
            }
            break;
        }
        case StmtKind::Display:
            break;
        }
    }
}

} // namespace

const SignalInfo *ElaboratedDesign::find_signal(const std::string &name) const {
    auto it = signal_index.find(name);
    return it == signal_index.end() ? nullptr : &signals[static_cast<size_t>(it->second)];
}

const SignalInfo &ElaboratedDesign::signal(const std::string &name) const {
    const SignalInfo *s = find_signal(name);
    if (!s) {
        throw Error("unknown signal \"" + name + "\"");
    }
    return *s;
}

std::vector<std::string> ElaboratedDesign::input_names() const {
    std::vector<std::string> names;
    for (const auto &s : signals) {
        if (s.kind == SignalKind::Input && s.name != clock) {
            names.push_back(s.name);
        }
    }
    return names;
}

ElaboratedDesign ElaboratedDesign::clone() const {
    ElaboratedDesign d;
    d.ast = ast.clone();
    d.signals = signals;
    d.signal_index = signal_index;
    d.clock = clock;
    return d;
}

ElaboratedDesign elaborate(const Ast &ast, const std::map<std::string, int64_t> &overrides) {
    ElaboratedDesign d;
    d.ast = ast.clone();

    ElabCtx ctx{d.ast.file, {}, &d.signal_index, &d.signals};

    // parameters: declarations in order, overrides win everywhere
    for (auto &p : d.ast.params) {
        int64_t v;
        if (auto it = overrides.find(p.name); it != overrides.end()) {
            v = it->second;
        } else {
            v = fold_const(ctx, *p.value);
        }
        ctx.params[p.name] = v;
        p.value = make_const(static_cast<uint64_t>(v), -1, p.pos);
    }
    for (const auto &[name, value] : overrides) {
        ctx.params[name] = value;
    }

    auto add_signal = [&](SignalInfo info) {
        info.index = static_cast<int>(d.signals.size());
        d.signal_index[info.name] = info.index;
        d.signals.push_back(std::move(info));
    };

    for (auto &p : d.ast.ports) {
        p.width = resolve_width(ctx, p.msb, p.lsb, p.pos, p.msb, p.lsb);
        SignalInfo info;
        info.name = p.name;
        info.kind = (p.dir == Direction::Input) ? SignalKind::Input : SignalKind::Output;
        info.width = p.width;
        info.is_state = p.is_reg;
        add_signal(info);
    }
    for (auto &r : d.ast.regs) {
        r.width = resolve_width(ctx, r.msb, r.lsb, r.pos, r.msb, r.lsb);
        SignalInfo info;
        info.name = r.name;
        info.kind = SignalKind::Reg;
        info.width = r.width;
        info.is_state = true;
        add_signal(info);
    }
    for (auto &m : d.ast.memories) {
        m.width = resolve_width(ctx, m.msb, m.lsb, m.pos, m.msb, m.lsb);
        int64_t hi = fold_const(ctx, *m.depth_msb);
        int64_t lo = fold_const(ctx, *m.depth_lsb);
        if (lo != 0) {
            fail(ctx, m.pos, "memory index range must end at 0");
        }
        if (hi < 0) {
            fail(ctx, m.pos, "non-positive memory depth");
        }
        m.depth = static_cast<uint64_t>(hi) + 1;
        if (m.depth > kMaxDepth) {
            fail(ctx, m.pos, "memory depth exceeds " + std::to_string(kMaxDepth));
        }
        m.depth_msb = make_const(static_cast<uint64_t>(hi), -1, m.pos);
        m.depth_lsb = make_const(0, -1, m.pos);
        SignalInfo info;
        info.name = m.name;
        info.kind = SignalKind::Memory;
        info.width = m.width;
        info.depth = m.depth;
        info.is_state = true;
        add_signal(info);
    }

    // one clock for all clocked processes
    for (const auto &p : d.ast.processes) {
        if (p.kind != ProcessKind::ClockedPosedge) {
            continue;
        }
        const SignalInfo *sig = d.find_signal(p.clock);
        if (!sig || sig->kind != SignalKind::Input) {
            throw Error(d.ast.file, {p.span.line_begin, 1},
                        "clock \"" + p.clock + "\" must be an input");
        }
        if (d.clock.empty()) {
            d.clock = p.clock;
        } else if (d.clock != p.clock) {
            throw Error(d.ast.file, {p.span.line_begin, 1},
                        "unsupported feature: multiple clock domains");
        }
    }

    AssignScan scan;
    for (auto &p : d.ast.processes) {
        elab_stmts(ctx, p.body, p, scan);
    }

    for (const auto &[name, procs] : scan.comb_writers) {
        if (procs.size() > 1) {
            throw Error(d.ast.file, {},
                        "signal \"" + name + "\" assigned in multiple combinational processes");
        }
        if (scan.clocked_writers.count(name)) {
            throw Error(d.ast.file, {},
                        "signal \"" + name + "\" driven by both clocked and combinational processes");
        }
        auto &info = d.signals[static_cast<size_t>(d.signal_index.at(name))];
        info.comb_driven = true;
        info.is_state = false;
    }
    for (const auto &[name, procs] : scan.clocked_writers) {
        if (procs.size() > 1) {
            throw Error(d.ast.file, {},
                        "signal \"" + name + "\" assigned in multiple clocked processes");
        }
        d.signals[static_cast<size_t>(d.signal_index.at(name))].is_state = true;
    }

    return d;
}

} // namespace rtlic
