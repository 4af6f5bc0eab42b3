// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "rtlic/instrument.hpp"

#include <algorithm>
#include <deque>

namespace rtlic {

std::vector<DominatingGuard> dominating_guards(const CfgSet &cs, BlockId b) {
    std::vector<DominatingGuard> rev;
    BlockId cur = b;
    while (true) {
        std::vector<BlockId> preds = cs.intra_preds(cur);
        if (preds.size() != 1) {
            break; // entry or a join: no polarity pinned above this point
        }
        BlockId p = preds[0];
        const Block &pred = cs.block(p);
        if (pred.guard && pred.guard->true_succ == cur) {
            rev.push_back({p, true, pred.guard->cond});
        } else if (pred.guard && pred.guard->false_succ == cur) {
            rev.push_back({p, false, pred.guard->cond});
        }
        cur = p;
    }
    std::reverse(rev.begin(), rev.end());
    return rev;
}

namespace {

bool fits_width(uint64_t value, int width) {
    if (width >= 64) {
        return true;
    }
    return value <= ((1ull << width) - 1);
}

// `sig == literal` and bare one-bit flags resolve to a value; everything
// else stays an opaque predicate.
bool classify_guard(const CfgSet &cs, const Expr &cond, bool polarity, Constraint &out) {
    const ElaboratedDesign &d = *cs.design;
    if (cond.kind == ExprKind::Ref) {
        const SignalInfo *sig = d.find_signal(cond.name);
        if (sig && sig->width == 1 && sig->kind != SignalKind::Memory) {
            out = {cond.name, true, polarity ? 1ull : 0ull, 1};
            return true;
        }
        return false;
    }
    if (cond.kind == ExprKind::Unary && cond.unary_op == UnaryOp::LogNot) {
        Constraint inner;
        if (classify_guard(cs, *cond.lhs, !polarity, inner)) {
            out = inner;
            return true;
        }
        return false;
    }
    if (cond.kind == ExprKind::Binary &&
        (cond.binary_op == BinaryOp::Eq || cond.binary_op == BinaryOp::Ne)) {
        bool want = (cond.binary_op == BinaryOp::Eq) ? polarity : !polarity;
        if (!want) {
            return false; // a disequality constrains no single value
        }
        const Expr *ref = nullptr;
        const Expr *lit = nullptr;
        if (cond.lhs->kind == ExprKind::Ref && cond.rhs->kind == ExprKind::Const) {
            ref = cond.lhs.get();
            lit = cond.rhs.get();
        } else if (cond.rhs->kind == ExprKind::Ref && cond.lhs->kind == ExprKind::Const) {
            ref = cond.rhs.get();
            lit = cond.lhs.get();
        }
        if (!ref || !lit) {
            return false;
        }
        const SignalInfo *sig = d.find_signal(ref->name);
        if (!sig || sig->kind == SignalKind::Memory || !fits_width(lit->value, sig->width)) {
            return false;
        }
        out = {ref->name, true, lit->value, sig->width};
        return true;
    }
    return false;
}

void collect_expr_signals(const Expr &e, const ElaboratedDesign &d, std::vector<std::string> &out) {
    switch (e.kind) {
    case ExprKind::Ref:
    case ExprKind::Index:
    case ExprKind::Slice:
        if (d.find_signal(e.name) && std::find(out.begin(), out.end(), e.name) == out.end()) {
            out.push_back(e.name);
        }
        if (e.index) {
            collect_expr_signals(*e.index, d, out);
        }
        return;
    case ExprKind::Unary:
        collect_expr_signals(*e.lhs, d, out);
        return;
    case ExprKind::Binary:
        collect_expr_signals(*e.lhs, d, out);
        collect_expr_signals(*e.rhs, d, out);
        return;
    case ExprKind::Ternary:
        collect_expr_signals(*e.lhs, d, out);
        collect_expr_signals(*e.rhs, d, out);
        collect_expr_signals(*e.tern, d, out);
        return;
    case ExprKind::Concat:
        for (const auto &p : e.parts) {
            collect_expr_signals(*p, d, out);
        }
        return;
    case ExprKind::Const:
        return;
    }
}

} // namespace

bool ConstraintSet::has_resolved(const std::string &signal) const {
    return find_resolved(signal) != nullptr;
}

const Constraint *ConstraintSet::find_resolved(const std::string &signal) const {
    for (const auto &c : resolved) {
        if (c.signal == signal) {
            return &c;
        }
    }
    return nullptr;
}

ConstraintSet extract_constraints(const CfgSet &cs, BlockId b) {
    const ElaboratedDesign &d = *cs.design;
    ConstraintSet out;
    out.owner = b;

    auto add_unresolved = [&](const std::string &sig) {
        if (out.has_resolved(sig)) {
            return;
        }
        for (const auto &c : out.unresolved) {
            if (c.signal == sig) {
                return;
            }
        }
        out.unresolved.push_back({sig, false, 0, d.signal(sig).width});
    };

    for (const auto &pg : dominating_guards(cs, b)) {
        Constraint c;
        if (classify_guard(cs, *pg.cond, pg.polarity, c)) {
            if (const Constraint *prev = out.find_resolved(c.signal)) {
                if (prev->value == c.value) {
                    continue; // repeated guard, nothing new
                }
            }
            out.resolved.push_back(c);
        } else {
            out.predicates.push_back({pg.cond, pg.polarity});
            std::vector<std::string> sigs;
            collect_expr_signals(*pg.cond, d, sigs);
            for (const auto &s : sigs) {
                add_unresolved(s);
            }
        }
    }

    const Block &blk = cs.block(b);
    for (const Stmt *s : blk.stmts) {
        if (s->kind != StmtKind::AssignNb && s->kind != StmtKind::AssignB) {
            continue;
        }
        std::vector<std::string> sigs{s->lhs_name};
        if (s->lhs_index) {
            collect_expr_signals(*s->lhs_index, d, sigs);
        }
        collect_expr_signals(*s->rhs, d, sigs);
        for (const auto &sig : sigs) {
            add_unresolved(sig);
        }
    }
    return out;
}

namespace {

// True when the assignment copies the signal's value into its target: the
// right-hand side is the bare signal or one of its words. Adopting a target
// value along a chain is only meaningful for such value-preserving hops
// (a transformed value, like q + 1, would yield a contradictory constraint).
bool copies_value_of(const Stmt &s, const std::string &sig) {
    if (s.kind != StmtKind::AssignNb && s.kind != StmtKind::AssignB) {
        return false;
    }
    const Expr &rhs = *s.rhs;
    return (rhs.kind == ExprKind::Ref || rhs.kind == ExprKind::Index) && rhs.name == sig;
}

// Forward def-use walk: from a signal through copy assignments to the
// signals they define. Depth-first, deterministic block order, first usable
// hit in the target constraints wins.
const Constraint *forward_search(const CfgSet &cs, const std::string &start,
                                 const ConstraintSet &tc, int want_width) {
    const ElaboratedDesign &d = *cs.design;
    std::vector<std::string> stack{start};
    std::set<std::string> visited{start};
    while (!stack.empty()) {
        std::string sig = stack.back();
        stack.pop_back();
        std::vector<std::string> next;
        for (const auto &b : cs.blocks) {
            if (!b.uses.count(sig)) {
                continue;
            }
            for (const Stmt *s : b.stmts) {
                if (copies_value_of(*s, sig) && !visited.count(s->lhs_name)) {
                    next.push_back(s->lhs_name);
                }
            }
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        for (const auto &cand : next) {
            if (const Constraint *hit = tc.find_resolved(cand)) {
                if (d.signal(cand).kind != SignalKind::Memory && fits_width(hit->value, want_width)) {
                    return hit;
                }
            }
        }
        // depth-first: push in reverse so the smallest name is explored first
        for (auto it = next.rbegin(); it != next.rend(); ++it) {
            visited.insert(*it);
            stack.push_back(*it);
        }
    }
    return nullptr;
}

} // namespace

ConstraintSet modify(const ConstraintSet &tc, const ConstraintSet &sc, const CfgSet &cs) {
    const ElaboratedDesign &d = *cs.design;
    ConstraintSet out;
    out.owner = sc.owner;
    out.resolved = sc.resolved;
    out.predicates = sc.predicates;

    std::vector<Constraint> adopted;
    std::vector<Constraint> remaining;
    for (const auto &cons : sc.unresolved) {
        if (out.has_resolved(cons.signal)) {
            continue;
        }
        const Constraint *hit = tc.find_resolved(cons.signal);
        if (hit && fits_width(hit->value, cons.width)) {
            adopted.push_back({cons.signal, true, hit->value, cons.width});
        } else {
            remaining.push_back(cons);
        }
    }
    for (const auto &cons : remaining) {
        if (d.signal(cons.signal).kind == SignalKind::Memory) {
            continue; // a whole array never forms a value constraint; discard
        }
        if (const Constraint *hit = forward_search(cs, cons.signal, tc, cons.width)) {
            adopted.push_back({cons.signal, true, hit->value, cons.width});
        }
        // still unresolved constraints are discarded from the output
    }
    std::sort(adopted.begin(), adopted.end(), [&](const Constraint &a, const Constraint &b) {
        return d.signal(a.signal).index < d.signal(b.signal).index;
    });
    for (auto &c : adopted) {
        out.resolved.push_back(std::move(c));
    }
    return out;
}

SyntheticTarget create_branch(const ConstraintSet &sc_resolved, const std::string &marker) {
    if (sc_resolved.resolved.empty() && sc_resolved.predicates.empty()) {
        throw Error("unconstrained sequence event (no resolved constraints for block)");
    }
    SyntheticTarget st;
    st.marker = marker;
    st.constraints = sc_resolved;
    st.constraints.unresolved.clear();
    return st;
}

TargetQueue build_target_queue(const CfgSet &cs, const BranchTarget &target,
                               const SequenceStack &ss) {
    ConstraintSet tc = extract_constraints(cs, target.block);
    TargetQueue tq;
    int k = 0;
    for (BlockId s : ss.blocks) {
        ConstraintSet sc = extract_constraints(cs, s);
        ConstraintSet resolved = modify(tc, sc, cs);
        SyntheticTarget st = create_branch(resolved, "Target" + std::to_string(++k));
        st.origin_block = cs.block(s).label;
        tq.entries.push_back(std::move(st));
    }
    return tq;
}

namespace {

ExprPtr build_branch_expr(const ConstraintSet &cset, const ElaboratedDesign &d) {
    ExprPtr conj;
    auto and_with = [&](ExprPtr term) {
        if (!conj) {
            conj = std::move(term);
            return;
        }
        auto e = std::make_unique<Expr>();
        e->kind = ExprKind::Binary;
        e->binary_op = BinaryOp::LogAnd;
        e->width = 1;
        e->lhs = std::move(conj);
        e->rhs = std::move(term);
        conj = std::move(e);
    };
    for (const auto &c : cset.resolved) {
        int width = d.signal(c.signal).width;
        auto eq = std::make_unique<Expr>();
        eq->kind = ExprKind::Binary;
        eq->binary_op = BinaryOp::Eq;
        eq->width = 1;
        eq->lhs = make_ref(c.signal);
        eq->lhs->width = width;
        eq->rhs = make_const(c.value, width);
        and_with(std::move(eq));
    }
    for (const auto &p : cset.predicates) {
        ExprPtr term = p.cond->clone();
        if (!p.polarity) {
            auto neg = std::make_unique<Expr>();
            neg->kind = ExprKind::Unary;
            neg->unary_op = UnaryOp::LogNot;
            neg->width = 1;
            neg->lhs = std::move(term);
            term = std::move(neg);
        }
        and_with(std::move(term));
    }
    return conj;
}

} // namespace

InstrumentedDesign instrument_design(const ElaboratedDesign &d, const TargetQueue &tq) {
    InstrumentedDesign out;
    out.design = d.clone();
    out.queue = tq;

    if (!tq.entries.empty()) {
        Process checker;
        checker.id = static_cast<int>(out.design.ast.processes.size()) + 1;
        checker.kind = ProcessKind::Combinational;
        for (const auto &entry : tq.entries) {
            auto branch = std::make_unique<Stmt>();
            branch->kind = StmtKind::If;
            branch->cond = build_branch_expr(entry.constraints, out.design);
            auto mark = std::make_unique<Stmt>();
            mark->kind = StmtKind::Display;
            mark->text = entry.marker;
            branch->then_stmts.push_back(std::move(mark));
            checker.body.push_back(std::move(branch));
        }
        out.design.ast.processes.push_back(std::move(checker));
    }

    CfgSet cs = build_cfg_set(out.design);
    for (const auto &b : cs.blocks) {
        std::string marker = b.label;
        for (const Stmt *s : b.stmts) {
            if (s->kind == StmtKind::Display) {
                marker = s->text;
                break;
            }
        }
        for (const auto &[label, existing] : out.marker_table) {
            if (existing == marker) {
                throw Error("duplicate marker \"" + marker + "\" (blocks " + label + " and " +
                            b.label + ")");
            }
        }
        out.marker_table[b.label] = marker;
    }
    for (auto &entry : out.queue.entries) {
        for (const auto &[label, marker] : out.marker_table) {
            if (marker == entry.marker) {
                entry.branch_block = label;
            }
        }
    }
    return out;
}

} // namespace rtlic
