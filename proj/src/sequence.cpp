// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "rtlic/sequence.hpp"

#include <algorithm>
#include <sstream>

namespace rtlic {

namespace {

void collect_leaves(const Expr &e, const ElaboratedDesign &d, SignalExpression &se) {
    switch (e.kind) {
    case ExprKind::Const:
        se.constants.push_back({e.value, e.width});
        return;
    case ExprKind::Ref:
    case ExprKind::Index:
    case ExprKind::Slice:
        if (d.find_signal(e.name) &&
            std::find(se.signals.begin(), se.signals.end(), e.name) == se.signals.end()) {
            se.signals.push_back(e.name);
        }
        if (e.index) {
            collect_leaves(*e.index, d, se);
        }
        return;
    case ExprKind::Unary:
        collect_leaves(*e.lhs, d, se);
        return;
    case ExprKind::Binary:
        collect_leaves(*e.lhs, d, se);
        collect_leaves(*e.rhs, d, se);
        return;
    case ExprKind::Ternary:
        collect_leaves(*e.lhs, d, se);
        collect_leaves(*e.rhs, d, se);
        collect_leaves(*e.tern, d, se);
        return;
    case ExprKind::Concat:
        for (const auto &p : e.parts) {
            collect_leaves(*p, d, se);
        }
        return;
    }
}

// right-hand-side signal leaves of an assignment, syntactic order with duplicates removed
std::vector<std::string> rhs_signals(const Stmt &s, const ElaboratedDesign &d) {
    SignalExpression tmp;
    collect_leaves(*s.rhs, d, tmp);
    return tmp.signals;
}

struct Search {
    const CfgSet &cs;
    const ElaboratedDesign &d;
    SequenceStack ss;
    std::vector<BlockId> push_list;

    void push_block(BlockId id) {
        auto it = std::find(push_list.begin(), push_list.end(), id);
        if (it != push_list.end()) {
            push_list.erase(it); // re-push moves the event deeper in the order
        }
        push_list.push_back(id);
    }

    void recurse(const std::string &signal) {
        if (ss.visited.count(signal)) {
            return;
        }
        ss.visited.insert(signal);
        const SignalInfo &info = d.signal(signal);
        if (info.kind == SignalKind::Input) {
            return; // primary inputs need no prior event
        }
        std::vector<BlockId> blocks = find_assignment_blocks(cs, signal);
        for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
            push_block(*it); // reversed push keeps pop order in source order
        }
        for (BlockId b : blocks) {
            for (const Stmt *s : cs.block(b).stmts) {
                if ((s->kind != StmtKind::AssignNb && s->kind != StmtKind::AssignB) ||
                    s->lhs_name != signal) {
                    continue;
                }
                for (const auto &sig : rhs_signals(*s, d)) {
                    recurse(sig);
                }
            }
        }
    }
};

} // namespace

std::string SequenceStack::str(const CfgSet &cs) const {
    std::ostringstream os;
    os << "S = <";
    for (size_t i = 0; i < blocks.size(); ++i) {
        os << (i ? ", " : "") << cs.block(blocks[i]).label;
    }
    os << ">";
    return os.str();
}

SignalExpression get_signal_expression(const CfgSet &cs, const BranchTarget &t) {
    const Expr *guard = nullptr;
    for (BlockId p : cs.intra_preds(t.block)) {
        const Block &pred = cs.block(p);
        if (pred.guard && (pred.guard->true_succ == t.block || pred.guard->false_succ == t.block)) {
            guard = pred.guard->cond;
            break;
        }
    }
    if (!guard) {
        throw Error("target block " + cs.block(t.block).label + " has no guarded entry edge");
    }
    SignalExpression se;
    se.origin = guard;
    collect_leaves(*guard, *cs.design, se);
    return se;
}

SequenceStack dependency_search(const CfgSet &cs, const SignalExpression &se) {
    Search search{cs, *cs.design, {}, {}};
    for (const auto &sig : se.signals) {
        search.recurse(sig);
    }
    // pop order: deepest dependency first
    search.ss.blocks.assign(search.push_list.rbegin(), search.push_list.rend());
    return search.ss;
}

} // namespace rtlic
