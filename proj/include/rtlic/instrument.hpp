// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rtlic/cfg.hpp"
#include "rtlic/sequence.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rtlic {

struct Constraint {
    std::string signal;
    bool resolved = false;
    uint64_t value = 0;
    int width = 1;
};

// An opaque guard predicate carried verbatim into synthetic branches when a
// path condition is not of the `sig == literal` / bare-flag shape.
struct GuardPredicate {
    const Expr *cond = nullptr;
    bool polarity = true;
};

struct ConstraintSet {
    BlockId owner = -1;
    std::vector<Constraint> resolved;   // path order first, then adopted values
    std::vector<Constraint> unresolved;
    std::vector<GuardPredicate> predicates;

    bool has_resolved(const std::string &signal) const;
    const Constraint *find_resolved(const std::string &signal) const;
};

struct SyntheticTarget {
    std::string marker;              // "Target<k>", 1-based queue position
    ConstraintSet constraints;       // resolved only
    std::string origin_block;        // sequence block label (e.g. "B3")
    std::string branch_block;        // then-block label in the instrumented design
};

struct TargetQueue {
    std::vector<SyntheticTarget> entries; // queue order = sequence order
};

struct InstrumentedDesign {
    ElaboratedDesign design;                    // original + one checker process
    std::map<std::string, std::string> marker_table; // block label -> marker text
    TargetQueue queue;
};

struct DominatingGuard {
    BlockId owner = -1;
    bool polarity = true;
    const Expr *cond = nullptr;
};

// Guards dominating `b` within its process, entry-first. The walk follows
// unique predecessors and stops at joins.
std::vector<DominatingGuard> dominating_guards(const CfgSet &cs, BlockId b);

// Path conditions to reach `b`, collected along the reverse intra walk:
// `sig == literal` and bare-flag guards become resolved constraints, other
// guard shapes opaque predicates, and assignments in `b` contribute
// unresolved constraints for their left/right-hand signals.
ConstraintSet extract_constraints(const CfgSet &cs, BlockId b);

// Resolves sc against the fully resolved target constraints: by name
// intersection first, then by forward def-use search (first hit in tc wins).
// Unresolvable constraints are discarded; memory arrays are never adopted.
ConstraintSet modify(const ConstraintSet &tc, const ConstraintSet &sc, const CfgSet &cs);

// `if (<conjunction>) $display(marker)` material for the checker process.
// Throws when the constraint set is empty ("unconstrained sequence event").
SyntheticTarget create_branch(const ConstraintSet &sc_resolved, const std::string &marker);

// Builds the full target queue for a sequence stack (extract + modify +
// create_branch per event, queue order preserving stack order).
TargetQueue build_target_queue(const CfgSet &cs, const BranchTarget &target, const SequenceStack &ss);

// Appends one combinational checker process holding the synthetic branches
// and assigns every block a unique marker. Original signal behavior is
// unchanged.
InstrumentedDesign instrument_design(const ElaboratedDesign &d, const TargetQueue &tq);

} // namespace rtlic
