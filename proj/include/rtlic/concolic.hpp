// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rtlic/instrument.hpp"
#include "rtlic/sim.hpp"
#include "rtlic/solver.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rtlic {

struct AlternateBranch {
    BlockId block = -1;       // the unexecuted polarity's block
    BlockId guard_block = -1; // owner of the guard being flipped
    bool negated_polarity = true; // polarity the flip enforces
    int cycle = 0;
    Phase phase = Phase::PostComb; // encoding environment for the pivot
    uint32_t distance = kUnreachable;
};

struct SearchConfig {
    int unroll = 10;
    int limit = 10;
    uint64_t seed = 1;
    bool baseline = false; // forces an empty target queue
    std::function<SolveResult(const ConstraintVector &)> solver; // defaults to the internal solver
};

struct TargetOutcome {
    std::string marker;
    std::string block;
    bool solved = false;
    int iterations = 0;       // solver calls
    int activation_cycle = 0; // 0 when unsolved
    int next_start = 0;       // activation_cycle + 1
    std::vector<TestVector> fragment; // cycles start..activation
};

struct IncrementalResult {
    std::vector<TargetOutcome> targets; // queue entries then the final target
    TestSet combined;                   // concatenated fragments
    TestSet working;                    // full working test over 1..n
    bool all_solved = false;
    int final_activation = 0;
    uint64_t solver_calls = 0;
    uint64_t rejected_models = 0; // resimulation-gate rejections
};

// Executed guards at cycles >= start whose opposite polarity was not taken
// that cycle, sorted ascending by (distance of the opposite block, cycle,
// block id).
std::vector<AlternateBranch> select_alternate_branches(const CfgSet &cs, const SimulationTrace &p,
                                                       const DistanceMap &ds, int start);

// Pins every input before the pivot cycle to the current test, re-states the
// executed guard predicates of those cycles, and asserts the pivot's own
// dominating guards plus the flipped pivot at the pivot cycle, over the
// unrolled transition relation.
ConstraintVector build_constraint_vector(const ElaboratedDesign &d, const CfgSet &cs,
                                         const AlternateBranch &ab, const SimulationTrace &p,
                                         const TestSet &t);

struct ConcolicOutcome {
    TestSet test;
    int activation_cycle = 0;
    bool solved = false;
    int iterations = 0;
    uint64_t rejected_models = 0;
};

// One CONCOLIC search: looks for an activation of `target_block` at a cycle
// >= start, flipping one ranked alternate branch per iteration, with a
// mandatory resimulation check on every model.
ConcolicOutcome concolic(const ElaboratedDesign &d, const CfgSet &cs, BlockId target_block,
                         const TestSet &t, int start, const SearchConfig &cfg);

// Processes the queue in order starting at cycle 1, each solved target's
// test preserved as the starting point of the next, then runs one more
// search on the final branch target itself.
IncrementalResult incremental_run(const InstrumentedDesign &d, const BranchTarget &final_target,
                                  const SearchConfig &cfg);

} // namespace rtlic
