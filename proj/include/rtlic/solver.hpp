// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rtlic/bv.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rtlic {

struct InputVar {
    std::string name;
    int cycle = 0;
    int width = 1;
};

struct CyclePredicates {
    int cycle = 0;
    std::vector<BvRef> preds; // 1-bit terms
};

// Per-cycle bit-vector path constraints plus the flipped pivot. `inputs`
// lists every free input variable a model must cover.
struct ConstraintVector {
    int pivot_cycle = 1;
    std::vector<CyclePredicates> per_cycle;
    std::vector<InputVar> inputs;
    std::string note; // human-readable pivot description for reports

    std::vector<BvRef> all_preds() const;
};

struct Model {
    std::map<std::pair<std::string, int>, uint64_t> assignments; // (input, cycle) -> value

    BvEnv env() const;
};

enum class SolveStatus { Sat, Unsat, Unknown };

struct SolveResult {
    SolveStatus status = SolveStatus::Unknown;
    Model model;     // valid when Sat
    uint64_t conflicts = 0;
    uint64_t propagations = 0;
};

struct SolverLimits {
    uint64_t max_propagations = 200'000'000;
    uint64_t max_conflicts = 2'000'000;
    int max_scalarized_addr_width = 8;
};

// Eager memory scalarization, bit-blasting to CNF, CDCL search (activity
// heuristic, deterministic tie-breaks, no restarts), model extraction.
// Resource exhaustion yields Unknown, never a wrong verdict.
SolveResult solve(const ConstraintVector &cv, const SolverLimits &limits = {});

// Concrete evaluation of every predicate under the model.
bool check_model(const ConstraintVector &cv, const Model &m);

struct SmtOptions {
    bool scalarize = false; // force QF_BV with one variable per word per cycle
};

// Valid SMT-LIB2 script: QF_ABV when array terms are present (QF_BV
// otherwise, and always under scalarize), (check-sat) and (get-model)
// included, variables named "<signal>__c<cycle>".
std::string emit_smtlib(const ConstraintVector &cv, const SmtOptions &opts = {});

// Pipes the script to an external solver executable and parses
// sat/unsat/model lines. Unparseable output maps to Unknown.
SolveResult solve_external(const ConstraintVector &cv, const std::string &solver_path);

// Rewrites array terms into per-word ite chains over a fresh builder.
ConstraintVector scalarize(const ConstraintVector &cv, BvBuilder &b);

} // namespace rtlic
