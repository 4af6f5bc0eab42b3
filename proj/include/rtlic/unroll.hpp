// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rtlic/bv.hpp"
#include "rtlic/cfg.hpp"
#include "rtlic/sim.hpp"
#include "rtlic/solver.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace rtlic {

// Symbolic image of the design over cycles 1..n: fresh variables for every
// input per cycle, zero-initialized state at cycle 0, nonblocking commits
// folded into ite-chains. Guard expressions can be rendered against the
// pre-edge, clocked, or post-edge environment of any cycle.
class Unroller {
public:
    Unroller(const ElaboratedDesign &d, const CfgSet &cs, BvBuilder &b);

    void extend_to(int cycle);

    // Guard of `block` as a 1-bit term in the environment matching (cycle, phase).
    BvRef guard_term(BlockId block, int cycle, Phase phase);
    BvRef input_var(const std::string &name, int cycle);

    std::vector<InputVar> input_vars(int max_cycle) const;

private:
    struct State {
        std::map<std::string, BvRef> regs; // state signals
        std::map<std::string, BvRef> mems;
    };
    struct CycleEnv {
        State pre;       // state entering the cycle
        State post;      // state after the clock edge
        std::map<std::string, BvRef> comb_pre;  // settled comb signals, pre-edge
        std::map<std::string, BvRef> comb_post; // settled comb signals, post-edge
    };

    BvRef compile(const Expr &e, const State &st, const std::map<std::string, BvRef> &comb,
                  int cycle);
    BvRef compile_ref(const std::string &name, const State &st,
                      const std::map<std::string, BvRef> &comb, int cycle);
    void exec_clocked(const Process &p, const State &st, const std::map<std::string, BvRef> &comb,
                      int cycle, BvRef path, State &next);
    std::map<std::string, BvRef> settle_comb(const State &st, int cycle);
    void settle_pass(const Process &p, const State &st, int cycle,
                     std::map<std::string, BvRef> &comb, BvRef path,
                     const std::vector<StmtPtr> &stmts);

    const ElaboratedDesign &design_;
    const CfgSet &cfg_;
    BvBuilder &b_;
    std::vector<CycleEnv> cycles_; // [0] unused; index = cycle
};

} // namespace rtlic
