// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rtlic/cfg.hpp"

#include <set>
#include <string>
#include <vector>

namespace rtlic {

struct SignalExpression {
    std::vector<std::string> signals;               // order of first occurrence in the guard
    std::vector<std::pair<uint64_t, int>> constants; // (value, width)
    const Expr *origin = nullptr;
};

// The ordered event blocks that must execute before the target can fire.
// Front of `blocks` is the earliest event (deepest dependency).
struct SequenceStack {
    std::vector<BlockId> blocks;
    std::set<std::string> visited;

    std::string str(const CfgSet &cs) const; // "S = <B3, B8>"
};

// Signal and constant leaves of the target's guard expression.
// Throws when the target block has no guarded entry edge.
SignalExpression get_signal_expression(const CfgSet &cs, const BranchTarget &t);

// Recursive def-use walk: for each signal, push its assignment blocks and
// recurse into the right-hand sides; primary inputs and already-visited
// signals stop the recursion. Read front-to-back the result is the temporal
// event order.
SequenceStack dependency_search(const CfgSet &cs, const SignalExpression &se);

} // namespace rtlic
