// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rtlic/ast.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rtlic {

enum class SignalKind { Input, Output, Reg, Memory };

struct SignalInfo {
    std::string name;
    SignalKind kind = SignalKind::Reg;
    int width = 1;
    uint64_t depth = 0;      // Memory only
    bool is_state = false;   // holds value across cycles (regs, memories, output regs)
    bool comb_driven = false; // assigned from a combinational process
    int index = 0;           // position in the signal table
};

// Parameter-free design: every width and constant is concrete and every
// Expr node carries a resolved width >= 1.
struct ElaboratedDesign {
    Ast ast;
    std::vector<SignalInfo> signals;
    std::map<std::string, int> signal_index;
    std::string clock; // sensitivity signal of the clocked processes ("" if none)

    const SignalInfo *find_signal(const std::string &name) const;
    const SignalInfo &signal(const std::string &name) const; // throws on unknown
    std::vector<std::string> input_names() const;            // excludes the clock

    ElaboratedDesign clone() const;
};

// Substitutes parameters (declarations and overrides; overrides win), folds
// constant expressions, resolves widths, and checks the subset rules.
// Maximum supported signal width is 64 bits.
ElaboratedDesign elaborate(const Ast &ast, const std::map<std::string, int64_t> &overrides = {});

} // namespace rtlic
