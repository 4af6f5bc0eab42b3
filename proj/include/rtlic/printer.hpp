// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rtlic/ast.hpp"

#include <string>

namespace rtlic {

// Canonical source form. Re-parsing the output yields a structurally
// identical Ast (spans aside).
std::string print_design(const Ast &ast);
std::string print_expr(const Expr &e);
std::string print_stmt(const Stmt &s, int indent = 0);

} // namespace rtlic
