// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rtlic/ast.hpp"
#include "rtlic/source.hpp"

namespace rtlic {

// Parses the synthesizable subset: one module, ANSI port list, optional
// parameter declarations, reg/memory declarations, `always @(posedge clk)`
// and `always @(*)` processes with if/else, <=/=, and $display markers.
// Throws Error with a file:line:col diagnostic on syntax errors and on
// recognized-but-unsupported constructs.
Ast parse_design(const SourceDesign &src);

} // namespace rtlic
