// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace rtlic {

struct SourcePos {
    int line = 0; // 1-based, 0 = unknown
    int col = 0;  // 1-based
};

struct SourceSpan {
    int line_begin = 0;
    int line_end = 0;
};

// Diagnostics render as "file:line:col: severity: message".
struct Diagnostic {
    std::string file;
    SourcePos pos;
    std::string severity = "error";
    std::string message;

    std::string str() const;
};

// Thrown by frontend and pipeline stages; carries a printable diagnostic.
class Error : public std::runtime_error {
public:
    explicit Error(Diagnostic diag) : std::runtime_error(diag.str()), diag_(std::move(diag)) {}
    Error(std::string file, SourcePos pos, std::string message)
        : Error(Diagnostic{std::move(file), pos, "error", std::move(message)}) {}
    explicit Error(std::string message) : Error(Diagnostic{"", {}, "error", std::move(message)}) {}

    const Diagnostic &diag() const { return diag_; }

private:
    Diagnostic diag_;
};

} // namespace rtlic
