// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rtlic/diagnostics.hpp"

#include <string>
#include <vector>

namespace rtlic {

// A loaded design file plus the byte-offset -> (line, col) index used for
// diagnostics and target location.
struct SourceDesign {
    std::string path;
    std::string source;
    std::vector<size_t> line_offsets; // byte offset of the start of each 1-based line

    static SourceDesign from_file(const std::string &path);
    static SourceDesign from_string(std::string text, std::string name = "<memory>");

    SourcePos pos_at(size_t byte_offset) const;
    int line_count() const { return static_cast<int>(line_offsets.size()); }
};

} // namespace rtlic
