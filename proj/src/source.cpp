// Part of the rtlic project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "rtlic/source.hpp"

#include <fstream>
#include <sstream>

namespace rtlic {

std::string Diagnostic::str() const {
    std::ostringstream os;
    if (!file.empty()) {
        os << file;
        if (pos.line > 0) {
            os << ":" << pos.line << ":" << (pos.col > 0 ? pos.col : 1);
        }
        os << ": ";
    }
    os << severity << ": " << message;
    return os.str();
}

static std::vector<size_t> index_lines(const std::string &text) {
    std::vector<size_t> offsets{0};
    for (size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\n' && i + 1 < text.size()) {
            offsets.push_back(i + 1);
        }
    }
    return offsets;
}

SourceDesign SourceDesign::from_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(path, {}, "cannot open design file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    SourceDesign src;
    src.path = path;
    src.source = buf.str();
    src.line_offsets = index_lines(src.source);
    return src;
}

SourceDesign SourceDesign::from_string(std::string text, std::string name) {
    SourceDesign src;
    src.path = std::move(name);
    src.source = std::move(text);
    src.line_offsets = index_lines(src.source);
    return src;
}

SourcePos SourceDesign::pos_at(size_t byte_offset) const {
    if (byte_offset > source.size()) {
        byte_offset = source.size();
    }
    // last line whose start offset is <= byte_offset
    size_t lo = 0, hi = line_offsets.size();
    while (lo + 1 < hi) {
        size_t mid = (lo + hi) / 2;
        if (line_offsets[mid] <= byte_offset) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    SourcePos p;
    p.line = static_cast<int>(lo) + 1;
    p.col = static_cast<int>(byte_offset - line_offsets[lo]) + 1;
    return p;
}

} // namespace rtlic
