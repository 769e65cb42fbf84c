#pragma once

#include <string>
#include <vector>

namespace blockloc {

/// One input file, kept verbatim so mutation splices stay byte-exact.
struct SourceUnit {
    std::string path;
    std::string text;
    int line_count = 0;
};

SourceUnit make_source(std::string path, std::string text);
SourceUnit load_source_file(const std::string& path);

/// Source range. Lines/columns are 1-based; offsets index into SourceUnit::text
/// with `end_offset` exclusive.
struct Span {
    int line = 0;
    int col = 0;
    int end_line = 0;
    int end_col = 0;
    size_t offset = 0;
    size_t end_offset = 0;
};

} // namespace blockloc
