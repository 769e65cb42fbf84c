#pragma once

#include <vector>

#include "blockloc/ast.hpp"
#include "blockloc/source.hpp"

namespace blockloc {

/// Parse the supported synthesizable subset: module declarations with ANSI
/// port lists, net/param declarations, continuous assigns, always blocks with
/// if/else/case, blocking and nonblocking assignments, and module
/// instantiation by named port connection. Anything outside the subset raises
/// UnsupportedConstruct naming the file and line; malformed input raises
/// SyntaxError.
DesignAST parse_sources(std::vector<SourceUnit> files);

} // namespace blockloc
