#pragma once

#include <string>
#include <vector>

#include "blockloc/ast.hpp"
#include "blockloc/blocks.hpp"
#include "blockloc/elaborate.hpp"

namespace blockloc {

/// Project manifest (TOML or JSON; flags override fields). Paths are resolved
/// relative to the manifest file.
struct ProjectManifest {
    std::vector<std::string> sources; // ordered .sv files
    std::string top;
    std::string clock = "clk";
    std::string reset;    // optional; joins the default trigger-name set
    std::string waveform; // VCD path
    std::string report;   // test report JSON path
    std::string backend;  // backend spec: scripted:... | remote:... | policy:...
    std::string coverage; // optional external per-cycle coverage JSON
    std::string dir;      // directory of the manifest file

    static ProjectManifest load(const std::string& path);

    std::string resolve(const std::string& rel) const;
    /// Hierarchical name of the clock at the top level.
    std::string clock_hier() const { return top + "." + clock; }
};

/// Parsed design bundle: AST + hierarchy + blocks, loaded per manifest.
struct Design {
    DesignAST ast;
    DesignHierarchy hier;
    BlockSet blocks;
};

Design load_design(const ProjectManifest& manifest);

} // namespace blockloc
