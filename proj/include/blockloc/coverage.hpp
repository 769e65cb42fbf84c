#pragma once

#include <map>
#include <set>
#include <string>

#include "blockloc/blocks.hpp"
#include "blockloc/elaborate.hpp"
#include "blockloc/waveform.hpp"

namespace blockloc {

/// Where per-cycle assignment coverage comes from. Replay re-evaluates the
/// dominating guards from waveform values, which keeps the toolkit
/// self-contained; ExternalFile consumes a per-cycle dump
/// (JSON array of {file, line, cycles:[...]}, posedge cycle convention).
struct CoverageSource {
    enum class Mode { Replay, ExternalFile };
    Mode mode = Mode::Replay;
    std::map<std::pair<std::string, int>, std::set<int>> external; // (file,line) -> cycles

    static CoverageSource replay() { return {}; }
    static CoverageSource from_file(const std::string& path);
    static CoverageSource from_json_text(const std::string& text,
                                         const std::string& path_for_errors = "<coverage>");

    /// ExternalFile invariant: every referenced line belongs to some block.
    void validate_against(const BlockSet& blocks) const;
};

/// Whether the assignment to `s` inside clocked block `b` executed at cycle
/// t. Replay mode: some assignment site targeting s has every dominating
/// guard evaluating to 1 at t; a guard evaluating to X counts as not covered
/// (the retained-register reading is the safer slicing assumption).
bool is_assignment_covered(const DesignHierarchy& design, const CodeBlock& b, SigId s, int t,
                           const Waveform& w, const CoverageSource& src);

} // namespace blockloc
