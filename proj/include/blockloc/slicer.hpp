#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "blockloc/blocks.hpp"
#include "blockloc/coverage.hpp"
#include "blockloc/elaborate.hpp"
#include "blockloc/waveform.hpp"

namespace blockloc {

struct SliceLimits {
    int max_nodes = 100000;
};

/// Result of one intra-block step: the driving signals and the cycle their
/// values were taken at.
struct DrivenSet {
    std::vector<SigId> signals; // deterministic dataflow order
    int cycle = 0;
};

/// Directed graph over (block, cycle) nodes. Edge (b',t') -> (b,t) means the
/// value b produced at t was computed from b' outputs at t'; t - t' is 1
/// exactly when b is sequential, else 0. The same block may appear at many
/// cycles.
struct ExecPath {
    struct Node {
        int block = -1; // index into BlockSet.blocks
        int cycle = 0;
    };
    struct DrivenEntry {
        SigId signal = kNoSignal;
        int cycle = 0;
        int source_node = -1;
    };

    std::vector<Node> nodes; // discovery order; nodes[0] is the root
    std::set<std::pair<int, int>> edges; // (from node idx, to node idx)
    std::map<int, std::vector<DrivenEntry>> driven; // node idx -> annotations
    std::vector<std::string> diagnostics;           // undriven frontier notes

    int find_node(int block, int cycle) const;
    std::set<int> distinct_blocks() const;
};

/// Static cone of influence of s within b: signals read by any assignment to
/// s plus every condition dominating those assignments, with intra-block
/// blocking chains collapsed transitively. Port blocks return v_in verbatim.
/// Result order: rhs reads first (site order), then guards; deduplicated.
std::vector<SigId> dataflow_analysis(const DesignHierarchy& design, const BlockSet& blocks,
                                     SigId s, const CodeBlock& b);

/// One step of the slicing recurrence. Combinational blocks propagate at the
/// same cycle; sequential blocks step to t-1, collapsing to {s} when the
/// assignment was not covered (the register retained its value).
DrivenSet intra_block_analysis(const DesignHierarchy& design, const BlockSet& blocks, SigId s,
                               const CodeBlock& b, int t, const Waveform& w,
                               const CoverageSource& src);

/// Worklist construction of the execution path from (sig, t), memoized on
/// (signal, cycle). Branches reaching undriven signals (primary inputs) end
/// silently with a diagnostic; re-entering a signal at the same cycle through
/// combinational edges raises CombinationalLoop.
ExecPath build_exec_path(const DesignHierarchy& design, const BlockSet& blocks, SigId sig, int t,
                         const Waveform& w, const CoverageSource& src,
                         const SliceLimits& limits = {});

} // namespace blockloc
