#pragma once

#include <string>

#include "blockloc/blocks.hpp"
#include "blockloc/mutate.hpp"
#include "blockloc/orchestrator.hpp"
#include "blockloc/slicer.hpp"

namespace blockloc {

/// blocks.json: array of {id, kind, instance, file, lines: [[start,end]...],
/// v_in, v_out, clocked}.
std::string blocks_to_json(const DesignHierarchy& design, const BlockSet& blocks);

/// {nodes: [{block, cycle}], edges: [[from_idx, to_idx]]}
std::string exec_path_to_json(const BlockSet& blocks, const ExecPath& path);

/// Graphviz DOT rendering of the execution path.
std::string exec_path_to_dot(const BlockSet& blocks, const ExecPath& path);

std::string ranking_to_json(const DesignHierarchy& design, const BlockSet& blocks,
                            const RankedList& ranking);
std::string ranking_to_text(const BlockSet& blocks, const RankedList& ranking);

std::string mutation_to_json(const Mutation& m);
Mutation mutation_from_json_text(const std::string& text);

/// Text histogram of block line counts, bucketed by 25 lines.
std::string block_size_histogram(const BlockSet& blocks);

} // namespace blockloc
