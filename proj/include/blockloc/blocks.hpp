#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "blockloc/elaborate.hpp"

namespace blockloc {

enum class BlockKind { ModInput, ModOutput, Assign, Always };

const char* block_kind_name(BlockKind kind);

/// A disjoint set of source lines with input/output signal sets. Blocks of one
/// BlockSet never share a (file, line) pair.
struct CodeBlock {
    std::string id; // deterministic: instance|file|first line|kind
    BlockKind kind;
    std::set<std::pair<std::string, int>> lines; // (file, line)
    std::vector<SigId> v_in;                     // sorted unique
    std::vector<SigId> v_out;                    // sorted unique
    bool clocked = false;
    std::string instance_path;
    std::vector<int> statements;  // indices into DesignHierarchy.statements
    std::vector<int> connections; // indices into DesignHierarchy.connections
    std::vector<SigId> trigger_signals; // clock/reset kept out of v_in
    std::string file;
    int first_line = 0;
    int last_line = 0;
};

struct BlockizeOptions {
    // local names excluded from clocked-always v_in (clock edge signal is
    // always excluded structurally)
    std::vector<std::string> reset_names = {"rst", "rst_n", "reset", "resetn", "rst_i", "rst_ni"};
    std::vector<std::string> clock_names = {"clk", "clock", "clk_i"};
};

class BlockSet {
public:
    std::vector<CodeBlock> blocks;
    std::map<SigId, int> driver_index; // signal -> index into blocks

    const CodeBlock* try_find_driver(SigId s) const;
    /// The unique block with s in v_out; raises UndrivenSignal otherwise.
    const CodeBlock& find_driven_block(SigId s) const;
    const CodeBlock* find_by_id(const std::string& id) const;
};

/// Partition an elaborated design per the dataflow rules: one block per port
/// connection, one per always block, continuous assigns merged to the
/// dataflow fixpoint. Raises MultiDriver when two blocks drive one signal.
BlockSet blockize(const DesignHierarchy& design, const BlockizeOptions& opts = {});

/// Intermediate assign-block record used by the merge fixpoint.
struct AssignBlockSeed {
    std::vector<SigId> v_in;
    std::vector<SigId> v_out;
    std::set<std::pair<std::string, int>> lines;
    std::vector<int> statements;
};

/// Fixpoint of: while some block's v_out intersects another's v_in, replace
/// the pair with the union block. Result is independent of input order.
std::vector<AssignBlockSeed> merge_assign_blocks(std::vector<AssignBlockSeed> blocks);

} // namespace blockloc
