#pragma once

#include <deque>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "blockloc/blocks.hpp"
#include "blockloc/slicer.hpp"
#include "blockloc/waveform.hpp"

namespace blockloc {

/// Co-simulation style failing-instruction record (I, sig, t, E).
struct TestReport {
    std::string instruction; // text mnemonic
    std::string pc;          // program counter, hex text
    std::string signal;      // mismatching signal, hierarchical name
    int cycle = 0;           // posedge cycle of the mismatch
    std::string expected;    // natural-language expected behavior

    static TestReport from_json_text(const std::string& text,
                                     const std::string& path_for_errors = "<report>");
    static std::vector<TestReport> list_from_file(const std::string& path);
    std::string to_json_text() const;
};

struct ToolCall {
    enum class Kind { AppendBlock, CheckSignals, ReadValues, Exit };
    Kind kind = Kind::AppendBlock;
    std::vector<std::string> names;                        // CheckSignals
    std::vector<std::pair<std::string, int>> queries;      // ReadValues
    std::vector<std::pair<std::string, double>> scores;    // Exit (ordered)
};

struct Budget {
    int max_tool_calls = 60;
    long max_tokens = 0; // 0 = unlimited
};

struct SuspiciousEntry {
    std::string block_id;
    double confidence = 0.0;
    std::string rationale;
};

struct RunAccounting {
    int tool_calls = 0;
    int turns = 0;
    long prompt_tokens = 0;
    long completion_tokens = 0;
    bool exited = false;
    bool budget_exhausted = false;
    std::vector<std::string> flags;
};

struct RankedList {
    std::vector<SuspiciousEntry> entries; // confidence descending
    RunAccounting accounting;
    std::string transcript; // JSON lines, one record per turn
};

/// Rendered prompt plus a structured mirror used by deterministic backends.
struct PromptContext {
    std::string system;
    std::string user;
    std::string block_id;
    int cycle = 0;
    std::vector<std::pair<std::string, int>> driven; // (hier name, source cycle)
};

struct RawToolCall {
    std::string id;
    std::string name;           // append_block | check_signals | read_values | exit
    std::string arguments_json; // JSON object text
};

struct ChatMessage {
    std::string role; // system | user | assistant | tool
    std::string content;
    std::string tool_call_id;           // role == tool
    std::vector<RawToolCall> tool_calls; // role == assistant
};

struct BackendTurn {
    std::string content;
    std::vector<RawToolCall> calls;
    long prompt_tokens = 0;     // 0 = let the orchestrator estimate
    long completion_tokens = 0;
};

/// Chat-style request/response port: given the conversation so far plus the
/// declared tool schemas, produce the next assistant turn. Deterministic
/// backends may use `context` instead of re-parsing the rendered prompt.
class BackendPort {
public:
    virtual ~BackendPort() = default;
    virtual BackendTurn next_turn(const std::vector<ChatMessage>& messages,
                                  const std::string& tool_schemas_json,
                                  const PromptContext& context) = 0;
    /// Whether one instance may serve concurrent localization runs.
    virtual bool shareable() const { return false; }
};

/// Everything a localization run reads; all of it immutable during the run.
struct LocalizationContext {
    const DesignAST* ast = nullptr;
    const DesignHierarchy* design = nullptr;
    const BlockSet* blocks = nullptr;
    const ExecPath* path = nullptr;
    const Waveform* wave = nullptr;
};

struct AgentState {
    int current = -1; // node index into path->nodes
    std::deque<int> pending;
    std::set<int> visited;
    std::vector<SuspiciousEntry> suspicious;
    int retries_this_state = 0;
    RunAccounting accounting;
};

struct Observation {
    std::string text;
    bool error = false;
    bool concluded_node = false; // AppendBlock / CheckSignals end the visit
    bool exited = false;
    std::vector<std::pair<std::string, double>> exit_scores;
};

/// Render the prompt for one (block, cycle) state: role preamble, the test
/// report, the block source with a file/line header, the driven-signal JSON
/// array, and the tool instructions. Byte-stable for identical inputs.
PromptContext build_prompt(const TestReport& report, const LocalizationContext& ctx,
                           int node_index);

/// Execute one tool call against the agent state; returns the textual
/// observation for the next turn. Invalid arguments produce an error
/// observation and leave the state unchanged.
Observation handle_tool(const ToolCall& call, AgentState& state, const LocalizationContext& ctx);

/// Stable sort by confidence descending; ties keep append order.
std::vector<SuspiciousEntry> rank(std::vector<SuspiciousEntry> suspicious);

std::string tool_schemas_json();

/// The reasoning loop: visit path nodes starting at the root, mediate tool
/// calls, and produce the ranked list. Runs that end without an exit call
/// fall back to confidence = 1/(1 + append index).
RankedList run_localization(const LocalizationContext& ctx, const TestReport& report,
                            BackendPort& backend, const Budget& budget = {});

} // namespace blockloc
