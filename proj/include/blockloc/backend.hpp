#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "blockloc/orchestrator.hpp"
#include "blockloc/waveform.hpp"

namespace blockloc {

/// Replays a recorded decision file: an ordered list of
/// {expect_block, tool_calls:[{tool, ...args}]} entries, one per assistant
/// turn. A mismatch between expect_block and the presented block raises
/// BackendError (a harness failure, not a model decision).
class ScriptedBackend : public BackendPort {
public:
    static ScriptedBackend from_file(const std::string& path);
    static ScriptedBackend from_json_text(const std::string& text,
                                          const std::string& path_for_errors = "<script>");

    BackendTurn next_turn(const std::vector<ChatMessage>& messages,
                          const std::string& tool_schemas_json,
                          const PromptContext& context) override;

private:
    struct Entry {
        std::string expect_block; // empty = no check
        std::string content;
        std::vector<RawToolCall> calls;
    };
    std::vector<Entry> entries_;
    size_t next_ = 0;
};

/// Deterministic stand-in strategy: read the driven-signal values through the
/// tool protocol, compare each against a golden (unmutated) waveform, follow
/// every mismatching signal, and append the block when its output is wrong
/// while all of its driven inputs match the golden run.
class MismatchPolicyBackend : public BackendPort {
public:
    MismatchPolicyBackend(Waveform golden);

    BackendTurn next_turn(const std::vector<ChatMessage>& messages,
                          const std::string& tool_schemas_json,
                          const PromptContext& context) override;

private:
    Waveform golden_;
    std::string last_state_key_;
    bool awaiting_values_ = false;
    std::vector<std::pair<std::string, int>> pending_queries_;
};

struct BackendProfile {
    std::string base_url;               // e.g. https://host:443
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string api_key_env = "BLOCKLOC_API_KEY";
    int max_retries = 3;
    int timeout_ms = 60000;

    static BackendProfile from_file(const std::string& path);
};

/// HTTP JSON chat-completions-with-tools client.
class RemoteBackend : public BackendPort {
public:
    explicit RemoteBackend(BackendProfile profile);

    BackendTurn next_turn(const std::vector<ChatMessage>& messages,
                          const std::string& tool_schemas_json,
                          const PromptContext& context) override;

private:
    BackendProfile profile_;
    std::string api_key_;
};

/// Parse a --backend spec: scripted:<file> | remote:<profile> |
/// policy:<golden.vcd>[,<clock hier name>]. The returned backend is per-run
/// unless shareable(). `clock_hint` supplies the clock for policy waveform
/// loading when the spec does not name one.
std::unique_ptr<BackendPort> make_backend(const std::string& spec,
                                          const std::string& clock_hint = "clk");

} // namespace blockloc
