#include "blockloc/orchestrator.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "blockloc/diag.hpp"

namespace blockloc {

using nlohmann::json;

// ---------------------------------------------------------------------------
// TestReport
// ---------------------------------------------------------------------------

TestReport TestReport::from_json_text(const std::string& text, const std::string& path) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        raise(ErrCode::ManifestError, std::string("report is not valid JSON: ") + e.what(), path);
    }
    if (!doc.is_object()) raise(ErrCode::ManifestError, "report must be a JSON object", path);
    TestReport r;
    for (const char* key : {"signal", "cycle"})
        if (!doc.contains(key))
            raise(ErrCode::ManifestError, std::string("report missing field '") + key + "'",
                  path);
    r.instruction = doc.value("instruction", "");
    r.pc = doc.value("pc", "");
    r.signal = doc["signal"].get<std::string>();
    r.cycle = doc["cycle"].get<int>();
    r.expected = doc.value("expected", "");
    return r;
}

std::vector<TestReport> TestReport::list_from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrCode::IoError, "cannot open report file", path);
    std::ostringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buf.str());
    } catch (const json::exception& e) {
        raise(ErrCode::ManifestError, std::string("report is not valid JSON: ") + e.what(), path);
    }
    std::vector<TestReport> out;
    if (doc.is_array()) {
        for (const auto& entry : doc) out.push_back(from_json_text(entry.dump(), path));
    } else {
        out.push_back(from_json_text(doc.dump(), path));
    }
    return out;
}

std::string TestReport::to_json_text() const {
    json doc;
    doc["instruction"] = instruction;
    doc["pc"] = pc;
    doc["signal"] = signal;
    doc["cycle"] = cycle;
    doc["expected"] = expected;
    return doc.dump(2);
}

// ---------------------------------------------------------------------------
// prompt rendering
// ---------------------------------------------------------------------------

namespace {

const char* kSystemPrompt =
    "You are a hardware verification engineer localizing a functional bug in a "
    "SystemVerilog design. A co-simulation mismatch was observed; you inspect one "
    "code block at a time, annotated with the posedge cycle at which it computed "
    "its value. Decide whether the current block is the root cause.\n"
    "\n"
    "Tools:\n"
    "- append_block: add the current block to the suspicious queue.\n"
    "- check_signals {\"names\": [...]}: trace the listed driven signals to the "
    "blocks that compute them. Names MUST be chosen from the provided "
    "driven-signal list.\n"
    "- read_values {\"queries\": [{\"signal\": ..., \"cycle\": ...}]}: read "
    "waveform values to understand the behavior.\n"
    "- exit {\"scores\": {block id: confidence}}: finish the analysis, assigning "
    "each suspicious block a confidence between 0 and 1.\n"
    "\n"
    "Call read_values while you still need evidence; conclude a block with "
    "append_block and/or check_signals. Call exit once the root cause is in the "
    "suspicious queue.";

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

std::string render_block_source(const LocalizationContext& ctx, const CodeBlock& block) {
    std::ostringstream os;
    // group owned lines per file into contiguous runs
    std::map<std::string, std::vector<int>> per_file;
    for (const auto& [file, line] : block.lines) per_file[file].push_back(line);
    for (auto& [file, lines] : per_file) {
        std::sort(lines.begin(), lines.end());
        const SourceUnit* unit = nullptr;
        for (const auto& u : ctx.ast->sources)
            if (u.path == file) unit = &u;
        std::vector<std::string> text = unit ? split_lines(unit->text) : std::vector<std::string>{};
        size_t i = 0;
        while (i < lines.size()) {
            size_t j = i;
            while (j + 1 < lines.size() && lines[j + 1] == lines[j] + 1) ++j;
            os << file << ":" << lines[i] << "-" << lines[j] << "\n";
            for (size_t k = i; k <= j; ++k) {
                int ln = lines[k];
                os << "  " << ln << " | ";
                if (ln >= 1 && ln <= static_cast<int>(text.size()))
                    os << text[static_cast<size_t>(ln - 1)];
                os << "\n";
            }
            i = j + 1;
        }
    }
    return os.str();
}

} // namespace

PromptContext build_prompt(const TestReport& report, const LocalizationContext& ctx,
                           int node_index) {
    const ExecPath::Node& node = ctx.path->nodes[static_cast<size_t>(node_index)];
    const CodeBlock& block = ctx.blocks->blocks[static_cast<size_t>(node.block)];

    PromptContext out;
    out.system = kSystemPrompt;
    out.block_id = block.id;
    out.cycle = node.cycle;

    json driven = json::array();
    auto it = ctx.path->driven.find(node_index);
    if (it != ctx.path->driven.end()) {
        for (const auto& entry : it->second) {
            const std::string& name = ctx.design->sig(entry.signal).hier_name;
            driven.push_back({{"name", name}, {"cycle", entry.cycle}});
            out.driven.emplace_back(name, entry.cycle);
        }
    }

    std::ostringstream os;
    os << "## Test report\n";
    os << "instruction: " << report.instruction;
    if (!report.pc.empty()) os << " (pc " << report.pc << ")";
    os << "\n";
    os << "signal: " << report.signal << "\n";
    os << "cycle: " << report.cycle << "\n";
    os << "expected: " << report.expected << "\n";
    os << "\n## Current block [" << block.id << "] at cycle " << node.cycle << "\n";
    os << "kind: " << block_kind_name(block.kind) << (block.clocked ? " (sequential)" : "")
       << ", instance: " << block.instance_path << "\n";
    os << render_block_source(ctx, block);
    os << "\n## Driven signals (value sources of this block at cycle " << node.cycle << ")\n";
    os << driven.dump() << "\n";
    if (out.driven.empty())
        os << "No further tracing is possible from this block: every driver is a primary "
              "input or lies before cycle 0.\n";
    out.user = os.str();
    return out;
}

// ---------------------------------------------------------------------------
// tools
// ---------------------------------------------------------------------------

std::string tool_schemas_json() {
    json tools = json::array();
    auto fn = [](const char* name, const char* desc, json params) {
        return json{{"type", "function"},
                    {"function",
                     {{"name", name}, {"description", desc}, {"parameters", params}}}};
    };
    tools.push_back(fn("append_block", "Add the current block to the suspicious queue.",
                       json{{"type", "object"}, {"properties", json::object()}}));
    tools.push_back(fn(
        "check_signals",
        "Trace driven signals (from the provided list) to the blocks computing them.",
        json{{"type", "object"},
             {"properties",
              {{"names",
                {{"type", "array"}, {"items", {{"type", "string"}}}}}}},
             {"required", json::array({"names"})}}));
    tools.push_back(
        fn("read_values", "Read waveform values of signals at posedge cycles.",
           json{{"type", "object"},
                {"properties",
                 {{"queries",
                   {{"type", "array"},
                    {"items",
                     {{"type", "object"},
                      {"properties",
                       {{"signal", {{"type", "string"}}}, {"cycle", {{"type", "integer"}}}}},
                      {"required", json::array({"signal", "cycle"})}}}}}}},
                {"required", json::array({"queries"})}}));
    tools.push_back(fn("exit", "Finish, scoring each suspicious block in [0,1].",
                       json{{"type", "object"},
                            {"properties",
                             {{"scores", {{"type", "object"}}}}},
                            {"required", json::array({"scores"})}}));
    return tools.dump();
}

namespace {

ToolCall parse_tool_call(const RawToolCall& raw) {
    ToolCall call;
    json args = json::object();
    if (!raw.arguments_json.empty()) {
        try {
            args = json::parse(raw.arguments_json);
        } catch (const json::exception& e) {
            raise(ErrCode::BackendError, std::string("tool arguments are not valid JSON: ") +
                                             e.what());
        }
    }
    if (raw.name == "append_block") {
        call.kind = ToolCall::Kind::AppendBlock;
    } else if (raw.name == "check_signals") {
        call.kind = ToolCall::Kind::CheckSignals;
        if (!args.contains("names") || !args["names"].is_array())
            raise(ErrCode::BackendError, "check_signals needs a 'names' array");
        for (const auto& n : args["names"]) call.names.push_back(n.get<std::string>());
    } else if (raw.name == "read_values") {
        call.kind = ToolCall::Kind::ReadValues;
        if (!args.contains("queries") || !args["queries"].is_array())
            raise(ErrCode::BackendError, "read_values needs a 'queries' array");
        for (const auto& q : args["queries"]) {
            if (!q.is_object() || !q.contains("signal") || !q.contains("cycle"))
                raise(ErrCode::BackendError, "read_values query needs signal and cycle");
            call.queries.emplace_back(q["signal"].get<std::string>(), q["cycle"].get<int>());
        }
    } else if (raw.name == "exit") {
        call.kind = ToolCall::Kind::Exit;
        if (args.contains("scores")) {
            if (!args["scores"].is_object())
                raise(ErrCode::BackendError, "exit 'scores' must be an object");
            for (const auto& [key, value] : args["scores"].items())
                call.scores.emplace_back(key, value.get<double>());
        }
    } else {
        raise(ErrCode::BackendError, "unknown tool '" + raw.name + "'");
    }
    return call;
}

std::string value_line(const std::string& name, int cycle, const SignalValue& v) {
    std::ostringstream os;
    os << name << "@" << cycle << " = 0x" << v.to_hex() << " (0b" << v.to_bin() << ")";
    return os.str();
}

} // namespace

Observation handle_tool(const ToolCall& call, AgentState& state, const LocalizationContext& ctx) {
    Observation obs;
    const ExecPath& path = *ctx.path;
    const CodeBlock& current_block =
        ctx.blocks->blocks[static_cast<size_t>(path.nodes[static_cast<size_t>(state.current)].block)];

    switch (call.kind) {
    case ToolCall::Kind::AppendBlock: {
        bool duplicate = false;
        for (const auto& e : state.suspicious)
            if (e.block_id == current_block.id) duplicate = true;
        if (duplicate) {
            obs.text = "Block " + current_block.id + " is already in the suspicious queue.";
        } else {
            state.suspicious.push_back({current_block.id, 0.0, ""});
            obs.text = "Appended block " + current_block.id + " to the suspicious queue (position " +
                       std::to_string(state.suspicious.size()) + ").";
        }
        obs.concluded_node = true;
        return obs;
    }
    case ToolCall::Kind::CheckSignals: {
        auto it = path.driven.find(state.current);
        const std::vector<ExecPath::DrivenEntry> empty;
        const auto& entries = it != path.driven.end() ? it->second : empty;
        // validate atomically: an out-of-list name changes nothing
        std::vector<int> targets;
        for (const auto& name : call.names) {
            const ExecPath::DrivenEntry* found = nullptr;
            for (const auto& e : entries)
                if (ctx.design->sig(e.signal).hier_name == name) found = &e;
            if (!found) {
                obs.error = true;
                obs.text = "InvalidSignalName: '" + name +
                           "' is not in the driven-signal list of this block; choose names "
                           "from the provided list.";
                return obs;
            }
            targets.push_back(found->source_node);
        }
        std::vector<int> fresh;
        std::vector<std::string> noted;
        for (size_t i = 0; i < targets.size(); ++i) {
            int node = targets[i];
            bool pending_already =
                std::find(state.pending.begin(), state.pending.end(), node) != state.pending.end();
            bool in_fresh = std::find(fresh.begin(), fresh.end(), node) != fresh.end();
            const ExecPath::Node& n = path.nodes[static_cast<size_t>(node)];
            const std::string& id = ctx.blocks->blocks[static_cast<size_t>(n.block)].id;
            if (state.visited.count(node)) {
                noted.push_back(id + "@" + std::to_string(n.cycle) + " (already visited)");
            } else if (pending_already || in_fresh) {
                noted.push_back(id + "@" + std::to_string(n.cycle) + " (already queued)");
            } else {
                fresh.push_back(node);
                noted.push_back(id + "@" + std::to_string(n.cycle));
            }
        }
        state.pending.insert(state.pending.begin(), fresh.begin(), fresh.end());
        std::ostringstream os;
        os << "Queued " << fresh.size() << " block state(s) to inspect:";
        for (const auto& n : noted) os << "\n  " << n;
        obs.text = os.str();
        obs.concluded_node = true;
        return obs;
    }
    case ToolCall::Kind::ReadValues: {
        // validate atomically
        for (const auto& [signal, cycle] : call.queries) {
            if (cycle < 0 || cycle >= ctx.wave->cycle_count()) {
                obs.error = true;
                obs.text = "CycleOutOfRange: cycle " + std::to_string(cycle) +
                           " is outside [0, " + std::to_string(ctx.wave->cycle_count()) + ").";
                return obs;
            }
            if (!ctx.wave->has_signal(signal)) {
                obs.error = true;
                obs.text = "SignalNotRecorded: '" + signal + "' is not in the waveform.";
                return obs;
            }
        }
        std::ostringstream os;
        bool first = true;
        for (const auto& [signal, cycle] : call.queries) {
            if (!first) os << "\n";
            first = false;
            os << value_line(signal, cycle, ctx.wave->value_at(signal, cycle));
        }
        obs.text = os.str();
        return obs;
    }
    case ToolCall::Kind::Exit: {
        obs.exited = true;
        obs.exit_scores = call.scores;
        obs.text = "Analysis finished.";
        obs.concluded_node = true;
        return obs;
    }
    }
    obs.error = true;
    obs.text = "unhandled tool";
    return obs;
}

std::vector<SuspiciousEntry> rank(std::vector<SuspiciousEntry> suspicious) {
    std::stable_sort(suspicious.begin(), suspicious.end(),
                     [](const SuspiciousEntry& a, const SuspiciousEntry& b) {
                         return a.confidence > b.confidence;
                     });
    return suspicious;
}

// ---------------------------------------------------------------------------
// the loop
// ---------------------------------------------------------------------------

namespace {

long estimate_tokens(const std::string& text) {
    return static_cast<long>((text.size() + 3) / 4);
}

std::string transcript_record(const json& j) { return j.dump() + "\n"; }

} // namespace

RankedList run_localization(const LocalizationContext& ctx, const TestReport& report,
                            BackendPort& backend, const Budget& budget) {
    if (!ctx.path || ctx.path->nodes.empty())
        raise(ErrCode::ManifestError, "execution path is empty; nothing to localize");

    SigId sig = ctx.design->find_signal(report.signal);
    if (sig == kNoSignal)
        raise(ErrCode::ManifestError, "report signal '" + report.signal + "' not in design");
    const CodeBlock& root_block = ctx.blocks->find_driven_block(sig);
    const ExecPath::Node& root = ctx.path->nodes.front();
    if (ctx.blocks->blocks[static_cast<size_t>(root.block)].id != root_block.id ||
        root.cycle != report.cycle)
        raise(ErrCode::ManifestError,
              "execution path root does not match the report's (signal, cycle)");

    AgentState state;
    state.current = 0;
    state.visited.insert(0);

    std::ostringstream transcript;
    std::vector<ChatMessage> messages;
    const std::string schemas = tool_schemas_json();

    messages.push_back({"system", kSystemPrompt, "", {}});
    transcript << transcript_record({{"type", "system"}, {"content", kSystemPrompt}});

    bool exited = false;
    std::vector<std::pair<std::string, double>> exit_scores;
    int call_counter = 0;

    auto out_of_budget = [&]() {
        if (budget.max_tool_calls > 0 && state.accounting.tool_calls >= budget.max_tool_calls)
            return true;
        if (budget.max_tokens > 0 &&
            state.accounting.prompt_tokens + state.accounting.completion_tokens >=
                budget.max_tokens)
            return true;
        return false;
    };

    bool running = true;
    while (running) {
        PromptContext prompt = build_prompt(report, ctx, state.current);
        messages.push_back({"user", prompt.user, "", {}});
        transcript << transcript_record({{"type", "state"},
                                         {"block", prompt.block_id},
                                         {"cycle", prompt.cycle},
                                         {"content", prompt.user}});

        bool advance = false;
        while (!advance) {
            if (out_of_budget()) {
                state.accounting.budget_exhausted = true;
                running = false;
                break;
            }
            BackendTurn turn = backend.next_turn(messages, schemas, prompt);
            state.accounting.turns += 1;
            long ptok = turn.prompt_tokens;
            if (ptok == 0)
                for (const auto& m : messages) ptok += estimate_tokens(m.content);
            long ctok = turn.completion_tokens;
            if (ctok == 0) {
                ctok = estimate_tokens(turn.content);
                for (const auto& c : turn.calls) ctok += estimate_tokens(c.arguments_json);
            }
            state.accounting.prompt_tokens += ptok;
            state.accounting.completion_tokens += ctok;

            json calls_json = json::array();
            for (const auto& c : turn.calls)
                calls_json.push_back({{"name", c.name}, {"arguments", c.arguments_json}});
            transcript << transcript_record(
                {{"type", "assistant"}, {"content", turn.content}, {"tool_calls", calls_json}});

            ChatMessage assistant{"assistant", turn.content, "", turn.calls};
            messages.push_back(assistant);

            if (turn.calls.empty()) {
                advance = true;
                break;
            }

            bool concluded = false;
            for (size_t ci = 0; ci < turn.calls.size() && running; ++ci) {
                if (out_of_budget()) {
                    state.accounting.budget_exhausted = true;
                    running = false;
                    break;
                }
                const RawToolCall& raw = turn.calls[ci];
                state.accounting.tool_calls += 1;
                Observation obs;
                try {
                    ToolCall call = parse_tool_call(raw);
                    size_t before = state.suspicious.size();
                    obs = handle_tool(call, state, ctx);
                    if (state.suspicious.size() > before)
                        state.suspicious.back().rationale = turn.content;
                } catch (const Error& e) {
                    if (e.code() != ErrCode::BackendError) throw;
                    obs.error = true;
                    obs.text = std::string("InvalidToolCall: ") + e.detail();
                }
                std::string call_id =
                    raw.id.empty() ? "call_" + std::to_string(call_counter) : raw.id;
                ++call_counter;
                messages.push_back({"tool", obs.text, call_id, {}});
                transcript << transcript_record({{"type", "tool"},
                                                 {"call", raw.name},
                                                 {"observation", obs.text},
                                                 {"error", obs.error}});
                if (obs.error) {
                    state.retries_this_state += 1;
                    if (state.retries_this_state >= 3) {
                        state.accounting.flags.push_back(
                            "retry limit reached at block " + prompt.block_id + "@" +
                            std::to_string(prompt.cycle) + "; advancing");
                        advance = true;
                    }
                    continue;
                }
                if (obs.exited) {
                    exited = true;
                    exit_scores = obs.exit_scores;
                    running = false;
                    break;
                }
                if (obs.concluded_node) concluded = true;
            }
            if (concluded) advance = true;
        }

        if (!running) break;
        // advance to the next pending unvisited node
        int next = -1;
        while (!state.pending.empty()) {
            int candidate = state.pending.front();
            state.pending.pop_front();
            if (!state.visited.count(candidate)) {
                next = candidate;
                break;
            }
        }
        if (next < 0) break; // frontier empty: finalize without exit
        state.current = next;
        state.visited.insert(next);
        state.retries_this_state = 0;
    }

    // ---- finalize ----
    RankedList result;
    state.accounting.exited = exited;
    for (size_t i = 0; i < state.suspicious.size(); ++i) {
        SuspiciousEntry entry = state.suspicious[i];
        double fallback = 1.0 / (1.0 + static_cast<double>(i));
        if (exited) {
            const std::pair<std::string, double>* found = nullptr;
            for (const auto& kv : exit_scores)
                if (kv.first == entry.block_id) found = &kv;
            if (found) {
                double c = found->second;
                if (c < 0.0 || c > 1.0) {
                    state.accounting.flags.push_back("confidence for " + entry.block_id +
                                                     " clamped into [0,1]");
                    c = std::min(1.0, std::max(0.0, c));
                }
                entry.confidence = c;
            } else {
                entry.confidence = fallback;
                state.accounting.flags.push_back("exit omitted appended block " + entry.block_id +
                                                 "; fallback score assigned");
            }
        } else {
            entry.confidence = fallback;
        }
        result.entries.push_back(std::move(entry));
    }
    if (exited) {
        for (const auto& [block_id, score] : exit_scores) {
            bool appended = false;
            for (const auto& e : state.suspicious)
                if (e.block_id == block_id) appended = true;
            if (!appended)
                state.accounting.flags.push_back("exit scored block " + block_id +
                                                 " that was never appended; ignored");
        }
    }
    result.entries = rank(std::move(result.entries));
    result.accounting = state.accounting;

    json final_record = {{"type", "final"},
                         {"exited", exited},
                         {"entries", json::array()},
                         {"tool_calls", state.accounting.tool_calls},
                         {"turns", state.accounting.turns},
                         {"prompt_tokens", state.accounting.prompt_tokens},
                         {"completion_tokens", state.accounting.completion_tokens},
                         {"budget_exhausted", state.accounting.budget_exhausted},
                         {"flags", state.accounting.flags}};
    for (const auto& e : result.entries)
        final_record["entries"].push_back({{"block", e.block_id}, {"confidence", e.confidence}});
    transcript << transcript_record(final_record);
    result.transcript = transcript.str();
    return result;
}

} // namespace blockloc
