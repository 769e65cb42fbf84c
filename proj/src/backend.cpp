#include "blockloc/backend.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include "blockloc/diag.hpp"

namespace blockloc {

using nlohmann::json;

// ---------------------------------------------------------------------------
// ScriptedBackend
// ---------------------------------------------------------------------------

ScriptedBackend ScriptedBackend::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrCode::IoError, "cannot open decision script", path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str(), path);
}

ScriptedBackend ScriptedBackend::from_json_text(const std::string& text,
                                                const std::string& path) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        raise(ErrCode::BackendError, std::string("decision script is not valid JSON: ") + e.what(),
              path);
    }
    const json* entries = nullptr;
    if (doc.is_array())
        entries = &doc;
    else if (doc.is_object() && doc.contains("entries"))
        entries = &doc["entries"];
    else
        raise(ErrCode::BackendError, "decision script must be an array or {entries:[...]}", path);

    ScriptedBackend backend;
    for (const auto& e : *entries) {
        Entry entry;
        entry.expect_block = e.value("expect_block", "");
        entry.content = e.value("content", "");
        if (e.contains("tool_calls")) {
            for (const auto& c : e["tool_calls"]) {
                RawToolCall raw;
                raw.name = c.value("tool", c.value("name", ""));
                json args = c;
                args.erase("tool");
                args.erase("name");
                raw.arguments_json = args.dump();
                entry.calls.push_back(std::move(raw));
            }
        }
        backend.entries_.push_back(std::move(entry));
    }
    return backend;
}

BackendTurn ScriptedBackend::next_turn(const std::vector<ChatMessage>&, const std::string&,
                                       const PromptContext& context) {
    if (next_ >= entries_.size())
        raise(ErrCode::BackendError, "decision script exhausted after " +
                                         std::to_string(entries_.size()) + " turns");
    const Entry& entry = entries_[next_++];
    if (!entry.expect_block.empty() && entry.expect_block != context.block_id)
        raise(ErrCode::BackendError, "decision script expects block '" + entry.expect_block +
                                         "' but '" + context.block_id + "' was presented");
    BackendTurn turn;
    turn.content = entry.content;
    turn.calls = entry.calls;
    return turn;
}

// ---------------------------------------------------------------------------
// MismatchPolicyBackend
// ---------------------------------------------------------------------------

MismatchPolicyBackend::MismatchPolicyBackend(Waveform golden) : golden_(std::move(golden)) {}

namespace {

RawToolCall make_call(const std::string& name, const json& args) {
    RawToolCall raw;
    raw.name = name;
    raw.arguments_json = args.dump();
    return raw;
}

// parse "name@cycle = 0x... (0b<bits>)" lines from a read_values observation
std::map<std::pair<std::string, int>, std::string> parse_value_lines(const std::string& text) {
    std::map<std::pair<std::string, int>, std::string> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        size_t at = line.rfind("@");
        size_t eq = line.find(" = ");
        size_t ob = line.find("(0b");
        size_t close = line.rfind(')');
        if (at == std::string::npos || eq == std::string::npos || ob == std::string::npos ||
            close == std::string::npos || at > eq || ob > close)
            continue;
        std::string name = line.substr(0, at);
        int cycle = std::atoi(line.substr(at + 1, eq - at - 1).c_str());
        std::string bits = line.substr(ob + 3, close - ob - 3);
        out[{name, cycle}] = bits;
    }
    return out;
}

} // namespace

BackendTurn MismatchPolicyBackend::next_turn(const std::vector<ChatMessage>& messages,
                                             const std::string&, const PromptContext& context) {
    BackendTurn turn;
    std::string key = context.block_id + "@" + std::to_string(context.cycle);
    if (key != last_state_key_) {
        last_state_key_ = key;
        awaiting_values_ = false;
        pending_queries_.clear();
    }

    if (context.driven.empty()) {
        // nothing left to trace: the wrongness originates here or at primary inputs
        turn.content = "No traceable drivers remain; flagging this block.";
        turn.calls.push_back(make_call("append_block", json::object()));
        return turn;
    }

    if (!awaiting_values_) {
        json queries = json::array();
        for (const auto& [name, cycle] : context.driven)
            queries.push_back({{"signal", name}, {"cycle", cycle}});
        pending_queries_ = context.driven;
        awaiting_values_ = true;
        turn.content = "Reading driven-signal values to compare against expected behavior.";
        turn.calls.push_back(make_call("read_values", json{{"queries", queries}}));
        return turn;
    }

    // the observation for our read_values is the last tool message
    std::map<std::pair<std::string, int>, std::string> seen;
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->role == "tool") {
            seen = parse_value_lines(it->content);
            break;
        }
    }
    awaiting_values_ = false;

    std::vector<std::string> mismatching;
    for (const auto& [name, cycle] : pending_queries_) {
        auto it = seen.find({name, cycle});
        if (it == seen.end())
            raise(ErrCode::BackendError, "policy backend missed a value for " + name);
        std::string golden_bits = golden_.value_at(name, cycle).to_bin();
        if (golden_bits != it->second) mismatching.push_back(name);
    }

    if (mismatching.empty()) {
        turn.content =
            "Every driven input matches the golden run, yet this block's output is wrong; "
            "the defect is inside this block.";
        turn.calls.push_back(make_call("append_block", json::object()));
        return turn;
    }
    turn.content = "Driven signals deviate from the golden run; tracing them backwards.";
    turn.calls.push_back(make_call("check_signals", json{{"names", mismatching}}));
    return turn;
}

// ---------------------------------------------------------------------------
// RemoteBackend
// ---------------------------------------------------------------------------

BackendProfile BackendProfile::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrCode::IoError, "cannot open backend profile", path);
    std::ostringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buf.str());
    } catch (const json::exception& e) {
        raise(ErrCode::BackendError, std::string("backend profile is not valid JSON: ") + e.what(),
              path);
    }
    BackendProfile p;
    if (!doc.contains("base_url") || !doc.contains("model"))
        raise(ErrCode::BackendError, "backend profile needs base_url and model", path);
    p.base_url = doc["base_url"].get<std::string>();
    p.model = doc["model"].get<std::string>();
    p.path = doc.value("path", p.path);
    p.api_key_env = doc.value("api_key_env", p.api_key_env);
    p.max_retries = doc.value("max_retries", p.max_retries);
    p.timeout_ms = doc.value("timeout_ms", p.timeout_ms);
    return p;
}

RemoteBackend::RemoteBackend(BackendProfile profile) : profile_(std::move(profile)) {
    const char* key = std::getenv(profile_.api_key_env.c_str());
    api_key_ = key ? key : "";
}

BackendTurn RemoteBackend::next_turn(const std::vector<ChatMessage>& messages,
                                     const std::string& tool_schemas, const PromptContext&) {
    json body;
    body["model"] = profile_.model;
    body["tools"] = json::parse(tool_schemas);
    body["tool_choice"] = "auto";
    json msgs = json::array();
    for (const auto& m : messages) {
        json jm;
        jm["role"] = m.role;
        jm["content"] = m.content;
        if (m.role == "tool") jm["tool_call_id"] = m.tool_call_id;
        if (m.role == "assistant" && !m.tool_calls.empty()) {
            json calls = json::array();
            for (const auto& c : m.tool_calls)
                calls.push_back({{"id", c.id.empty() ? "call_0" : c.id},
                                 {"type", "function"},
                                 {"function", {{"name", c.name}, {"arguments", c.arguments_json}}}});
            jm["tool_calls"] = calls;
        }
        msgs.push_back(std::move(jm));
    }
    body["messages"] = std::move(msgs);
    const std::string payload = body.dump();

    httplib::Client client(profile_.base_url);
    client.set_connection_timeout(0, profile_.timeout_ms * 1000LL);
    client.set_read_timeout(profile_.timeout_ms / 1000, (profile_.timeout_ms % 1000) * 1000);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    std::string last_error;
    for (int attempt = 0; attempt <= profile_.max_retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(200 * attempt));
        auto res = client.Post(profile_.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            raise(ErrCode::BackendError, "backend returned status " + std::to_string(res->status) +
                                             ": " + res->body);
        json doc;
        try {
            doc = json::parse(res->body);
        } catch (const json::exception& e) {
            raise(ErrCode::BackendError, std::string("backend response is not JSON: ") + e.what());
        }
        if (!doc.contains("choices") || doc["choices"].empty())
            raise(ErrCode::BackendError, "backend response has no choices");
        const json& msg = doc["choices"][0]["message"];
        BackendTurn turn;
        if (msg.contains("content") && msg["content"].is_string())
            turn.content = msg["content"].get<std::string>();
        if (msg.contains("tool_calls")) {
            for (const auto& c : msg["tool_calls"]) {
                RawToolCall raw;
                raw.id = c.value("id", "");
                raw.name = c["function"].value("name", "");
                raw.arguments_json = c["function"].value("arguments", "{}");
                turn.calls.push_back(std::move(raw));
            }
        }
        if (doc.contains("usage")) {
            turn.prompt_tokens = doc["usage"].value("prompt_tokens", 0);
            turn.completion_tokens = doc["usage"].value("completion_tokens", 0);
        }
        return turn;
    }
    raise(ErrCode::BackendError, "backend unreachable after " +
                                     std::to_string(profile_.max_retries + 1) + " attempts (" +
                                     last_error + ")");
}

// ---------------------------------------------------------------------------

std::unique_ptr<BackendPort> make_backend(const std::string& spec,
                                          const std::string& clock_hint) {
    size_t colon = spec.find(':');
    if (colon == std::string::npos)
        raise(ErrCode::BackendError,
              "backend spec must be scripted:<file>, remote:<profile> or policy:<golden.vcd>");
    std::string kind = spec.substr(0, colon);
    std::string arg = spec.substr(colon + 1);
    if (kind == "scripted")
        return std::make_unique<ScriptedBackend>(ScriptedBackend::from_file(arg));
    if (kind == "remote")
        return std::make_unique<RemoteBackend>(BackendProfile::from_file(arg));
    if (kind == "policy") {
        size_t comma = arg.find(',');
        std::string vcd = comma == std::string::npos ? arg : arg.substr(0, comma);
        std::string clock = comma == std::string::npos ? clock_hint : arg.substr(comma + 1);
        // the clock name only drives cycle extraction; values are queried by name
        Waveform golden = Waveform::load_vcd(vcd, clock);
        return std::make_unique<MismatchPolicyBackend>(std::move(golden));
    }
    raise(ErrCode::BackendError, "unknown backend kind '" + kind + "'");
}

} // namespace blockloc
