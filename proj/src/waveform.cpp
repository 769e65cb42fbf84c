#include "blockloc/waveform.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "blockloc/diag.hpp"

namespace blockloc {

namespace {

struct VcdLexer {
    const std::string& text;
    size_t pos = 0;
    int line = 1;

    bool done() const { return pos >= text.size(); }

    std::string next_token() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
            if (text[pos] == '\n') ++line;
            ++pos;
        }
        size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        return text.substr(start, pos - start);
    }
};

} // namespace

bool Waveform::has_signal(const std::string& hier_name) const {
    return by_name_.count(hier_name) > 0;
}

int Waveform::signal_width(const std::string& hier_name) const {
    return require_var(hier_name).width;
}

const Waveform::Var& Waveform::require_var(const std::string& hier_name) const {
    auto it = by_name_.find(hier_name);
    if (it == by_name_.end())
        raise(ErrCode::SignalNotRecorded, "'" + hier_name + "' is not recorded in the waveform");
    return vars_[static_cast<size_t>(it->second)];
}

SignalValue Waveform::value_at_time(const std::string& hier_name, uint64_t time) const {
    const Var& var = require_var(hier_name);
    // last change at or before `time`
    auto it = std::upper_bound(var.changes.begin(), var.changes.end(), time,
                               [](uint64_t t, const Change& c) { return t < c.time; });
    if (it == var.changes.begin()) return SignalValue(var.width, Bit::X);
    return std::prev(it)->value;
}

SignalValue Waveform::value_at(const std::string& hier_name, int t) const {
    if (t < 0 || t >= cycle_count())
        raise(ErrCode::CycleOutOfRange,
              "cycle " + std::to_string(t) + " outside [0, " + std::to_string(cycle_count()) +
                  ")");
    return value_at_time(hier_name, cycle_times_[static_cast<size_t>(t)]);
}

int Waveform::cycle_of_time(uint64_t time) const {
    auto it = std::upper_bound(cycle_times_.begin(), cycle_times_.end(), time);
    return static_cast<int>(it - cycle_times_.begin()) - 1;
}

std::vector<std::string> Waveform::signal_names() const {
    std::vector<std::string> out;
    out.reserve(by_name_.size());
    for (const auto& [name, idx] : by_name_) out.push_back(name);
    std::sort(out.begin(), out.end());
    return out;
}

Waveform Waveform::load_vcd(const std::string& path, const std::string& clock) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrCode::IoError, "cannot open VCD file", path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_vcd(buf.str(), clock, path);
}

Waveform Waveform::parse_vcd(const std::string& text, const std::string& clock,
                             const std::string& path) {
    Waveform wf;
    wf.clock_ = clock;
    VcdLexer lex{text};

    std::vector<std::string> scope_stack;
    std::unordered_map<std::string, int> by_code;

    auto skip_to_end = [&](const std::string& directive) {
        for (;;) {
            std::string tok = lex.next_token();
            if (tok.empty() && lex.done())
                raise(ErrCode::MalformedVcd, directive + " not closed by $end", path, lex.line);
            if (tok == "$end") return;
        }
    };

    // --- header ---
    bool definitions_done = false;
    while (!definitions_done) {
        int line = lex.line;
        std::string tok = lex.next_token();
        if (tok.empty() && lex.done())
            raise(ErrCode::MalformedVcd, "dump section missing", path, line);
        if (tok == "$date" || tok == "$version" || tok == "$comment" || tok == "$timescale") {
            skip_to_end(tok);
        } else if (tok == "$scope") {
            std::string kind = lex.next_token();
            std::string name = lex.next_token();
            (void)kind;
            if (name.empty()) raise(ErrCode::MalformedVcd, "$scope missing name", path, line);
            scope_stack.push_back(name);
            skip_to_end("$scope");
        } else if (tok == "$upscope") {
            if (scope_stack.empty())
                raise(ErrCode::MalformedVcd, "$upscope without open scope", path, line);
            scope_stack.pop_back();
            skip_to_end("$upscope");
        } else if (tok == "$var") {
            std::string type = lex.next_token();
            std::string width_s = lex.next_token();
            std::string code = lex.next_token();
            std::string name = lex.next_token();
            if (type == "real")
                raise(ErrCode::MalformedVcd, "real-valued variables are not supported", path,
                      line);
            // nets may carry a trailing range token: "x [7:0]"
            std::string maybe_range = lex.next_token();
            if (maybe_range != "$end") {
                if (lex.next_token() != "$end")
                    raise(ErrCode::MalformedVcd, "$var not closed by $end", path, line);
            }
            int width = 0;
            for (char c : width_s) {
                if (!std::isdigit(static_cast<unsigned char>(c)))
                    raise(ErrCode::MalformedVcd, "bad $var width", path, line);
                width = width * 10 + (c - '0');
            }
            if (width <= 0) raise(ErrCode::MalformedVcd, "bad $var width", path, line);
            std::string full;
            for (const auto& s : scope_stack) full += s + ".";
            full += name;
            int idx;
            auto it = by_code.find(code);
            if (it == by_code.end()) {
                idx = static_cast<int>(wf.vars_.size());
                wf.vars_.push_back(Var{width, {}});
                by_code.emplace(code, idx);
            } else {
                idx = it->second; // alias
            }
            wf.by_name_[full] = idx;
        } else if (tok == "$enddefinitions") {
            skip_to_end(tok);
            definitions_done = true;
        } else {
            raise(ErrCode::MalformedVcd, "unexpected token '" + tok + "' in header", path, line);
        }
    }

    // --- value changes ---
    uint64_t now = 0;
    auto record = [&](const std::string& code, SignalValue value, int line) {
        auto it = by_code.find(code);
        if (it == by_code.end())
            raise(ErrCode::MalformedVcd, "value change for undeclared id '" + code + "'", path,
                  line);
        Var& var = wf.vars_[static_cast<size_t>(it->second)];
        SignalValue sized = sv_resize(value, var.width);
        // VCD left-extends x/z
        if (value.width() < var.width && value.width() > 0) {
            Bit top = value.bit(value.width() - 1);
            if (top == Bit::X || top == Bit::Z)
                for (int i = value.width(); i < var.width; ++i) sized.set_bit(i, top);
        }
        if (!var.changes.empty() && var.changes.back().time == now)
            var.changes.back().value = sized;
        else
            var.changes.push_back({now, sized});
    };

    for (;;) {
        int line = lex.line;
        std::string tok = lex.next_token();
        if (tok.empty() && lex.done()) break;
        if (tok.empty()) continue;
        char c0 = tok[0];
        if (tok == "$dumpvars" || tok == "$dumpall" || tok == "$dumpon" || tok == "$dumpoff") {
            continue; // value changes follow until $end
        } else if (tok == "$end") {
            continue;
        } else if (tok == "$comment") {
            skip_to_end(tok);
        } else if (c0 == '#') {
            uint64_t t = 0;
            if (tok.size() == 1) raise(ErrCode::MalformedVcd, "empty timestamp", path, line);
            for (size_t i = 1; i < tok.size(); ++i) {
                if (!std::isdigit(static_cast<unsigned char>(tok[i])))
                    raise(ErrCode::MalformedVcd, "bad timestamp '" + tok + "'", path, line);
                t = t * 10 + static_cast<uint64_t>(tok[i] - '0');
            }
            if (t < now)
                raise(ErrCode::MalformedVcd, "timestamps must not decrease", path, line);
            now = t;
        } else if (c0 == '0' || c0 == '1' || c0 == 'x' || c0 == 'X' || c0 == 'z' || c0 == 'Z') {
            if (tok.size() < 2)
                raise(ErrCode::MalformedVcd, "scalar change missing id", path, line);
            SignalValue v(1);
            v.set_bit(0, bit_from_char(c0));
            record(tok.substr(1), v, line);
        } else if (c0 == 'b' || c0 == 'B') {
            std::string bits = tok.substr(1);
            std::string code = lex.next_token();
            if (bits.empty() || code.empty())
                raise(ErrCode::MalformedVcd, "vector change missing bits or id", path, line);
            record(code, SignalValue::from_bin(bits, static_cast<int>(bits.size())), line);
        } else if (c0 == 'r' || c0 == 'R') {
            raise(ErrCode::MalformedVcd, "real-valued change is not supported", path, line);
        } else {
            raise(ErrCode::MalformedVcd, "unexpected token '" + tok + "'", path, line);
        }
    }

    // --- posedge cycle extraction: 0 -> 1 transitions of the clock ---
    auto cit = wf.by_name_.find(clock);
    if (cit == wf.by_name_.end())
        raise(ErrCode::ClockNotFound, "clock '" + clock + "' not found in VCD", path);
    const Var& clk = wf.vars_[static_cast<size_t>(cit->second)];
    Bit prev = Bit::X;
    for (const Change& ch : clk.changes) {
        Bit b = ch.value.width() >= 1 ? ch.value.bit(0) : Bit::X;
        if (prev == Bit::Zero && b == Bit::One) wf.cycle_times_.push_back(ch.time);
        prev = b;
    }
    return wf;
}

} // namespace blockloc
