#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "blockloc/fourstate.hpp"

namespace blockloc {

/// Per-posedge-cycle view over a VCD dump. Cycle t of signal s is s's value
/// at the simulation time of the (t+1)-th rising edge of the clock, after all
/// changes at that timestamp have been applied (post-update sampling). An
/// off-by-one here corrupts every slice; tests pin this convention against a
/// naive replayer.
class Waveform {
public:
    struct Change {
        uint64_t time;
        SignalValue value;
    };

    int cycle_count() const { return static_cast<int>(cycle_times_.size()); }
    const std::vector<uint64_t>& cycle_times() const { return cycle_times_; }

    bool has_signal(const std::string& hier_name) const;
    int signal_width(const std::string& hier_name) const;

    /// Value of `hier_name` at posedge cycle t. X/Z bits are preserved.
    SignalValue value_at(const std::string& hier_name, int t) const;

    /// Value at an arbitrary simulation time (last change at or before it).
    SignalValue value_at_time(const std::string& hier_name, uint64_t time) const;

    /// Index of the last posedge at or before `time`; -1 before the first.
    int cycle_of_time(uint64_t time) const;

    std::vector<std::string> signal_names() const; // sorted

    static Waveform load_vcd(const std::string& path, const std::string& clock);
    static Waveform parse_vcd(const std::string& text, const std::string& clock,
                              const std::string& path_for_errors = "<vcd>");

private:
    struct Var {
        int width = 1;
        std::vector<Change> changes; // time-ascending
    };

    const Var& require_var(const std::string& hier_name) const;

    std::string clock_;
    std::vector<uint64_t> cycle_times_;
    std::vector<Var> vars_;
    std::unordered_map<std::string, int> by_name_; // aliases share a Var
};

} // namespace blockloc
