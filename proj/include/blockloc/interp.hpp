#pragma once

#include <map>
#include <string>
#include <vector>

#include "blockloc/elaborate.hpp"
#include "blockloc/fourstate.hpp"

namespace blockloc {

/// Per-cycle values for top-level input ports. Row k is applied at the
/// cycle-k posedge and is what sampling sees at cycle k; sequential blocks at
/// edge k read the settled cycle k-1 state. Shorter vectors hold their last
/// value.
struct Stimulus {
    std::map<std::string, std::vector<SignalValue>> inputs; // local port name -> per-cycle
    int cycles = 0;

    static SignalValue bit(int v) { return SignalValue::from_uint(static_cast<uint64_t>(v), 1); }
};

/// Cycle-accurate interpreter for the supported subset, used for fixture
/// generation and mutant simulation. Semantics pinned here (and mirrored by
/// the waveform sampling convention):
///   - registers start all-X; sync reset is ordinary logic
///   - an if/case guard evaluating to X executes no branch in a clocked block
///     (the register retains); in combinational logic the targets under that
///     guard go to X
///   - blocking assignments are visible to later statements in the same block
/// Single-clock designs only; the clock itself is implicit in the cycle loop.
class Interpreter {
public:
    Interpreter(const DesignAST& ast, const DesignHierarchy& design,
                const std::string& clock_local = "clk");

    /// Run for stim.cycles posedges; returns per-cycle sampled values of every
    /// signal (outer index = cycle).
    std::vector<std::vector<SignalValue>> run(const Stimulus& stim);

    /// Run and render a VCD dump (timescale 1ns, posedge k at time 5+10k).
    std::string run_to_vcd(const Stimulus& stim);

private:
    struct CombUnit {
        int statement = -1;  // index into design.statements, or
        int connection = -1; // index into design.connections
        std::vector<SigId> reads;
        std::vector<SigId> writes;
    };

    void build_comb_schedule();
    void settle_comb(std::vector<SignalValue>& state) const;
    void eval_always(const ElabStatement& st, const std::vector<SignalValue>& read_state,
                     std::map<SigId, SignalValue>& blocking,
                     std::map<SigId, SignalValue>& nonblocking, bool comb_x_guards) const;

    const DesignAST& ast_;
    const DesignHierarchy& design_;
    std::string clock_local_;
    SigId clock_top_ = kNoSignal;
    std::vector<CombUnit> comb_order_; // topologically sorted
    std::vector<int> seq_statements_;
};

} // namespace blockloc
