#pragma once

#include <functional>
#include <map>
#include <string>

#include "blockloc/ast.hpp"
#include "blockloc/elaborate.hpp"
#include "blockloc/fourstate.hpp"
#include "blockloc/waveform.hpp"

namespace blockloc {

/// Resolves a local signal name to its current value.
using ValueLookup = std::function<SignalValue(const std::string&)>;

struct EvalEnv {
    ValueLookup lookup;
    const std::map<std::string, int64_t>* params = nullptr;
    std::string file; // diagnostics
};

/// Evaluate with 4-state semantics; any X/Z operand reaching a decision
/// yields X. `ctx_width` sizes fill literals ('0/'1); pass 0 when no
/// assignment context applies.
SignalValue eval_expr(const Expr& e, const EvalEnv& env, int ctx_width = 0);

/// Truth of a guard chain entry; Bit::X when undecidable.
Bit eval_guard(const Guard& g, const EvalEnv& env);

/// Spec-surface wrapper: evaluate an expression over waveform values at
/// posedge cycle t, resolving local names inside `instance_path`.
SignalValue eval_expr_at(const Expr& e, const DesignHierarchy& design,
                         const std::string& instance_path, const Waveform& w, int t);

} // namespace blockloc
