#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blockloc/ast.hpp"

namespace blockloc {

enum class MutationRule {
    BinaryOpSwap,
    UnaryNegateCondition,
    SignalReplace,
    ConstantPerturb,
    AssignmentDelete,
};

const char* mutation_rule_name(MutationRule rule);
MutationRule mutation_rule_from_name(const std::string& name);

/// One applied (or applicable) mutation. `offset`/`end_offset` index into the
/// unmutated file text; apply/revert splice exactly that range, so
/// apply-then-revert is byte-identical.
struct Mutation {
    MutationRule rule;
    std::string file;
    int line = 0;
    int col_start = 0;
    int col_end = 0;
    size_t offset = 0;
    size_t end_offset = 0;
    std::string original;
    std::string mutated;
    uint64_t seed = 0;
    std::vector<int> ground_truth_lines; // lines of `file` the splice touches
};

/// All applicable sites for a rule, in deterministic (file, offset) order.
/// Sites live inside assign statements and always blocks only, so ground
/// truth is always block-addressable.
std::vector<Mutation> enumerate_mutation_sites(const DesignAST& ast, MutationRule rule);

/// Pick one site pseudo-randomly by seed. Raises NoApplicableSite.
Mutation inject_mutation(const DesignAST& ast, MutationRule rule, uint64_t seed);

std::string apply_mutation(const std::string& text, const Mutation& m);
std::string revert_mutation(const std::string& mutated_text, const Mutation& m);

/// Apply to the matching unit of a source list, returning the new list.
std::vector<SourceUnit> apply_to_sources(const std::vector<SourceUnit>& units, const Mutation& m);

} // namespace blockloc
