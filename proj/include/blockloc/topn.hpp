#pragma once

#include <optional>
#include <string>
#include <vector>

namespace blockloc {

struct EvalRecord {
    std::string bug_id;
    std::vector<std::pair<std::string, int>> ground_truth_lines; // (file, line)
    std::vector<std::string> ranked_block_ids;
    std::optional<int> rank; // 1-based rank of the first hit, if any
};

/// Count, for each N, the records whose first ground-truth-containing block
/// sits within the top N positions.
std::vector<int> evaluate_topn(const std::vector<EvalRecord>& records,
                               const std::vector<int>& n_values);

std::string topn_table(const std::vector<EvalRecord>& records, const std::vector<int>& n_values);

} // namespace blockloc
