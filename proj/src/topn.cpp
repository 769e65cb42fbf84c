#include "blockloc/topn.hpp"

#include <sstream>

namespace blockloc {

std::vector<int> evaluate_topn(const std::vector<EvalRecord>& records,
                               const std::vector<int>& n_values) {
    std::vector<int> out(n_values.size(), 0);
    for (const auto& r : records) {
        if (!r.rank.has_value()) continue;
        for (size_t i = 0; i < n_values.size(); ++i)
            if (*r.rank <= n_values[i]) out[i] += 1;
    }
    return out;
}

std::string topn_table(const std::vector<EvalRecord>& records, const std::vector<int>& n_values) {
    std::vector<int> counts = evaluate_topn(records, n_values);
    std::ostringstream os;
    os << "bugs: " << records.size() << "\n";
    for (size_t i = 0; i < n_values.size(); ++i)
        os << "Top-" << n_values[i] << ": " << counts[i] << "\n";
    return os.str();
}

} // namespace blockloc
