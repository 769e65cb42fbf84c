#include "blockloc/coverage.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "blockloc/diag.hpp"
#include "blockloc/expreval.hpp"

namespace blockloc {

CoverageSource CoverageSource::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrCode::IoError, "cannot open coverage file", path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str(), path);
}

CoverageSource CoverageSource::from_json_text(const std::string& text, const std::string& path) {
    CoverageSource src;
    src.mode = Mode::ExternalFile;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        raise(ErrCode::MissingCoverage, std::string("coverage file is not valid JSON: ") +
                                            e.what(),
              path);
    }
    if (!doc.is_array())
        raise(ErrCode::MissingCoverage, "coverage file must be a JSON array", path);
    for (const auto& entry : doc) {
        if (!entry.contains("file") || !entry.contains("line") || !entry.contains("cycles"))
            raise(ErrCode::MissingCoverage, "coverage entry needs file/line/cycles", path);
        auto key = std::make_pair(entry["file"].get<std::string>(), entry["line"].get<int>());
        auto& cycles = src.external[key];
        for (const auto& c : entry["cycles"]) cycles.insert(c.get<int>());
    }
    return src;
}

void CoverageSource::validate_against(const BlockSet& blocks) const {
    for (const auto& [key, cycles] : external) {
        bool owned = false;
        for (const auto& b : blocks.blocks)
            if (b.lines.count(key)) {
                owned = true;
                break;
            }
        if (!owned)
            raise(ErrCode::MissingCoverage,
                  "coverage line belongs to no block: " + key.first + ":" +
                      std::to_string(key.second));
    }
}

bool is_assignment_covered(const DesignHierarchy& design, const CodeBlock& b, SigId s, int t,
                           const Waveform& w, const CoverageSource& src) {
    if (t < 0) return false;

    if (src.mode == CoverageSource::Mode::ExternalFile) {
        bool any_entry = false;
        for (int sidx : b.statements) {
            const ElabStatement& st = design.statements[static_cast<size_t>(sidx)];
            for (const auto& site : st.sites) {
                if (site.target != s) continue;
                for (int line = site.span.line; line <= site.span.end_line; ++line) {
                    auto it = src.external.find({st.file, line});
                    if (it == src.external.end()) continue;
                    any_entry = true;
                    if (it->second.count(t)) return true;
                }
            }
        }
        if (!any_entry)
            raise(ErrCode::MissingCoverage,
                  "no coverage entry for assignments to '" + design.sig(s).hier_name +
                      "' in block " + b.id + " at cycle " + std::to_string(t));
        return false;
    }

    // Replay: re-evaluate the guard chain from the waveform.
    const InstanceNode* inst = design.find_instance(b.instance_path);
    EvalEnv env;
    env.params = inst ? &inst->params : nullptr;
    env.file = b.file;
    env.lookup = [&](const std::string& local) {
        return w.value_at(b.instance_path + "." + local, t);
    };

    for (int sidx : b.statements) {
        const ElabStatement& st = design.statements[static_cast<size_t>(sidx)];
        for (const auto& site : st.sites) {
            if (site.target != s) continue;
            bool all_true = true;
            for (const auto& g : site.guards) {
                if (eval_guard(g, env) != Bit::One) {
                    all_true = false;
                    break;
                }
            }
            if (all_true) return true;
        }
    }
    return false;
}

} // namespace blockloc
