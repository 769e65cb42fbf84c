#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "blockloc/backend.hpp"
#include "blockloc/diag.hpp"
#include "blockloc/manifest.hpp"
#include "blockloc/mutate.hpp"
#include "blockloc/orchestrator.hpp"
#include "blockloc/serialize.hpp"
#include "blockloc/slicer.hpp"
#include "blockloc/topn.hpp"
#include "blockloc/waveform.hpp"

using namespace blockloc;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitAnalysis = 2;
constexpr int kExitBackend = 3;

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrCode::IoError, "cannot write " + path);
    out << text;
}

CoverageSource coverage_for(const ProjectManifest& manifest) {
    if (manifest.coverage.empty()) return CoverageSource::replay();
    return CoverageSource::from_file(manifest.resolve(manifest.coverage));
}

int cmd_blockize(const ProjectManifest& manifest, const std::string& out_path) {
    Design design = load_design(manifest);
    std::string blocks_json = blocks_to_json(design.hier, design.blocks);
    std::string out = out_path.empty() ? "blocks.json" : out_path;
    write_file(out, blocks_json);
    std::cout << "blocks: " << design.blocks.blocks.size() << " (written to " << out << ")\n";
    std::cout << block_size_histogram(design.blocks);
    return kExitOk;
}

int cmd_slice(const ProjectManifest& manifest, const std::string& signal, long cycle_arg,
              bool time_units, const std::string& out_path, const std::string& dot_path) {
    Design design = load_design(manifest);
    if (manifest.waveform.empty())
        raise(ErrCode::ManifestError, "manifest has no 'waveform' entry");
    Waveform wave = Waveform::load_vcd(manifest.resolve(manifest.waveform),
                                       manifest.clock_hier());
    int cycle = static_cast<int>(cycle_arg);
    if (time_units) {
        cycle = wave.cycle_of_time(static_cast<uint64_t>(cycle_arg));
        if (cycle < 0)
            raise(ErrCode::CycleOutOfRange,
                  "time " + std::to_string(cycle_arg) + " precedes the first posedge");
        std::cout << "time " << cycle_arg << " -> posedge cycle " << cycle << "\n";
    }
    SigId sig = design.hier.find_signal(signal);
    if (sig == kNoSignal)
        raise(ErrCode::UnresolvedIdentifier, "signal '" + signal + "' not found in design");
    CoverageSource cov = coverage_for(manifest);
    ExecPath path = build_exec_path(design.hier, design.blocks, sig, cycle, wave, cov);
    std::cout << "nodes: " << path.nodes.size() << ", edges: " << path.edges.size()
              << ", distinct blocks: " << path.distinct_blocks().size() << " of "
              << design.blocks.blocks.size() << "\n";
    for (const auto& d : path.diagnostics) std::cout << "note: " << d << "\n";
    if (!out_path.empty()) write_file(out_path, exec_path_to_json(design.blocks, path));
    if (!dot_path.empty()) write_file(dot_path, exec_path_to_dot(design.blocks, path));
    return kExitOk;
}

int cmd_localize(const ProjectManifest& manifest, const std::string& backend_spec,
                 const std::string& report_path, int jobs, int max_tool_calls,
                 const std::string& out_path, const std::string& transcript_path) {
    Design design = load_design(manifest);
    if (manifest.waveform.empty())
        raise(ErrCode::ManifestError, "manifest has no 'waveform' entry");
    Waveform wave =
        Waveform::load_vcd(manifest.resolve(manifest.waveform), manifest.clock_hier());
    CoverageSource cov = coverage_for(manifest);

    std::string rpath = report_path.empty() ? manifest.resolve(manifest.report) : report_path;
    if (rpath.empty()) raise(ErrCode::ManifestError, "no report file given");
    std::vector<TestReport> reports = TestReport::list_from_file(rpath);
    if (reports.empty()) raise(ErrCode::ManifestError, "report file holds no reports");

    std::string spec = backend_spec.empty() ? manifest.backend : backend_spec;
    if (spec.empty()) raise(ErrCode::ManifestError, "no backend given (manifest or --backend)");
    // resolve the file argument of the spec relative to the manifest
    if (size_t colon = spec.find(':'); colon != std::string::npos) {
        std::string kind = spec.substr(0, colon);
        std::string arg = spec.substr(colon + 1);
        size_t comma = arg.find(',');
        std::string file = comma == std::string::npos ? arg : arg.substr(0, comma);
        std::string rest = comma == std::string::npos ? "" : arg.substr(comma);
        spec = kind + ":" + manifest.resolve(file) + rest;
    }

    Budget budget;
    if (max_tool_calls > 0) budget.max_tool_calls = max_tool_calls;

    struct RunResult {
        RankedList ranking;
        ExecPath path;
        std::string error;
    };
    std::vector<RunResult> results(reports.size());

    auto run_one = [&](size_t idx) {
        const TestReport& report = reports[idx];
        try {
            SigId sig = design.hier.find_signal(report.signal);
            if (sig == kNoSignal)
                raise(ErrCode::UnresolvedIdentifier,
                      "report signal '" + report.signal + "' not found");
            results[idx].path =
                build_exec_path(design.hier, design.blocks, sig, report.cycle, wave, cov);
            LocalizationContext ctx{&design.ast, &design.hier, &design.blocks,
                                    &results[idx].path, &wave};
            auto backend = make_backend(spec, manifest.clock_hier());
            results[idx].ranking = run_localization(ctx, report, *backend, budget);
        } catch (const Error& e) {
            results[idx].error = e.what();
            if (e.code() == ErrCode::BackendError) throw;
        }
    };

    if (jobs <= 1 || reports.size() == 1) {
        for (size_t i = 0; i < reports.size(); ++i) run_one(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        std::atomic<bool> backend_failed{false};
        std::string backend_error;
        std::mutex err_mutex;
        for (int j = 0; j < jobs; ++j) {
            pool.emplace_back([&] {
                for (;;) {
                    size_t i = next.fetch_add(1);
                    if (i >= reports.size()) return;
                    try {
                        run_one(i);
                    } catch (const Error& e) {
                        std::lock_guard<std::mutex> lock(err_mutex);
                        backend_failed = true;
                        backend_error = e.what();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (backend_failed) raise(ErrCode::BackendError, backend_error);
    }

    json out = json::array();
    for (size_t i = 0; i < reports.size(); ++i) {
        json entry;
        entry["report"] = json::parse(reports[i].to_json_text());
        if (!results[i].error.empty()) {
            entry["error"] = results[i].error;
        } else {
            entry["result"] =
                json::parse(ranking_to_json(design.hier, design.blocks, results[i].ranking));
            std::cout << "report " << i << " (" << reports[i].signal << "@" << reports[i].cycle
                      << "):\n"
                      << ranking_to_text(design.blocks, results[i].ranking);
        }
        out.push_back(std::move(entry));
        if (!transcript_path.empty() && results[i].error.empty()) {
            std::string tpath = transcript_path;
            if (reports.size() > 1) tpath += "." + std::to_string(i);
            write_file(tpath, results[i].ranking.transcript);
        }
    }
    if (!out_path.empty()) write_file(out_path, out.dump(2) + "\n");
    return kExitOk;
}

int cmd_mutate(const ProjectManifest& manifest, const std::string& rule_name, uint64_t seed,
               const std::string& out_dir) {
    std::vector<SourceUnit> units;
    for (const auto& s : manifest.sources) units.push_back(load_source_file(manifest.resolve(s)));
    DesignAST ast = parse_sources(std::move(units));
    MutationRule rule = mutation_rule_from_name(rule_name);
    Mutation m = inject_mutation(ast, rule, seed);

    std::filesystem::create_directories(out_dir);
    for (size_t i = 0; i < ast.sources.size(); ++i) {
        const SourceUnit& u = ast.sources[i];
        std::string name = std::filesystem::path(manifest.sources[i]).filename().string();
        std::string text = u.path == m.file ? apply_mutation(u.text, m) : u.text;
        write_file((std::filesystem::path(out_dir) / name).string(), text);
    }
    write_file((std::filesystem::path(out_dir) / "ground_truth.json").string(),
               mutation_to_json(m));
    std::cout << "mutated " << m.file << ":" << m.line << " [" << mutation_rule_name(m.rule)
              << "] '" << m.original << "' -> '" << m.mutated << "'\n";
    return kExitOk;
}

int cmd_eval(const std::string& records_path, const std::string& n_list) {
    std::ifstream in(records_path, std::ios::binary);
    if (!in) raise(ErrCode::IoError, "cannot open records file", records_path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        raise(ErrCode::ManifestError, std::string("records file is not valid JSON: ") + e.what(),
              records_path);
    }
    std::vector<EvalRecord> records;
    for (const auto& r : doc) {
        EvalRecord rec;
        rec.bug_id = r.value("bug_id", "");
        if (r.contains("rank") && !r["rank"].is_null()) rec.rank = r["rank"].get<int>();
        records.push_back(std::move(rec));
    }
    std::vector<int> ns;
    std::stringstream ss(n_list);
    std::string item;
    while (std::getline(ss, item, ',')) ns.push_back(std::stoi(item));
    std::cout << topn_table(records, ns);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"block-level RTL fault localization toolkit"};
    app.require_subcommand(1);

    std::string manifest_path;
    std::string out_path;
    std::string dot_path;
    std::string signal;
    long cycle = -1;
    bool time_units = false;
    std::string backend_spec;
    std::string report_path;
    std::string transcript_path;
    int jobs = 1;
    int max_tool_calls = 0;
    std::string rule_name;
    uint64_t seed = 0;
    std::string records_path;
    std::string n_list = "1,5,10";

    auto* blockize_cmd = app.add_subcommand("blockize", "partition the design into code blocks");
    blockize_cmd->add_option("--manifest", manifest_path)->required();
    blockize_cmd->add_option("--out", out_path, "blocks.json path");

    auto* slice_cmd = app.add_subcommand("slice", "build the execution path from (signal, cycle)");
    slice_cmd->add_option("--manifest", manifest_path)->required();
    slice_cmd->add_option("--signal", signal)->required();
    slice_cmd->add_option("--cycle", cycle)->required();
    slice_cmd->add_flag("--time-to-cycle", time_units,
                        "treat --cycle as simulation time and convert");
    slice_cmd->add_option("--out", out_path, "execution path JSON");
    slice_cmd->add_option("--dot", dot_path, "graphviz DOT output");

    auto* localize_cmd = app.add_subcommand("localize", "run the reasoning loop over a report");
    localize_cmd->add_option("--manifest", manifest_path)->required();
    localize_cmd->add_option("--backend", backend_spec,
                             "scripted:<file> | remote:<profile> | policy:<golden.vcd>");
    localize_cmd->add_option("--report", report_path, "override the manifest report");
    localize_cmd->add_option("--jobs", jobs, "parallel runs over a report array");
    localize_cmd->add_option("--max-tool-calls", max_tool_calls);
    localize_cmd->add_option("--out", out_path, "ranking JSON");
    localize_cmd->add_option("--transcript", transcript_path, "transcript JSONL");

    auto* mutate_cmd = app.add_subcommand("mutate", "inject one seeded mutation");
    mutate_cmd->add_option("--manifest", manifest_path)->required();
    mutate_cmd->add_option("--rule", rule_name)->required();
    mutate_cmd->add_option("--seed", seed)->required();
    mutate_cmd->add_option("--out", out_path, "output directory")->required();

    auto* eval_cmd = app.add_subcommand("eval", "Top-N table over evaluation records");
    eval_cmd->add_option("--records", records_path)->required();
    eval_cmd->add_option("--n", n_list, "comma-separated N values");

    CLI11_PARSE(app, argc, argv);

    try {
        if (blockize_cmd->parsed())
            return cmd_blockize(ProjectManifest::load(manifest_path), out_path);
        if (slice_cmd->parsed())
            return cmd_slice(ProjectManifest::load(manifest_path), signal, cycle, time_units,
                             out_path, dot_path);
        if (localize_cmd->parsed())
            return cmd_localize(ProjectManifest::load(manifest_path), backend_spec, report_path,
                                jobs, max_tool_calls, out_path, transcript_path);
        if (mutate_cmd->parsed())
            return cmd_mutate(ProjectManifest::load(manifest_path), rule_name, seed, out_path);
        if (eval_cmd->parsed()) return cmd_eval(records_path, n_list);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == ErrCode::BackendError ? kExitBackend : kExitAnalysis;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAnalysis;
    }
    return kExitUsage;
}
