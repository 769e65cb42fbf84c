#include "blockloc/serialize.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

#include "blockloc/diag.hpp"

namespace blockloc {

using nlohmann::json;

namespace {

json line_ranges(const CodeBlock& b) {
    // contiguous runs per file
    std::map<std::string, std::vector<int>> per_file;
    for (const auto& [file, line] : b.lines) per_file[file].push_back(line);
    json out = json::array();
    for (auto& [file, lines] : per_file) {
        std::sort(lines.begin(), lines.end());
        size_t i = 0;
        while (i < lines.size()) {
            size_t j = i;
            while (j + 1 < lines.size() && lines[j + 1] == lines[j] + 1) ++j;
            out.push_back(json::array({lines[i], lines[j]}));
            i = j + 1;
        }
    }
    return out;
}

} // namespace

std::string blocks_to_json(const DesignHierarchy& design, const BlockSet& blocks) {
    json out = json::array();
    for (const auto& b : blocks.blocks) {
        json jb;
        jb["id"] = b.id;
        jb["kind"] = block_kind_name(b.kind);
        jb["instance"] = b.instance_path;
        jb["file"] = b.file;
        jb["lines"] = line_ranges(b);
        json vin = json::array();
        for (SigId s : b.v_in) vin.push_back(design.sig(s).hier_name);
        json vout = json::array();
        for (SigId s : b.v_out) vout.push_back(design.sig(s).hier_name);
        jb["v_in"] = vin;
        jb["v_out"] = vout;
        jb["clocked"] = b.clocked;
        out.push_back(std::move(jb));
    }
    return out.dump(2) + "\n";
}

std::string exec_path_to_json(const BlockSet& blocks, const ExecPath& path) {
    json out;
    out["nodes"] = json::array();
    for (const auto& n : path.nodes)
        out["nodes"].push_back(
            {{"block", blocks.blocks[static_cast<size_t>(n.block)].id}, {"cycle", n.cycle}});
    out["edges"] = json::array();
    for (const auto& [from, to] : path.edges) out["edges"].push_back(json::array({from, to}));
    return out.dump(2) + "\n";
}

std::string exec_path_to_dot(const BlockSet& blocks, const ExecPath& path) {
    std::ostringstream os;
    os << "digraph exec_path {\n  rankdir=BT;\n";
    for (size_t i = 0; i < path.nodes.size(); ++i) {
        const auto& n = path.nodes[i];
        const CodeBlock& b = blocks.blocks[static_cast<size_t>(n.block)];
        os << "  n" << i << " [label=\"" << b.id << "\\n@" << n.cycle << "\", shape=box"
           << (b.clocked ? ", style=bold" : "") << "];\n";
    }
    for (const auto& [from, to] : path.edges) os << "  n" << from << " -> n" << to << ";\n";
    os << "}\n";
    return os.str();
}

std::string ranking_to_json(const DesignHierarchy& design, const BlockSet& blocks,
                            const RankedList& ranking) {
    (void)design;
    json out;
    out["ranking"] = json::array();
    int rank = 1;
    for (const auto& e : ranking.entries) {
        const CodeBlock* b = blocks.find_by_id(e.block_id);
        json je;
        je["rank"] = rank++;
        je["block"] = e.block_id;
        je["confidence"] = e.confidence;
        je["rationale"] = e.rationale;
        if (b) {
            je["file"] = b->file;
            je["lines"] = line_ranges(*b);
        }
        out["ranking"].push_back(std::move(je));
    }
    out["accounting"] = {{"tool_calls", ranking.accounting.tool_calls},
                         {"turns", ranking.accounting.turns},
                         {"prompt_tokens", ranking.accounting.prompt_tokens},
                         {"completion_tokens", ranking.accounting.completion_tokens},
                         {"exited", ranking.accounting.exited},
                         {"budget_exhausted", ranking.accounting.budget_exhausted},
                         {"flags", ranking.accounting.flags}};
    return out.dump(2) + "\n";
}

std::string ranking_to_text(const BlockSet& blocks, const RankedList& ranking) {
    std::ostringstream os;
    if (ranking.entries.empty()) {
        os << "no suspicious blocks reported\n";
    } else {
        int rank = 1;
        for (const auto& e : ranking.entries) {
            const CodeBlock* b = blocks.find_by_id(e.block_id);
            os << "#" << rank++ << "  " << e.block_id << "  confidence=" << e.confidence;
            if (b) os << "  " << b->file << ":" << b->first_line << "-" << b->last_line;
            os << "\n";
        }
    }
    os << "tool calls: " << ranking.accounting.tool_calls
       << ", turns: " << ranking.accounting.turns
       << ", tokens: " << ranking.accounting.prompt_tokens << "+"
       << ranking.accounting.completion_tokens
       << (ranking.accounting.budget_exhausted ? " (budget exhausted)" : "") << "\n";
    return os.str();
}

std::string mutation_to_json(const Mutation& m) {
    json out;
    out["rule"] = mutation_rule_name(m.rule);
    out["file"] = m.file;
    out["line"] = m.line;
    out["col_start"] = m.col_start;
    out["col_end"] = m.col_end;
    out["offset"] = m.offset;
    out["end_offset"] = m.end_offset;
    out["original"] = m.original;
    out["mutated"] = m.mutated;
    out["seed"] = m.seed;
    out["ground_truth_lines"] = m.ground_truth_lines;
    return out.dump(2) + "\n";
}

Mutation mutation_from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        raise(ErrCode::ManifestError, std::string("mutation record is not valid JSON: ") +
                                          e.what());
    }
    Mutation m;
    m.rule = mutation_rule_from_name(doc["rule"].get<std::string>());
    m.file = doc["file"].get<std::string>();
    m.line = doc["line"].get<int>();
    m.col_start = doc.value("col_start", 0);
    m.col_end = doc.value("col_end", 0);
    m.offset = doc["offset"].get<size_t>();
    m.end_offset = doc["end_offset"].get<size_t>();
    m.original = doc["original"].get<std::string>();
    m.mutated = doc["mutated"].get<std::string>();
    m.seed = doc.value("seed", uint64_t{0});
    for (const auto& l : doc["ground_truth_lines"]) m.ground_truth_lines.push_back(l.get<int>());
    return m;
}

std::string block_size_histogram(const BlockSet& blocks) {
    std::map<int, int> buckets; // bucket start -> count
    for (const auto& b : blocks.blocks) {
        int size = static_cast<int>(b.lines.size());
        int bucket = (size - 1) / 25 * 25 + 1;
        buckets[bucket] += 1;
    }
    std::ostringstream os;
    os << "block size histogram (lines per block)\n";
    for (const auto& [start, count] : buckets) {
        os << "  " << start << "-" << (start + 24) << ": " << count << "  ";
        for (int i = 0; i < count && i < 60; ++i) os << "#";
        os << "\n";
    }
    return os.str();
}

} // namespace blockloc
