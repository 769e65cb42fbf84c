#include "blockloc/slicer.hpp"

#include <algorithm>

#include "blockloc/diag.hpp"

namespace blockloc {

int ExecPath::find_node(int block, int cycle) const {
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].block == block && nodes[i].cycle == cycle) return static_cast<int>(i);
    return -1;
}

std::set<int> ExecPath::distinct_blocks() const {
    std::set<int> out;
    for (const auto& n : nodes) out.insert(n.block);
    return out;
}

namespace {

void guard_signals(const DesignHierarchy& design, const std::string& instance_path,
                   const Guard& g, std::vector<std::string>& names) {
    switch (g.kind) {
    case Guard::Kind::ExprTrue:
    case Guard::Kind::ExprFalse:
        collect_idents(*g.cond, names);
        break;
    case Guard::Kind::CaseItemMatch:
    case Guard::Kind::CaseItemNoMatch: {
        collect_idents(*g.case_stmt->case_expr, names);
        const CaseItem& item = g.case_stmt->items[static_cast<size_t>(g.item_index)];
        for (const auto& pat : item.patterns) collect_idents(*pat, names);
        break;
    }
    }
    (void)design;
    (void)instance_path;
}

} // namespace

std::vector<SigId> dataflow_analysis(const DesignHierarchy& design, const BlockSet& blocks,
                                     SigId s, const CodeBlock& b) {
    (void)blocks;
    if (b.kind == BlockKind::ModInput || b.kind == BlockKind::ModOutput) return b.v_in;

    auto is_trigger = [&](SigId id) {
        return std::find(b.trigger_signals.begin(), b.trigger_signals.end(), id) !=
               b.trigger_signals.end();
    };

    // local-name targets of blocking assignments inside this block
    auto blocking_sites_of = [&](SigId target) {
        std::vector<const AssignmentSite*> out;
        for (int sidx : b.statements) {
            const ElabStatement& st = design.statements[static_cast<size_t>(sidx)];
            for (const auto& site : st.sites)
                if (site.target == target && site.stmt && !site.stmt->nonblocking)
                    out.push_back(&site);
        }
        return out;
    };

    std::vector<SigId> result;
    auto push = [&](SigId id) {
        if (id == kNoSignal || is_trigger(id)) return;
        if (std::find(result.begin(), result.end(), id) == result.end()) result.push_back(id);
    };

    std::vector<SigId> expanded; // blocking-chain targets already collapsed
    std::vector<SigId> queue{s};
    bool first = true;
    while (!queue.empty()) {
        SigId target = queue.front();
        queue.erase(queue.begin());
        if (std::find(expanded.begin(), expanded.end(), target) != expanded.end()) continue;
        expanded.push_back(target);

        std::vector<SigId> local_reads;
        std::vector<std::string> guard_names;
        for (int sidx : b.statements) {
            const ElabStatement& st = design.statements[static_cast<size_t>(sidx)];
            for (const auto& site : st.sites) {
                if (site.target != target) continue;
                for (const auto& r : site.rhs_local_reads) {
                    SigId id = design.resolve_local(st.instance_path, r);
                    if (id != kNoSignal &&
                        std::find(local_reads.begin(), local_reads.end(), id) ==
                            local_reads.end())
                        local_reads.push_back(id);
                }
                for (const auto& g : site.guards)
                    guard_signals(design, st.instance_path, g, guard_names);
            }
        }
        for (SigId id : local_reads) push(id);
        for (const auto& name : guard_names) push(design.resolve_local(b.instance_path, name));

        // collapse intra-block blocking chains: reads produced by a blocking
        // assignment in this block depend on that assignment's own reads at
        // the same cycle
        for (SigId id : local_reads) {
            if (!blocking_sites_of(id).empty() &&
                std::find(expanded.begin(), expanded.end(), id) == expanded.end())
                queue.push_back(id);
        }
        if (first) first = false;
    }
    return result;
}

DrivenSet intra_block_analysis(const DesignHierarchy& design, const BlockSet& blocks, SigId s,
                               const CodeBlock& b, int t, const Waveform& w,
                               const CoverageSource& src) {
    DrivenSet out;
    if (!b.clocked) {
        out.signals = dataflow_analysis(design, blocks, s, b);
        out.cycle = t;
        return out;
    }
    if (is_assignment_covered(design, b, s, t - 1, w, src)) {
        out.signals = dataflow_analysis(design, blocks, s, b);
        out.cycle = t - 1;
        return out;
    }
    out.signals = {s};
    out.cycle = t - 1;
    return out;
}

namespace {

struct SliceState {
    const DesignHierarchy& design;
    const BlockSet& blocks;
    const Waveform& w;
    const CoverageSource& src;
    const SliceLimits& limits;
    ExecPath path;
    std::set<std::pair<SigId, int>> visited;
    std::set<std::string> undriven_noted;
    std::map<std::pair<int, int>, int> node_index;

    int ensure_node(int block, int cycle) {
        auto it = node_index.find({block, cycle});
        if (it != node_index.end()) return it->second;
        if (static_cast<int>(path.nodes.size()) >= limits.max_nodes)
            raise(ErrCode::LimitExceeded,
                  "execution path exceeds max_nodes = " + std::to_string(limits.max_nodes));
        path.nodes.push_back({block, cycle});
        int idx = static_cast<int>(path.nodes.size()) - 1;
        node_index.emplace(std::make_pair(block, cycle), idx);
        return idx;
    }

    void note_undriven(SigId s, int cycle) {
        std::string key = design.sig(s).hier_name;
        if (undriven_noted.insert(key).second)
            path.diagnostics.push_back("undriven signal '" + key + "' terminates the branch at cycle " +
                                       std::to_string(cycle));
    }

    void annotate(int node, SigId signal, int cycle, int source) {
        auto& entries = path.driven[node];
        for (const auto& e : entries)
            if (e.signal == signal && e.cycle == cycle) return;
        entries.push_back({signal, cycle, source});
    }

    // `chain` holds the signals of the same-cycle combinational path leading
    // here; re-entering one of them is a combinational loop.
    void process(SigId s, int t_cur, std::vector<SigId>& chain) {
        if (t_cur < 0) return;
        if (visited.count({s, t_cur})) return;
        visited.insert({s, t_cur});

        const CodeBlock* b = blocks.try_find_driver(s);
        if (!b) return; // callers check; the root is validated by build_exec_path
        int block_idx = static_cast<int>(b - blocks.blocks.data());
        int node = ensure_node(block_idx, t_cur);

        DrivenSet ds = intra_block_analysis(design, blocks, s, *b, t_cur, w, src);
        if (ds.cycle < 0) return; // drivers before cycle 0 are not materialized

        for (SigId si : ds.signals) {
            const CodeBlock* src_block = blocks.try_find_driver(si);
            if (!src_block) {
                note_undriven(si, ds.cycle);
                continue;
            }
            int src_idx = static_cast<int>(src_block - blocks.blocks.data());
            int src_node = ensure_node(src_idx, ds.cycle);
            path.edges.insert({src_node, node});
            annotate(node, si, ds.cycle, src_node);

            bool same_cycle = ds.cycle == t_cur;
            if (same_cycle) {
                if (std::find(chain.begin(), chain.end(), si) != chain.end() || si == s) {
                    std::string msg = "combinational loop through";
                    std::set<std::string> ids;
                    for (SigId cs : chain) ids.insert(blocks.find_driven_block(cs).id);
                    ids.insert(b->id);
                    ids.insert(src_block->id);
                    for (const auto& id : ids) msg += " [" + id + "]";
                    raise(ErrCode::CombinationalLoop, msg);
                }
            }
            if (!visited.count({si, ds.cycle})) {
                if (same_cycle) {
                    chain.push_back(s);
                    process(si, ds.cycle, chain);
                    chain.pop_back();
                } else {
                    std::vector<SigId> fresh;
                    process(si, ds.cycle, fresh);
                }
            }
        }
    }
};

} // namespace

ExecPath build_exec_path(const DesignHierarchy& design, const BlockSet& blocks, SigId sig, int t,
                         const Waveform& w, const CoverageSource& src, const SliceLimits& limits) {
    if (t < 0 || t >= w.cycle_count())
        raise(ErrCode::CycleOutOfRange,
              "slice root cycle " + std::to_string(t) + " outside waveform range [0, " +
                  std::to_string(w.cycle_count()) + ")");
    const CodeBlock& root = blocks.find_driven_block(sig); // raises UndrivenSignal

    SliceState state{design, blocks, w, src, limits, {}, {}, {}, {}};
    int root_idx = static_cast<int>(&root - blocks.blocks.data());
    state.ensure_node(root_idx, t);
    std::vector<SigId> chain;
    state.process(sig, t, chain);
    return std::move(state.path);
}

} // namespace blockloc
