#include "blockloc/blocks.hpp"

#include <algorithm>

#include "blockloc/diag.hpp"

namespace blockloc {

namespace {

void sort_unique(std::vector<SigId>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool intersects(const std::vector<SigId>& a, const std::vector<SigId>& b) {
    // both sorted
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) return true;
        if (a[i] < b[j])
            ++i;
        else
            ++j;
    }
    return false;
}

std::vector<SigId> set_union(const std::vector<SigId>& a, const std::vector<SigId>& b) {
    std::vector<SigId> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::string make_block_id(const std::string& instance, const std::string& file, int line,
                          BlockKind kind) {
    return instance + "|" + file + ":" + std::to_string(line) + "|" + block_kind_name(kind);
}

} // namespace

const char* block_kind_name(BlockKind kind) {
    switch (kind) {
    case BlockKind::ModInput: return "mod_input";
    case BlockKind::ModOutput: return "mod_output";
    case BlockKind::Assign: return "assign";
    case BlockKind::Always: return "always";
    }
    return "?";
}

const CodeBlock* BlockSet::try_find_driver(SigId s) const {
    auto it = driver_index.find(s);
    return it == driver_index.end() ? nullptr : &blocks[it->second];
}

const CodeBlock& BlockSet::find_driven_block(SigId s) const {
    const CodeBlock* b = try_find_driver(s);
    if (!b) raise(ErrCode::UndrivenSignal, "signal id " + std::to_string(s) + " has no driver");
    return *b;
}

const CodeBlock* BlockSet::find_by_id(const std::string& id) const {
    for (const auto& b : blocks)
        if (b.id == id) return &b;
    return nullptr;
}

std::vector<AssignBlockSeed> merge_assign_blocks(std::vector<AssignBlockSeed> blocks) {
    // Iterate the pairwise rule to its fixpoint. Quadratic per pass, which is
    // fine at design scale; the union-find formulation lives in the tests as
    // the independent oracle.
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < blocks.size() && !changed; ++i) {
            for (size_t j = i + 1; j < blocks.size() && !changed; ++j) {
                if (intersects(blocks[i].v_out, blocks[j].v_in) ||
                    intersects(blocks[j].v_out, blocks[i].v_in)) {
                    AssignBlockSeed merged;
                    merged.v_in = set_union(blocks[i].v_in, blocks[j].v_in);
                    merged.v_out = set_union(blocks[i].v_out, blocks[j].v_out);
                    merged.lines = blocks[i].lines;
                    merged.lines.insert(blocks[j].lines.begin(), blocks[j].lines.end());
                    merged.statements = blocks[i].statements;
                    merged.statements.insert(merged.statements.end(), blocks[j].statements.begin(),
                                             blocks[j].statements.end());
                    std::sort(merged.statements.begin(), merged.statements.end());
                    blocks.erase(blocks.begin() + static_cast<long>(j));
                    blocks[i] = std::move(merged);
                    changed = true;
                }
            }
        }
    }
    // canonical order: by first owned statement index
    std::sort(blocks.begin(), blocks.end(), [](const AssignBlockSeed& a, const AssignBlockSeed& b) {
        return a.statements.front() < b.statements.front();
    });
    return blocks;
}

BlockSet blockize(const DesignHierarchy& design, const BlockizeOptions& opts) {
    BlockSet out;

    // Definition-1 line disjointness is per (file, line); a module elaborated
    // twice would hand the same lines to two blocks.
    std::map<const ModuleDecl*, std::string> seen_modules;
    for (const auto& inst : design.instances) {
        auto [it, inserted] = seen_modules.emplace(inst.module, inst.path);
        if (!inserted)
            raise(ErrCode::UnsupportedConstruct,
                  "module '" + inst.module->name + "' instantiated more than once (" +
                      it->second + ", " + inst.path + "); blockization needs line-disjoint blocks",
                  inst.module->file);
    }

    auto is_trigger_name = [&](const std::string& local) {
        for (const auto& n : opts.reset_names)
            if (n == local) return true;
        for (const auto& n : opts.clock_names)
            if (n == local) return true;
        return false;
    };

    // port-connection blocks
    for (size_t ci = 0; ci < design.connections.size(); ++ci) {
        const Connection& conn = design.connections[ci];
        CodeBlock b;
        b.kind = conn.dir == PortDir::Input ? BlockKind::ModInput : BlockKind::ModOutput;
        b.instance_path = conn.instance_path;
        b.file = conn.file;
        b.first_line = conn.span.line;
        b.last_line = conn.span.end_line;
        for (int l = conn.span.line; l <= conn.span.end_line; ++l) b.lines.emplace(conn.file, l);
        if (conn.dir == PortDir::Input) {
            b.v_out = {conn.child_port};
            if (conn.parent != kNoSignal) b.v_in = {conn.parent};
        } else {
            if (conn.parent == kNoSignal)
                raise(ErrCode::UnsupportedConstruct, "output port connected to a literal",
                      conn.file, conn.span.line);
            b.v_out = {conn.parent};
            b.v_in = {conn.child_port};
        }
        b.connections.push_back(static_cast<int>(ci));
        b.id = make_block_id(b.instance_path, b.file, b.first_line, b.kind);
        out.blocks.push_back(std::move(b));
    }

    // always blocks and assign seeds grouped per instance
    std::map<std::string, std::vector<AssignBlockSeed>> assign_seeds;
    for (size_t si = 0; si < design.statements.size(); ++si) {
        const ElabStatement& st = design.statements[si];
        if (st.kind == StatementKind::AlwaysBlock) {
            if (st.sites.empty()) continue; // nothing driven; owns no dataflow
            CodeBlock b;
            b.kind = BlockKind::Always;
            b.clocked = st.clocked;
            b.instance_path = st.instance_path;
            b.file = st.file;
            b.first_line = st.span.line;
            b.last_line = st.span.end_line;
            for (int l = st.span.line; l <= st.span.end_line; ++l) b.lines.emplace(st.file, l);
            b.v_out = st.lhs_signals;
            std::vector<SigId> in = st.rhs_signals;
            in.insert(in.end(), st.condition_signals.begin(), st.condition_signals.end());
            sort_unique(in);
            if (st.clocked) {
                std::vector<SigId> kept;
                for (SigId s : in) {
                    if (s == st.clock_signal || is_trigger_name(design.sig(s).local_name))
                        b.trigger_signals.push_back(s);
                    else
                        kept.push_back(s);
                }
                if (st.clock_signal != kNoSignal) b.trigger_signals.push_back(st.clock_signal);
                sort_unique(b.trigger_signals);
                in = std::move(kept);
            }
            b.v_in = std::move(in);
            b.statements.push_back(static_cast<int>(si));
            b.id = make_block_id(b.instance_path, b.file, b.first_line, b.kind);
            out.blocks.push_back(std::move(b));
        } else {
            AssignBlockSeed seed;
            seed.v_out = st.lhs_signals;
            seed.v_in = st.rhs_signals;
            for (int l = st.span.line; l <= st.span.end_line; ++l) seed.lines.emplace(st.file, l);
            seed.statements.push_back(static_cast<int>(si));
            assign_seeds[st.instance_path].push_back(std::move(seed));
        }
    }

    for (auto& [instance, seeds] : assign_seeds) {
        auto merged = merge_assign_blocks(std::move(seeds));
        for (auto& seed : merged) {
            CodeBlock b;
            b.kind = BlockKind::Assign;
            b.instance_path = instance;
            const ElabStatement& first = design.statements[seed.statements.front()];
            b.file = first.file;
            b.first_line = first.span.line;
            int last = first.span.end_line;
            for (int sidx : seed.statements)
                last = std::max(last, design.statements[sidx].span.end_line);
            b.last_line = last;
            b.lines = std::move(seed.lines);
            b.v_in = std::move(seed.v_in);
            b.v_out = std::move(seed.v_out);
            b.statements = std::move(seed.statements);
            b.id = make_block_id(b.instance_path, b.file, b.first_line, b.kind);
            out.blocks.push_back(std::move(b));
        }
    }

    // deterministic block order: file, first line, kind, instance
    std::sort(out.blocks.begin(), out.blocks.end(), [](const CodeBlock& a, const CodeBlock& b) {
        return std::tie(a.file, a.first_line, a.kind, a.instance_path) <
               std::tie(b.file, b.first_line, b.kind, b.instance_path);
    });

    for (size_t i = 0; i < out.blocks.size(); ++i) {
        for (SigId s : out.blocks[i].v_out) {
            auto [it, inserted] = out.driver_index.emplace(s, static_cast<int>(i));
            if (!inserted)
                raise(ErrCode::MultiDriver,
                      "signal '" + design.sig(s).hier_name + "' driven by blocks '" +
                          out.blocks[it->second].id + "' and '" + out.blocks[i].id + "'");
        }
    }
    return out;
}

} // namespace blockloc
