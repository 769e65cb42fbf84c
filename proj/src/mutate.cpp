#include "blockloc/mutate.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "blockloc/diag.hpp"
#include "blockloc/elaborate.hpp"

namespace blockloc {

const char* mutation_rule_name(MutationRule rule) {
    switch (rule) {
    case MutationRule::BinaryOpSwap: return "binary_op_swap";
    case MutationRule::UnaryNegateCondition: return "unary_negate_condition";
    case MutationRule::SignalReplace: return "signal_replace";
    case MutationRule::ConstantPerturb: return "constant_perturb";
    case MutationRule::AssignmentDelete: return "assignment_delete";
    }
    return "?";
}

MutationRule mutation_rule_from_name(const std::string& name) {
    for (MutationRule r :
         {MutationRule::BinaryOpSwap, MutationRule::UnaryNegateCondition,
          MutationRule::SignalReplace, MutationRule::ConstantPerturb,
          MutationRule::AssignmentDelete})
        if (name == mutation_rule_name(r)) return r;
    raise(ErrCode::ManifestError, "unknown mutation rule '" + name + "'");
}

namespace {

struct SiteCollector {
    const DesignAST& ast;
    MutationRule rule;
    std::vector<Mutation> sites;
    const ModuleDecl* module = nullptr;
    const SourceUnit* unit = nullptr;

    const SourceUnit* unit_of(const std::string& file) const {
        for (const auto& u : ast.sources)
            if (u.path == file) return &u;
        return nullptr;
    }

    std::string text_of(const Span& span) const {
        if (!unit || span.end_offset <= span.offset) return "";
        return unit->text.substr(span.offset, span.end_offset - span.offset);
    }

    void add(const Span& span, std::string mutated) {
        Mutation m;
        m.rule = rule;
        m.file = module->file;
        m.line = span.line;
        m.col_start = span.col;
        m.col_end = span.end_col;
        m.offset = span.offset;
        m.end_offset = span.end_offset;
        m.original = text_of(span);
        m.mutated = std::move(mutated);
        for (int l = span.line; l <= span.end_line; ++l) m.ground_truth_lines.push_back(l);
        sites.push_back(std::move(m));
    }

    // ---- per-rule expression walks ----

    static const char* swapped_op(BinOp op) {
        switch (op) {
        case BinOp::Add: return "-";
        case BinOp::Sub: return "+";
        case BinOp::And: return "|";
        case BinOp::Or: return "&";
        case BinOp::Xor: return "&";
        case BinOp::LogAnd: return "||";
        case BinOp::LogOr: return "&&";
        case BinOp::Eq: return "!=";
        case BinOp::Ne: return "==";
        case BinOp::Lt: return ">=";
        case BinOp::Ge: return "<";
        case BinOp::Le: return ">";
        case BinOp::Gt: return "<=";
        case BinOp::Shl: return ">>";
        case BinOp::Shr: return "<<";
        default: return nullptr;
        }
    }

    std::string perturbed_literal(const Expr& lit) const {
        // bump the value by one within the width, keeping the textual base
        const std::string& t = lit.lit_text;
        if (lit.lit_value.has_unknown()) return "";
        size_t quote = t.find('\'');
        uint64_t value = lit.lit_value.to_uint();
        int width = lit.lit_value.width();
        uint64_t mask = width >= 64 ? ~uint64_t{0} : ((uint64_t{1} << width) - 1);
        uint64_t next = (value + 1) & mask;
        if (next == value) return "";
        if (quote == std::string::npos) return std::to_string(next);
        std::string prefix = t.substr(0, quote + 1); // keep size part
        char base = static_cast<char>(std::tolower(t[quote + 1]));
        char base_ch = t[quote + 1];
        std::string digits;
        switch (base) {
        case 'd': digits = std::to_string(next); break;
        case 'h': {
            if (next == 0) digits = "0";
            while (next > 0) {
                digits.insert(digits.begin(), "0123456789abcdef"[next & 15]);
                next >>= 4;
            }
            if (digits.empty()) digits = "0";
            break;
        }
        case 'b': {
            SignalValue v = SignalValue::from_uint(next, width);
            digits = v.to_bin();
            break;
        }
        case 'o': {
            if (next == 0) digits = "0";
            while (next > 0) {
                digits.insert(digits.begin(), static_cast<char>('0' + (next & 7)));
                next >>= 3;
            }
            break;
        }
        default:
            return ""; // fill literals are not perturbed
        }
        return prefix.substr(0, quote + 1) + base_ch + digits;
    }

    void walk_expr(const Expr& e, bool in_condition) {
        switch (rule) {
        case MutationRule::BinaryOpSwap:
            if (e.kind == ExprKind::Binary) {
                const char* sw = swapped_op(e.bin_op);
                if (sw) add(e.op_span, sw);
            }
            break;
        case MutationRule::UnaryNegateCondition:
            if (e.kind == ExprKind::Ternary)
                add(e.args[0]->span, "!(" + text_of(e.args[0]->span) + ")");
            break;
        case MutationRule::SignalReplace:
            if (e.kind == ExprKind::Ident || e.kind == ExprKind::BitSelect ||
                e.kind == ExprKind::PartSelect) {
                // alternatives: same-width declared signals of this module
                int width = width_of_local(e.ident);
                if (width > 0) {
                    std::vector<std::string> alts;
                    for (const auto& name : same_width_locals(width))
                        if (name != e.ident) alts.push_back(name);
                    if (!alts.empty()) {
                        // the ident token is at the span start; splice only it
                        Span ident_span = e.span;
                        ident_span.end_offset = ident_span.offset + e.ident.size();
                        ident_span.end_line = ident_span.line;
                        ident_span.end_col = ident_span.col + static_cast<int>(e.ident.size());
                        // encode alternatives in `mutated` lazily: one site per
                        // occurrence; the picker selects the replacement
                        Mutation m;
                        m.rule = rule;
                        m.file = module->file;
                        m.line = ident_span.line;
                        m.col_start = ident_span.col;
                        m.col_end = ident_span.end_col;
                        m.offset = ident_span.offset;
                        m.end_offset = ident_span.end_offset;
                        m.original = e.ident;
                        m.mutated = alts.front(); // overwritten by the picker
                        m.ground_truth_lines.push_back(ident_span.line);
                        sites.push_back(std::move(m));
                        alternatives.push_back(std::move(alts));
                    }
                }
            }
            break;
        case MutationRule::ConstantPerturb:
            if (e.kind == ExprKind::Literal && !e.lit_fill) {
                std::string next = perturbed_literal(e);
                if (!next.empty()) add(e.span, next);
            }
            break;
        case MutationRule::AssignmentDelete:
            break;
        }
        for (const auto& a : e.args) walk_expr(*a, in_condition);
    }

    // width of a module-local signal under default parameter values
    int width_of_local(const std::string& name) const {
        auto eval_width = [&](const ExprPtr& msb, const ExprPtr& lsb) -> int {
            if (!msb) return 1;
            std::map<std::string, int64_t> params;
            for (const auto& p : module->params) params[p.name] = p.value;
            try {
                int64_t m = const_eval(*msb, params, module->file);
                int64_t l = lsb ? const_eval(*lsb, params, module->file) : 0;
                return static_cast<int>(m - l + 1);
            } catch (const Error&) {
                return -1;
            }
        };
        for (const auto& p : module->ports)
            if (p.name == name) return eval_width(p.msb, p.lsb);
        for (const auto& n : module->nets)
            if (n.name == name) return eval_width(n.msb, n.lsb);
        return -1;
    }

    std::vector<std::string> same_width_locals(int width) const {
        std::vector<std::string> out;
        for (const auto& p : module->ports)
            if (width_of_local(p.name) == width) out.push_back(p.name);
        for (const auto& n : module->nets)
            if (width_of_local(n.name) == width) out.push_back(n.name);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    // ---- statement walks ----

    static int count_assigns_to(const Stmt& s, const std::string& name) {
        int n = 0;
        switch (s.kind) {
        case StmtKind::Assign:
            if (s.lhs.name == name) ++n;
            break;
        case StmtKind::Block:
            for (const auto& sub : s.stmts) n += count_assigns_to(*sub, name);
            break;
        case StmtKind::If:
            if (s.then_branch) n += count_assigns_to(*s.then_branch, name);
            if (s.else_branch) n += count_assigns_to(*s.else_branch, name);
            break;
        case StmtKind::Case:
            for (const auto& item : s.items)
                if (item.body) n += count_assigns_to(*item.body, name);
            break;
        case StmtKind::Null:
            break;
        }
        return n;
    }

    void walk_stmt(const Stmt& s, const Stmt& block_root) {
        switch (s.kind) {
        case StmtKind::Null:
            break;
        case StmtKind::Block:
            for (const auto& sub : s.stmts) walk_stmt(*sub, block_root);
            break;
        case StmtKind::If:
            if (rule == MutationRule::UnaryNegateCondition)
                add(s.cond->span, "!(" + text_of(s.cond->span) + ")");
            walk_expr(*s.cond, true);
            if (s.then_branch) walk_stmt(*s.then_branch, block_root);
            if (s.else_branch) walk_stmt(*s.else_branch, block_root);
            break;
        case StmtKind::Case:
            walk_expr(*s.case_expr, true);
            for (const auto& item : s.items) {
                for (const auto& pat : item.patterns) walk_expr(*pat, true);
                if (item.body) walk_stmt(*item.body, block_root);
            }
            break;
        case StmtKind::Assign:
            if (rule == MutationRule::AssignmentDelete) {
                // only when the target keeps another assignment in this block,
                // so the signal stays driven and the block survives
                if (count_assigns_to(block_root, s.lhs.name) >= 2) add(s.span, ";");
            }
            walk_expr(*s.rhs, false);
            if (s.lhs.index) walk_expr(*s.lhs.index, false);
            break;
        }
    }

    void run() {
        for (const auto& mod : ast.modules) {
            module = &mod;
            unit = unit_of(mod.file);
            if (!unit) continue;
            for (const auto& assign : mod.assigns) {
                walk_expr(*assign.rhs, false);
                if (assign.lhs.index) walk_expr(*assign.lhs.index, false);
            }
            for (const auto& blk : mod.always_blocks) walk_stmt(*blk.body, *blk.body);
        }
        // walk order is deterministic (parse order, then DFS), and the
        // SignalReplace alternatives vector stays parallel to `sites`
    }

    std::vector<std::vector<std::string>> alternatives; // parallel to SignalReplace sites
};

} // namespace

std::vector<Mutation> enumerate_mutation_sites(const DesignAST& ast, MutationRule rule) {
    SiteCollector collector{ast, rule, {}, nullptr, nullptr, {}};
    collector.run();
    return collector.sites;
}

Mutation inject_mutation(const DesignAST& ast, MutationRule rule, uint64_t seed) {
    SiteCollector collector{ast, rule, {}, nullptr, nullptr, {}};
    collector.run();
    auto& sites = collector.sites;
    if (sites.empty())
        raise(ErrCode::NoApplicableSite,
              std::string("no applicable site for rule ") + mutation_rule_name(rule));
    std::mt19937_64 rng(seed);
    size_t pick = static_cast<size_t>(rng() % sites.size());
    Mutation m = sites[pick];
    m.seed = seed;
    if (rule == MutationRule::SignalReplace) {
        const auto& alts = collector.alternatives[pick];
        m.mutated = alts[static_cast<size_t>(rng() % alts.size())];
    }
    return m;
}

std::string apply_mutation(const std::string& text, const Mutation& m) {
    if (m.end_offset > text.size() ||
        text.substr(m.offset, m.end_offset - m.offset) != m.original)
        raise(ErrCode::ManifestError,
              "mutation site does not match the source text (stale mutation?)");
    std::string out = text.substr(0, m.offset);
    out += m.mutated;
    out += text.substr(m.end_offset);
    return out;
}

std::string revert_mutation(const std::string& mutated_text, const Mutation& m) {
    if (m.offset > mutated_text.size() ||
        mutated_text.substr(m.offset, m.mutated.size()) != m.mutated)
        raise(ErrCode::ManifestError, "revert site does not match the mutated text");
    std::string out = mutated_text.substr(0, m.offset);
    out += m.original;
    out += mutated_text.substr(m.offset + m.mutated.size());
    return out;
}

std::vector<SourceUnit> apply_to_sources(const std::vector<SourceUnit>& units, const Mutation& m) {
    std::vector<SourceUnit> out;
    bool found = false;
    for (const auto& u : units) {
        if (u.path == m.file) {
            out.push_back(make_source(u.path, apply_mutation(u.text, m)));
            found = true;
        } else {
            out.push_back(u);
        }
    }
    if (!found) raise(ErrCode::ManifestError, "mutation names unknown file " + m.file);
    return out;
}

} // namespace blockloc
