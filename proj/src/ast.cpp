#include "blockloc/ast.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "blockloc/diag.hpp"

namespace blockloc {

SourceUnit make_source(std::string path, std::string text) {
    SourceUnit unit;
    unit.path = std::move(path);
    unit.text = std::move(text);
    unit.line_count = static_cast<int>(std::count(unit.text.begin(), unit.text.end(), '\n'));
    if (!unit.text.empty() && unit.text.back() != '\n') unit.line_count += 1;
    return unit;
}

SourceUnit load_source_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrCode::IoError, "cannot open source file", path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return make_source(path, buf.str());
}

const char* bin_op_text(BinOp op) {
    switch (op) {
    case BinOp::And: return "&";
    case BinOp::Or: return "|";
    case BinOp::Xor: return "^";
    case BinOp::LogAnd: return "&&";
    case BinOp::LogOr: return "||";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Shl: return "<<";
    case BinOp::Shr: return ">>";
    }
    return "?";
}

const char* un_op_text(UnOp op) {
    switch (op) {
    case UnOp::BitNot: return "~";
    case UnOp::LogNot: return "!";
    case UnOp::Neg: return "-";
    case UnOp::RedAnd: return "&";
    case UnOp::RedOr: return "|";
    case UnOp::RedXor: return "^";
    }
    return "?";
}

ExprPtr clone_expr(const Expr& e) {
    auto out = std::make_unique<Expr>();
    out->kind = e.kind;
    out->span = e.span;
    out->ident = e.ident;
    out->lit_value = e.lit_value;
    out->lit_sized = e.lit_sized;
    out->lit_fill = e.lit_fill;
    out->lit_care = e.lit_care;
    out->lit_text = e.lit_text;
    out->un_op = e.un_op;
    out->bin_op = e.bin_op;
    out->op_span = e.op_span;
    out->repl_count = e.repl_count;
    out->args.reserve(e.args.size());
    for (const auto& a : e.args) out->args.push_back(clone_expr(*a));
    return out;
}

void collect_idents(const Expr& e, std::vector<std::string>& out) {
    if (e.kind == ExprKind::Ident || e.kind == ExprKind::BitSelect ||
        e.kind == ExprKind::PartSelect) {
        if (std::find(out.begin(), out.end(), e.ident) == out.end()) out.push_back(e.ident);
    }
    for (const auto& a : e.args) collect_idents(*a, out);
}

const ModuleDecl* DesignAST::find_module(const std::string& name) const {
    for (const auto& m : modules)
        if (m.name == name) return &m;
    return nullptr;
}

} // namespace blockloc
