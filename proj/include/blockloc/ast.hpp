#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "blockloc/fourstate.hpp"
#include "blockloc/source.hpp"

namespace blockloc {

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

enum class ExprKind {
    Ident,
    Literal,
    Unary,
    Binary,
    Ternary,
    Concat,
    Replicate,
    BitSelect,  // base[index]
    PartSelect, // base[msb:lsb], constant bounds
};

enum class UnOp { BitNot, LogNot, Neg, RedAnd, RedOr, RedXor };

enum class BinOp {
    And, Or, Xor,
    LogAnd, LogOr,
    Eq, Ne, Lt, Le, Gt, Ge,
    Add, Sub, Mul, Div, Mod,
    Shl, Shr,
};

const char* bin_op_text(BinOp op);
const char* un_op_text(UnOp op);

struct Expr {
    ExprKind kind;
    Span span;

    // Ident / select base
    std::string ident;

    // Literal
    SignalValue lit_value;        // bit pattern; width 0 for unsized fill forms
    bool lit_sized = false;
    bool lit_fill = false;        // '0 / '1: stretches to the context width
    std::vector<bool> lit_care;   // wildcard mask for case patterns ('?'/z/x); empty = all care
    std::string lit_text;

    UnOp un_op{};
    BinOp bin_op{};
    Span op_span; // operator token (mutation site)

    int64_t repl_count = 0;

    std::vector<ExprPtr> args; // operands / parts / select index or bounds
};

ExprPtr clone_expr(const Expr& e);
/// Collect identifier names read by the expression (select indices included),
/// in source-appearance order, deduplicated.
void collect_idents(const Expr& e, std::vector<std::string>& out);

enum class StmtKind { Block, If, Case, Assign, Null };
enum class CaseKind { Plain, CaseZ, CaseX };

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct CaseItem {
    std::vector<ExprPtr> patterns; // empty when is_default
    bool is_default = false;
    StmtPtr body;
    Span span;
};

struct LValue {
    std::string name;
    ExprPtr index;                // bit select target, null if none
    std::optional<int64_t> msb;  // part-select constants
    std::optional<int64_t> lsb;
    Span span;
};

struct Stmt {
    StmtKind kind;
    Span span;

    std::vector<StmtPtr> stmts; // Block

    ExprPtr cond; // If
    StmtPtr then_branch;
    StmtPtr else_branch;

    ExprPtr case_expr; // Case
    CaseKind case_kind = CaseKind::Plain;
    std::vector<CaseItem> items;

    // Assign
    bool nonblocking = false;
    LValue lhs;
    ExprPtr rhs;
};

enum class PortDir { Input, Output, Inout };

struct PortDecl {
    std::string name;
    PortDir dir = PortDir::Input;
    ExprPtr msb; // null for 1-bit
    ExprPtr lsb;
    Span span;
};

struct NetDecl {
    std::string name;
    ExprPtr msb;
    ExprPtr lsb;
    Span span;
};

struct ParamDecl {
    std::string name;
    int64_t value = 0;
    bool local = false;
    Span span;
};

struct ContinuousAssign {
    LValue lhs;
    ExprPtr rhs;
    Span span; // 'assign' through ';'
};

struct AlwaysBlock {
    bool clocked = false;
    bool comb = false; // always_comb / always @(*)
    std::string clock_edge_signal;
    StmtPtr body;
    Span span;
};

struct PortConnection {
    std::string port;
    ExprPtr actual; // identifier or literal; null when left unconnected
    Span span;      // the `.port(actual)` text
};

struct InstanceDecl {
    std::string module_name;
    std::string instance_name;
    std::vector<std::pair<std::string, int64_t>> param_overrides;
    std::vector<PortConnection> connections;
    Span span;
};

/// Items appear in source order; `order` indices give the original interleaving.
struct ModuleDecl {
    std::string name;
    std::string file;
    Span span;
    std::vector<PortDecl> ports;
    std::vector<NetDecl> nets;
    std::vector<ParamDecl> params;
    std::vector<ContinuousAssign> assigns;
    std::vector<AlwaysBlock> always_blocks;
    std::vector<InstanceDecl> instances;
};

struct DesignAST {
    std::vector<SourceUnit> sources;
    std::vector<ModuleDecl> modules;

    const ModuleDecl* find_module(const std::string& name) const;
};

} // namespace blockloc
