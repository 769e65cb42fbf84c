#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "blockloc/ast.hpp"

namespace blockloc {

using SigId = int;
constexpr SigId kNoSignal = -1;

/// Flattened signal: `hier_name` is the dot-separated instance path plus the
/// local name and resolves to exactly one declaration.
struct SignalRef {
    std::string hier_name;
    std::string local_name;
    std::string instance_path;
    int width = 1;
    bool is_port = false;
    PortDir dir = PortDir::Input;
};

/// One guard dominating an assignment. Case items carry the case statement
/// so evaluators can replay wildcard matching without synthetic ASTs.
struct Guard {
    enum class Kind { ExprTrue, ExprFalse, CaseItemMatch, CaseItemNoMatch };
    Kind kind;
    const Expr* cond = nullptr;       // ExprTrue/ExprFalse
    const Stmt* case_stmt = nullptr;  // CaseItem*
    int item_index = -1;
};

/// One assignment inside an elaborated statement, with the guard path that
/// dominates it.
struct AssignmentSite {
    SigId target = kNoSignal;
    std::string target_local;
    const Stmt* stmt = nullptr;            // Assign stmt (always blocks)
    const ContinuousAssign* assign = nullptr; // continuous assigns
    std::vector<Guard> guards;
    std::vector<std::string> rhs_local_reads; // appearance order, deduped
    Span span;
};

enum class StatementKind { ContinuousAssign, AlwaysBlock };

/// Statement elaborated into one instance context.
struct ElabStatement {
    StatementKind kind;
    std::string instance_path;
    const ModuleDecl* module = nullptr;
    const ContinuousAssign* assign = nullptr;
    const AlwaysBlock* always = nullptr;
    Span span;
    std::string file;
    bool clocked = false;
    SigId clock_signal = kNoSignal;

    std::vector<AssignmentSite> sites;
    std::vector<SigId> lhs_signals;       // sorted unique
    std::vector<SigId> rhs_signals;       // sorted unique
    std::vector<SigId> condition_signals; // sorted unique
};

struct Connection {
    SigId parent = kNoSignal; // kNoSignal when the actual is a literal
    std::optional<SignalValue> const_actual;
    SigId child_port = kNoSignal;
    PortDir dir = PortDir::Input;
    std::string instance_path; // child instance
    Span span;                 // the .port(actual) text at the instantiation site
    std::string file;
};

struct InstanceNode {
    std::string path;
    const ModuleDecl* module = nullptr;
    int parent = -1;
    std::map<std::string, int64_t> params;
};

class DesignHierarchy {
public:
    std::string top;
    std::vector<InstanceNode> instances;
    std::vector<SignalRef> signals;
    std::vector<ElabStatement> statements;
    std::vector<Connection> connections;

    SigId find_signal(const std::string& hier_name) const;
    SigId require_signal(const std::string& hier_name) const;
    const SignalRef& sig(SigId id) const { return signals[id]; }
    SigId resolve_local(const std::string& instance_path, const std::string& local) const;
    const InstanceNode* find_instance(const std::string& path) const;

    // populated by elaborate()
    std::unordered_map<std::string, SigId> signal_index;
    std::unordered_map<std::string, int> instance_index;
};

DesignHierarchy elaborate(const DesignAST& ast, const std::string& top);

/// Constant-fold an expression over a parameter environment; raises
/// UnsupportedConstruct when the expression is not compile-time constant.
int64_t const_eval(const Expr& e, const std::map<std::string, int64_t>& params,
                   const std::string& file);

} // namespace blockloc
