#include "blockloc/elaborate.hpp"

#include <algorithm>

#include "blockloc/diag.hpp"

namespace blockloc {

namespace {

void sort_unique(std::vector<SigId>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

void push_unique(std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

class Elaborator {
public:
    Elaborator(const DesignAST& ast, DesignHierarchy& out) : ast_(ast), out_(out) {}

    void run(const std::string& top) {
        const ModuleDecl* mod = ast_.find_module(top);
        if (!mod) raise(ErrCode::UnknownModule, "top module '" + top + "' is not declared");
        out_.top = top;
        std::vector<std::string> stack;
        instantiate(*mod, top, {}, -1, stack);
        resolve_statements();
    }

private:
    const DesignAST& ast_;
    DesignHierarchy& out_;

    SigId add_signal(const std::string& inst_path, const std::string& local, int width,
                     bool is_port, PortDir dir) {
        std::string hier = inst_path + "." + local;
        if (out_.signal_index.count(hier))
            raise(ErrCode::SyntaxError, "duplicate declaration of '" + hier + "'");
        SignalRef ref;
        ref.hier_name = hier;
        ref.local_name = local;
        ref.instance_path = inst_path;
        ref.width = width;
        ref.is_port = is_port;
        ref.dir = dir;
        SigId id = static_cast<SigId>(out_.signals.size());
        out_.signals.push_back(std::move(ref));
        out_.signal_index.emplace(hier, id);
        return id;
    }

    int width_of(const ExprPtr& msb, const ExprPtr& lsb,
                 const std::map<std::string, int64_t>& params, const std::string& file) {
        if (!msb) return 1;
        int64_t m = const_eval(*msb, params, file);
        int64_t l = lsb ? const_eval(*lsb, params, file) : 0;
        if (m < l)
            raise(ErrCode::UnsupportedConstruct, "descending ranges only ([msb:lsb], msb >= lsb)",
                  file, msb->span.line);
        int64_t w = m - l + 1;
        if (w <= 0 || w > 4096) raise(ErrCode::UnsupportedConstruct, "bad range width", file);
        return static_cast<int>(w);
    }

    void instantiate(const ModuleDecl& mod, const std::string& path,
                     std::map<std::string, int64_t> overrides, int parent,
                     std::vector<std::string>& stack) {
        if (std::find(stack.begin(), stack.end(), mod.name) != stack.end())
            raise(ErrCode::RecursiveInstantiation, "module '" + mod.name + "' at " + path);
        stack.push_back(mod.name);

        InstanceNode node;
        node.path = path;
        node.module = &mod;
        node.parent = parent;
        for (const auto& p : mod.params) node.params[p.name] = p.value;
        for (const auto& [name, value] : overrides) {
            auto it = node.params.find(name);
            if (it == node.params.end())
                raise(ErrCode::UnresolvedIdentifier,
                      "parameter override '" + name + "' names no parameter of '" + mod.name + "'",
                      mod.file);
            bool is_local = false;
            for (const auto& p : mod.params)
                if (p.name == name && p.local) is_local = true;
            if (is_local)
                raise(ErrCode::UnsupportedConstruct, "override of localparam '" + name + "'",
                      mod.file);
            it->second = value;
        }
        int self = static_cast<int>(out_.instances.size());
        out_.instances.push_back(node);
        out_.instance_index.emplace(path, self);
        // instances vector grows during recursion; keep a stable copy
        const std::map<std::string, int64_t> params = out_.instances[self].params;

        for (const auto& port : mod.ports)
            add_signal(path, port.name, width_of(port.msb, port.lsb, params, mod.file), true,
                       port.dir);
        for (const auto& net : mod.nets) {
            bool is_port = false;
            for (const auto& port : mod.ports)
                if (port.name == net.name) is_port = true;
            if (is_port) continue; // `logic [7:0] x;` re-declaring an ANSI port
            add_signal(path, net.name, width_of(net.msb, net.lsb, params, mod.file), false,
                       PortDir::Input);
        }

        for (const auto& assign : mod.assigns) {
            ElabStatement st;
            st.kind = StatementKind::ContinuousAssign;
            st.instance_path = path;
            st.module = &mod;
            st.assign = &assign;
            st.span = assign.span;
            st.file = mod.file;
            out_.statements.push_back(std::move(st));
        }
        for (const auto& blk : mod.always_blocks) {
            ElabStatement st;
            st.kind = StatementKind::AlwaysBlock;
            st.instance_path = path;
            st.module = &mod;
            st.always = &blk;
            st.span = blk.span;
            st.file = mod.file;
            st.clocked = blk.clocked;
            out_.statements.push_back(std::move(st));
        }

        for (const auto& inst : mod.instances) {
            const ModuleDecl* child = ast_.find_module(inst.module_name);
            if (!child)
                raise(ErrCode::UnknownModule,
                      "module '" + inst.module_name + "' instantiated at " + path + "." +
                          inst.instance_name,
                      mod.file, inst.span.line);
            std::map<std::string, int64_t> child_overrides;
            for (const auto& [k, v] : inst.param_overrides) child_overrides[k] = v;
            std::string child_path = path + "." + inst.instance_name;
            instantiate(*child, child_path, std::move(child_overrides), self, stack);

            for (const auto& conn : inst.connections) {
                const PortDecl* port = nullptr;
                for (const auto& p : child->ports)
                    if (p.name == conn.port) port = &p;
                if (!port)
                    raise(ErrCode::UnresolvedIdentifier,
                          "connection names no port '" + conn.port + "' of '" + child->name + "'",
                          mod.file, conn.span.line);
                if (port->dir == PortDir::Inout)
                    raise(ErrCode::UnsupportedConstruct, "inout port connection", mod.file,
                          conn.span.line);
                if (!conn.actual) continue; // explicitly unconnected
                Connection c;
                c.child_port = out_.require_signal(child_path + "." + conn.port);
                c.dir = port->dir;
                c.instance_path = child_path;
                c.span = conn.span;
                c.file = mod.file;
                if (conn.actual->kind == ExprKind::Literal) {
                    if (port->dir == PortDir::Output)
                        raise(ErrCode::UnsupportedConstruct,
                              "literal connected to output port '" + conn.port + "'", mod.file,
                              conn.span.line);
                    c.const_actual =
                        sv_resize(conn.actual->lit_value, out_.sig(c.child_port).width);
                } else {
                    const std::string& name = conn.actual->ident;
                    SigId sid = out_.resolve_local(path, name);
                    if (sid == kNoSignal) {
                        auto pit = params.find(name);
                        if (pit != params.end() && port->dir == PortDir::Input) {
                            c.const_actual = SignalValue::from_uint(
                                static_cast<uint64_t>(pit->second), out_.sig(c.child_port).width);
                        } else {
                            raise(ErrCode::UnresolvedIdentifier,
                                  "connection actual '" + name + "' does not resolve in " + path,
                                  mod.file, conn.span.line);
                        }
                    } else {
                        c.parent = sid;
                    }
                }
                out_.connections.push_back(std::move(c));
            }
        }
        stack.pop_back();
    }

    // ---- statement resolution: sites, guard paths, signal sets ----

    SigId resolve_or_param(const ElabStatement& st, const std::string& name, bool* is_param) {
        SigId sid = out_.resolve_local(st.instance_path, name);
        if (sid != kNoSignal) {
            if (is_param) *is_param = false;
            return sid;
        }
        const auto& params = out_.instances[out_.instance_index.at(st.instance_path)].params;
        if (params.count(name)) {
            if (is_param) *is_param = true;
            return kNoSignal;
        }
        raise(ErrCode::UnresolvedIdentifier, "'" + name + "' does not resolve in " +
                                                 st.instance_path,
              st.file, st.span.line);
    }

    std::vector<std::string> signal_reads(const ElabStatement& st, const Expr& e) {
        std::vector<std::string> names;
        collect_idents(e, names);
        std::vector<std::string> out;
        for (const auto& n : names) {
            bool is_param = false;
            resolve_or_param(st, n, &is_param);
            if (!is_param) push_unique(out, n);
        }
        return out;
    }

    void walk_stmt(ElabStatement& st, const Stmt& s, std::vector<Guard>& guards,
                   std::vector<std::string>& cond_locals) {
        switch (s.kind) {
        case StmtKind::Null:
            return;
        case StmtKind::Block:
            for (const auto& sub : s.stmts) walk_stmt(st, *sub, guards, cond_locals);
            return;
        case StmtKind::If: {
            for (const auto& n : signal_reads(st, *s.cond)) push_unique(cond_locals, n);
            guards.push_back({Guard::Kind::ExprTrue, s.cond.get(), nullptr, -1});
            if (s.then_branch) walk_stmt(st, *s.then_branch, guards, cond_locals);
            guards.pop_back();
            if (s.else_branch) {
                guards.push_back({Guard::Kind::ExprFalse, s.cond.get(), nullptr, -1});
                walk_stmt(st, *s.else_branch, guards, cond_locals);
                guards.pop_back();
            }
            return;
        }
        case StmtKind::Case: {
            for (const auto& n : signal_reads(st, *s.case_expr)) push_unique(cond_locals, n);
            for (const auto& item : s.items)
                for (const auto& pat : item.patterns) {
                    if (s.case_kind != CaseKind::Plain && pat->kind != ExprKind::Literal)
                        raise(ErrCode::UnsupportedConstruct,
                              "casez/casex pattern must be a literal", st.file, pat->span.line);
                    for (const auto& n : signal_reads(st, *pat)) push_unique(cond_locals, n);
                }
            // priority desugar: item k fires when items 0..k-1 do not match and k does
            for (size_t k = 0; k < s.items.size(); ++k) {
                size_t base = guards.size();
                for (size_t j = 0; j < k; ++j) {
                    if (s.items[j].is_default) continue;
                    guards.push_back(
                        {Guard::Kind::CaseItemNoMatch, nullptr, &s, static_cast<int>(j)});
                }
                if (!s.items[k].is_default)
                    guards.push_back(
                        {Guard::Kind::CaseItemMatch, nullptr, &s, static_cast<int>(k)});
                if (s.items[k].body) walk_stmt(st, *s.items[k].body, guards, cond_locals);
                guards.resize(base);
            }
            return;
        }
        case StmtKind::Assign: {
            AssignmentSite site;
            site.target_local = s.lhs.name;
            site.stmt = &s;
            site.guards = guards;
            site.span = s.span;
            site.rhs_local_reads = signal_reads(st, *s.rhs);
            if (s.lhs.index)
                for (const auto& n : signal_reads(st, *s.lhs.index))
                    push_unique(site.rhs_local_reads, n);
            bool is_param = false;
            site.target = resolve_or_param(st, s.lhs.name, &is_param);
            if (is_param)
                raise(ErrCode::UnresolvedIdentifier,
                      "assignment target '" + s.lhs.name + "' is a parameter", st.file,
                      s.span.line);
            st.sites.push_back(std::move(site));
            return;
        }
        }
    }

    void resolve_statements() {
        for (auto& st : out_.statements) {
            std::vector<std::string> cond_locals;
            if (st.kind == StatementKind::ContinuousAssign) {
                AssignmentSite site;
                site.target_local = st.assign->lhs.name;
                site.assign = st.assign;
                site.span = st.assign->span;
                site.rhs_local_reads = signal_reads(st, *st.assign->rhs);
                if (st.assign->lhs.index)
                    for (const auto& n : signal_reads(st, *st.assign->lhs.index))
                        push_unique(site.rhs_local_reads, n);
                bool is_param = false;
                site.target = resolve_or_param(st, st.assign->lhs.name, &is_param);
                if (is_param)
                    raise(ErrCode::UnresolvedIdentifier,
                          "assignment target '" + st.assign->lhs.name + "' is a parameter",
                          st.file, st.span.line);
                st.sites.push_back(std::move(site));
            } else {
                if (st.clocked) {
                    bool is_param = false;
                    st.clock_signal =
                        resolve_or_param(st, st.always->clock_edge_signal, &is_param);
                    if (is_param || st.clock_signal == kNoSignal)
                        raise(ErrCode::UnresolvedIdentifier,
                              "clock '" + st.always->clock_edge_signal + "' does not resolve",
                              st.file, st.span.line);
                }
                std::vector<Guard> guards;
                walk_stmt(st, *st.always->body, guards, cond_locals);
            }
            for (const auto& site : st.sites) {
                st.lhs_signals.push_back(site.target);
                for (const auto& r : site.rhs_local_reads)
                    st.rhs_signals.push_back(out_.resolve_local(st.instance_path, r));
            }
            for (const auto& c : cond_locals)
                st.condition_signals.push_back(out_.resolve_local(st.instance_path, c));
            sort_unique(st.lhs_signals);
            sort_unique(st.rhs_signals);
            sort_unique(st.condition_signals);
        }
    }
};

} // namespace

SigId DesignHierarchy::find_signal(const std::string& hier_name) const {
    auto it = signal_index.find(hier_name);
    return it == signal_index.end() ? kNoSignal : it->second;
}

SigId DesignHierarchy::require_signal(const std::string& hier_name) const {
    SigId id = find_signal(hier_name);
    if (id == kNoSignal)
        raise(ErrCode::UnresolvedIdentifier, "no signal named '" + hier_name + "'");
    return id;
}

SigId DesignHierarchy::resolve_local(const std::string& instance_path,
                                     const std::string& local) const {
    return find_signal(instance_path + "." + local);
}

const InstanceNode* DesignHierarchy::find_instance(const std::string& path) const {
    auto it = instance_index.find(path);
    return it == instance_index.end() ? nullptr : &instances[it->second];
}

int64_t const_eval(const Expr& e, const std::map<std::string, int64_t>& params,
                   const std::string& file) {
    switch (e.kind) {
    case ExprKind::Literal:
        if (e.lit_value.has_unknown())
            raise(ErrCode::UnsupportedConstruct, "x/z literal in constant expression", file,
                  e.span.line);
        return static_cast<int64_t>(e.lit_value.to_uint());
    case ExprKind::Ident: {
        auto it = params.find(e.ident);
        if (it == params.end())
            raise(ErrCode::UnsupportedConstruct,
                  "'" + e.ident + "' is not a parameter; ranges must be constant", file,
                  e.span.line);
        return it->second;
    }
    case ExprKind::Unary: {
        int64_t v = const_eval(*e.args[0], params, file);
        switch (e.un_op) {
        case UnOp::Neg: return -v;
        case UnOp::BitNot: return ~v;
        case UnOp::LogNot: return v == 0 ? 1 : 0;
        default:
            raise(ErrCode::UnsupportedConstruct, "reduction in constant expression", file,
                  e.span.line);
        }
    }
    case ExprKind::Binary: {
        int64_t a = const_eval(*e.args[0], params, file);
        int64_t b = const_eval(*e.args[1], params, file);
        switch (e.bin_op) {
        case BinOp::Add: return a + b;
        case BinOp::Sub: return a - b;
        case BinOp::Mul: return a * b;
        case BinOp::Div:
            if (b == 0) raise(ErrCode::UnsupportedConstruct, "constant division by zero", file);
            return a / b;
        case BinOp::Mod:
            if (b == 0) raise(ErrCode::UnsupportedConstruct, "constant modulo by zero", file);
            return a % b;
        case BinOp::Shl: return a << b;
        case BinOp::Shr: return static_cast<int64_t>(static_cast<uint64_t>(a) >> b);
        default:
            raise(ErrCode::UnsupportedConstruct, "operator in constant expression", file,
                  e.span.line);
        }
    }
    default:
        raise(ErrCode::UnsupportedConstruct, "non-constant expression in range", file,
              e.span.line);
    }
}

DesignHierarchy elaborate(const DesignAST& ast, const std::string& top) {
    DesignHierarchy out;
    Elaborator e(ast, out);
    e.run(top);
    return out;
}

} // namespace blockloc
