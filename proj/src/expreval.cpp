#include "blockloc/expreval.hpp"

#include <algorithm>

#include "blockloc/diag.hpp"

namespace blockloc {

namespace {

int natural_width(const Expr& e, const EvalEnv& env);

int select_bounds(const Expr& e, const EvalEnv& env, int* lsb_out) {
    static const std::map<std::string, int64_t> empty;
    const auto& params = env.params ? *env.params : empty;
    int64_t msb = const_eval(*e.args[0], params, env.file);
    int64_t lsb = const_eval(*e.args[1], params, env.file);
    if (msb < lsb)
        raise(ErrCode::UnsupportedConstruct, "part-select must be [msb:lsb]", env.file,
              e.span.line);
    *lsb_out = static_cast<int>(lsb);
    return static_cast<int>(msb);
}

int natural_width(const Expr& e, const EvalEnv& env) {
    switch (e.kind) {
    case ExprKind::Ident:
        return env.lookup(e.ident).width();
    case ExprKind::Literal:
        return e.lit_fill ? 1 : e.lit_value.width();
    case ExprKind::BitSelect:
        return 1;
    case ExprKind::PartSelect: {
        int lsb = 0;
        int msb = select_bounds(e, env, &lsb);
        return msb - lsb + 1;
    }
    case ExprKind::Unary:
        if (e.un_op == UnOp::LogNot || e.un_op == UnOp::RedAnd || e.un_op == UnOp::RedOr ||
            e.un_op == UnOp::RedXor)
            return 1;
        return natural_width(*e.args[0], env);
    case ExprKind::Binary:
        switch (e.bin_op) {
        case BinOp::LogAnd:
        case BinOp::LogOr:
        case BinOp::Eq:
        case BinOp::Ne:
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge:
            return 1;
        case BinOp::Shl:
        case BinOp::Shr:
            return natural_width(*e.args[0], env);
        default:
            return std::max(natural_width(*e.args[0], env), natural_width(*e.args[1], env));
        }
    case ExprKind::Ternary:
        return std::max(natural_width(*e.args[1], env), natural_width(*e.args[2], env));
    case ExprKind::Concat: {
        int total = 0;
        for (const auto& a : e.args) total += natural_width(*a, env);
        return total;
    }
    case ExprKind::Replicate:
        return static_cast<int>(e.repl_count) * natural_width(*e.args[0], env);
    }
    return 1;
}

} // namespace

SignalValue eval_expr(const Expr& e, const EvalEnv& env, int ctx_width) {
    switch (e.kind) {
    case ExprKind::Literal: {
        if (e.lit_fill) {
            int w = ctx_width > 0 ? ctx_width : 1;
            return SignalValue(w, e.lit_value.bit(0));
        }
        return e.lit_value;
    }
    case ExprKind::Ident: {
        if (env.params) {
            auto it = env.params->find(e.ident);
            if (it != env.params->end())
                return SignalValue::from_uint(static_cast<uint64_t>(it->second),
                                              ctx_width > 0 ? ctx_width : 32);
        }
        return env.lookup(e.ident);
    }
    case ExprKind::BitSelect: {
        SignalValue base = env.lookup(e.ident);
        SignalValue idx = eval_expr(*e.args[0], env);
        if (idx.has_unknown()) return SignalValue(1, Bit::X);
        uint64_t i = idx.to_uint();
        SignalValue out(1, Bit::X);
        if (i < static_cast<uint64_t>(base.width())) out.set_bit(0, base.bit(static_cast<int>(i)));
        return out;
    }
    case ExprKind::PartSelect: {
        SignalValue base = env.lookup(e.ident);
        int lsb = 0;
        int msb = select_bounds(e, env, &lsb);
        return sv_select(base, msb, lsb);
    }
    case ExprKind::Unary: {
        int operand_ctx = (e.un_op == UnOp::BitNot || e.un_op == UnOp::Neg) ? ctx_width : 0;
        SignalValue a = eval_expr(*e.args[0], env, operand_ctx);
        switch (e.un_op) {
        case UnOp::BitNot: return sv_not(a);
        case UnOp::LogNot: return sv_logical_not(a);
        case UnOp::Neg: return sv_neg(a);
        case UnOp::RedAnd: return sv_reduce_and(a);
        case UnOp::RedOr: return sv_reduce_or(a);
        case UnOp::RedXor: return sv_reduce_xor(a);
        }
        break;
    }
    case ExprKind::Binary: {
        // give fill literals the width of the other operand
        int lhs_ctx = 0, rhs_ctx = 0;
        bool lhs_fill = e.args[0]->kind == ExprKind::Literal && e.args[0]->lit_fill;
        bool rhs_fill = e.args[1]->kind == ExprKind::Literal && e.args[1]->lit_fill;
        if (lhs_fill && !rhs_fill) lhs_ctx = natural_width(*e.args[1], env);
        if (rhs_fill && !lhs_fill) rhs_ctx = natural_width(*e.args[0], env);
        switch (e.bin_op) {
        case BinOp::And:
        case BinOp::Or:
        case BinOp::Xor:
        case BinOp::Add:
        case BinOp::Sub:
        case BinOp::Mul:
        case BinOp::Div:
        case BinOp::Mod:
            if (!lhs_ctx) lhs_ctx = ctx_width;
            if (!rhs_ctx) rhs_ctx = ctx_width;
            break;
        default:
            break;
        }
        SignalValue a = eval_expr(*e.args[0], env, lhs_ctx);
        SignalValue b = eval_expr(*e.args[1], env, rhs_ctx);
        switch (e.bin_op) {
        case BinOp::And: return sv_and(a, b);
        case BinOp::Or: return sv_or(a, b);
        case BinOp::Xor: return sv_xor(a, b);
        case BinOp::LogAnd: return sv_logical_and(a, b);
        case BinOp::LogOr: return sv_logical_or(a, b);
        case BinOp::Eq: return sv_eq(a, b);
        case BinOp::Ne: return sv_ne(a, b);
        case BinOp::Lt: return sv_lt(a, b);
        case BinOp::Le: return sv_le(a, b);
        case BinOp::Gt: return sv_gt(a, b);
        case BinOp::Ge: return sv_ge(a, b);
        case BinOp::Add: return sv_add(a, b);
        case BinOp::Sub: return sv_sub(a, b);
        case BinOp::Mul: return sv_mul(a, b);
        case BinOp::Div: return sv_div(a, b);
        case BinOp::Mod: return sv_mod(a, b);
        case BinOp::Shl: return sv_shl(a, b);
        case BinOp::Shr: return sv_shr(a, b);
        }
        break;
    }
    case ExprKind::Ternary: {
        SignalValue cond = eval_expr(*e.args[0], env);
        int w = std::max(natural_width(*e.args[1], env), natural_width(*e.args[2], env));
        if (ctx_width > 0) w = std::max(w, ctx_width);
        Bit t = cond.truth();
        if (t == Bit::One) return sv_resize(eval_expr(*e.args[1], env, w), w);
        if (t == Bit::Zero) return sv_resize(eval_expr(*e.args[2], env, w), w);
        return SignalValue(w, Bit::X);
    }
    case ExprKind::Concat: {
        std::vector<SignalValue> parts;
        parts.reserve(e.args.size());
        for (const auto& a : e.args) parts.push_back(eval_expr(*a, env));
        return sv_concat(parts);
    }
    case ExprKind::Replicate: {
        if (e.repl_count <= 0 || e.repl_count > 4096)
            raise(ErrCode::UnsupportedOperator, "replication count out of range", env.file,
                  e.span.line);
        SignalValue part = eval_expr(*e.args[0], env);
        std::vector<SignalValue> parts(static_cast<size_t>(e.repl_count), part);
        return sv_concat(parts);
    }
    }
    raise(ErrCode::UnsupportedOperator, "expression kind not supported", env.file, e.span.line);
}

namespace {

Bit case_item_match(const Stmt& case_stmt, int item_index, const EvalEnv& env) {
    const CaseItem& item = case_stmt.items[static_cast<size_t>(item_index)];
    SignalValue subject = eval_expr(*case_stmt.case_expr, env);
    Bit acc = Bit::Zero;
    bool any_unknown = false;
    for (const auto& pat : item.patterns) {
        SignalValue result;
        if (case_stmt.case_kind == CaseKind::Plain) {
            SignalValue pv = eval_expr(*pat, env);
            result = sv_eq(subject, pv);
        } else {
            // literal patterns only (enforced at elaboration); z/? wildcards
            // for casez, x too for casex
            std::vector<bool> care = pat->lit_care;
            if (care.empty()) care.assign(static_cast<size_t>(pat->lit_value.width()), true);
            if (case_stmt.case_kind == CaseKind::CaseX)
                for (int i = 0; i < pat->lit_value.width(); ++i)
                    if (pat->lit_value.bit(i) == Bit::X) care[static_cast<size_t>(i)] = false;
            result = sv_wildcard_eq(subject, pat->lit_value, care);
        }
        Bit b = result.bit(0);
        if (b == Bit::One) return Bit::One;
        if (b != Bit::Zero) any_unknown = true;
    }
    return any_unknown ? Bit::X : acc;
}

} // namespace

Bit eval_guard(const Guard& g, const EvalEnv& env) {
    switch (g.kind) {
    case Guard::Kind::ExprTrue: {
        return eval_expr(*g.cond, env).truth();
    }
    case Guard::Kind::ExprFalse: {
        Bit t = eval_expr(*g.cond, env).truth();
        if (t == Bit::One) return Bit::Zero;
        if (t == Bit::Zero) return Bit::One;
        return Bit::X;
    }
    case Guard::Kind::CaseItemMatch:
        return case_item_match(*g.case_stmt, g.item_index, env);
    case Guard::Kind::CaseItemNoMatch: {
        Bit m = case_item_match(*g.case_stmt, g.item_index, env);
        if (m == Bit::One) return Bit::Zero;
        if (m == Bit::Zero) return Bit::One;
        return Bit::X;
    }
    }
    return Bit::X;
}

SignalValue eval_expr_at(const Expr& e, const DesignHierarchy& design,
                         const std::string& instance_path, const Waveform& w, int t) {
    const InstanceNode* inst = design.find_instance(instance_path);
    EvalEnv env;
    env.params = inst ? &inst->params : nullptr;
    env.file = inst && inst->module ? inst->module->file : "";
    env.lookup = [&](const std::string& local) {
        return w.value_at(instance_path + "." + local, t);
    };
    return eval_expr(e, env);
}

} // namespace blockloc
