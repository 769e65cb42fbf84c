#include "blockloc/parser.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "blockloc/diag.hpp"
#include "lexer.hpp"

namespace blockloc {

namespace {

const std::unordered_set<std::string> kUnsupportedKeywords = {
    "class",     "interface", "generate",  "genvar",   "function", "task",
    "initial",   "final",     "package",   "program",  "typedef",  "struct",
    "enum",      "union",     "always_latch", "forever", "repeat", "while",
    "for",       "foreach",   "do",        "fork",     "join",     "signed",
    "integer",   "real",      "string",    "event",    "specify",  "primitive",
    "modport",   "clocking",  "property",  "sequence", "assert",   "covergroup",
};

const std::unordered_set<std::string> kKeywords = {
    "module", "endmodule", "input", "output", "inout", "wire", "logic", "reg",
    "assign", "always", "always_ff", "always_comb", "begin", "end", "if", "else",
    "case", "casez", "casex", "endcase", "default", "posedge", "negedge",
    "parameter", "localparam",
};

SignalValue parse_based_value(const std::string& digits, char base, int width,
                              std::vector<bool>* care, const std::string& file, int line) {
    // Build the MSB-first bit string then let from_bin pad.
    std::string bits;
    auto push_nibble = [&](int v, int n) {
        for (int i = n - 1; i >= 0; --i) bits.push_back(((v >> i) & 1) ? '1' : '0');
    };
    switch (base) {
    case 'b':
        for (char ch : digits) {
            if (ch == '_') continue;
            if (ch == '?') {
                bits.push_back('z');
            } else if (ch == '0' || ch == '1' || ch == 'x' || ch == 'X' || ch == 'z' ||
                       ch == 'Z') {
                bits.push_back(static_cast<char>(std::tolower(ch)));
            } else {
                raise(ErrCode::SyntaxError, "bad binary digit", file, line);
            }
        }
        break;
    case 'h':
        for (char ch : digits) {
            if (ch == '_') continue;
            char lc = static_cast<char>(std::tolower(ch));
            if (lc == 'x' || lc == 'z' || lc == '?') {
                char rep = lc == '?' ? 'z' : lc;
                for (int i = 0; i < 4; ++i) bits.push_back(rep);
            } else if (std::isdigit(static_cast<unsigned char>(lc))) {
                push_nibble(lc - '0', 4);
            } else if (lc >= 'a' && lc <= 'f') {
                push_nibble(lc - 'a' + 10, 4);
            } else {
                raise(ErrCode::SyntaxError, "bad hex digit", file, line);
            }
        }
        break;
    case 'o':
        for (char ch : digits) {
            if (ch == '_') continue;
            char lc = static_cast<char>(std::tolower(ch));
            if (lc == 'x' || lc == 'z' || lc == '?') {
                char rep = lc == '?' ? 'z' : lc;
                for (int i = 0; i < 3; ++i) bits.push_back(rep);
            } else if (lc >= '0' && lc <= '7') {
                push_nibble(lc - '0', 3);
            } else {
                raise(ErrCode::SyntaxError, "bad octal digit", file, line);
            }
        }
        break;
    case 'd': {
        uint64_t v = 0;
        for (char ch : digits) {
            if (ch == '_') continue;
            if (!std::isdigit(static_cast<unsigned char>(ch)))
                raise(ErrCode::SyntaxError, "bad decimal digit", file, line);
            v = v * 10 + static_cast<uint64_t>(ch - '0');
        }
        SignalValue sv = SignalValue::from_uint(v, width);
        if (care) care->assign(width, true);
        return sv;
    }
    default:
        raise(ErrCode::SyntaxError, "unknown literal base", file, line);
    }

    SignalValue sv = SignalValue::from_bin(bits, width);
    if (care) {
        care->assign(width, true);
        // z bits (and x for casex callers) become wildcards at case-desugar time;
        // record positions of z here so casez can mask them.
        for (int i = 0; i < width; ++i)
            if (sv.bit(i) == Bit::Z) (*care)[i] = false;
    }
    return sv;
}

class Parser {
public:
    Parser(const SourceUnit& unit) : unit_(unit), toks_(lex(unit)) {}

    void parse_into(DesignAST& ast) {
        while (!at_end()) {
            if (cur().kind == Tok::Directive) {
                if (cur().text == "timescale") {
                    // `timescale 1ns/1ps — consume to end of line
                    int line = cur().span.line;
                    next();
                    while (!at_end() && cur().span.line == line) next();
                    continue;
                }
                err_unsupported("`" + cur().text + " directive");
            }
            expect_kw("module");
            ast.modules.push_back(parse_module());
        }
    }

private:
    const SourceUnit& unit_;
    std::vector<Token> toks_;
    size_t idx_ = 0;

    const Token& cur() const { return toks_[idx_]; }
    const Token& peek(size_t n = 1) const {
        return toks_[std::min(idx_ + n, toks_.size() - 1)];
    }
    void next() {
        if (idx_ + 1 < toks_.size()) ++idx_;
    }
    bool at_end() const { return cur().kind == Tok::End; }

    [[noreturn]] void err_syntax(const std::string& expected) const {
        raise(ErrCode::SyntaxError,
              "expected " + expected + ", found '" + (at_end() ? "<eof>" : cur().text) + "'",
              unit_.path, cur().span.line);
    }
    [[noreturn]] void err_unsupported(const std::string& construct) const {
        raise(ErrCode::UnsupportedConstruct, construct, unit_.path, cur().span.line);
    }

    void check_supported_ident() const {
        if (cur().kind == Tok::Ident && kUnsupportedKeywords.count(cur().text))
            err_unsupported("'" + cur().text + "'");
    }

    bool is_kw(const std::string& kw) const { return cur().kind == Tok::Ident && cur().text == kw; }
    bool is_punct(const std::string& p) const {
        return cur().kind == Tok::Punct && cur().text == p;
    }
    void expect_kw(const std::string& kw) {
        check_supported_ident();
        if (!is_kw(kw)) err_syntax("'" + kw + "'");
        next();
    }
    void expect_punct(const std::string& p) {
        if (!is_punct(p)) err_syntax("'" + p + "'");
        next();
    }
    std::string expect_ident() {
        check_supported_ident();
        if (cur().kind != Tok::Ident || kKeywords.count(cur().text)) err_syntax("identifier");
        std::string name = cur().text;
        next();
        return name;
    }

    Span span_from(const Span& start) const {
        Span s = start;
        const Span& prev = toks_[idx_ > 0 ? idx_ - 1 : 0].span;
        s.end_line = prev.end_line;
        s.end_col = prev.end_col;
        s.end_offset = prev.end_offset;
        return s;
    }

    // ---- expressions ----

    ExprPtr make_ident(const Token& tok) {
        auto e = std::make_unique<Expr>();
        e->kind = ExprKind::Ident;
        e->span = tok.span;
        e->ident = tok.text;
        return e;
    }

    ExprPtr parse_literal() {
        const Token tok = cur();
        next();
        auto e = std::make_unique<Expr>();
        e->kind = ExprKind::Literal;
        e->span = tok.span;
        e->lit_text = tok.text;
        const std::string& t = tok.text;
        size_t quote = t.find('\'');
        if (quote == std::string::npos) {
            uint64_t v = 0;
            for (char ch : t) {
                if (ch == '_') continue;
                v = v * 10 + static_cast<uint64_t>(ch - '0');
            }
            e->lit_value = SignalValue::from_uint(v, 32);
            e->lit_sized = false;
            e->lit_care.assign(32, true);
            return e;
        }
        std::string size_part = t.substr(0, quote);
        std::string rest = t.substr(quote + 1);
        if (rest.size() == 1 && (rest[0] == '0' || rest[0] == '1' || rest[0] == 'x' ||
                                 rest[0] == 'z' || rest[0] == 'X' || rest[0] == 'Z')) {
            // fill literal
            e->lit_fill = true;
            e->lit_value = SignalValue(1, bit_from_char(rest[0]));
            e->lit_sized = false;
            e->lit_care.assign(1, rest[0] == '0' || rest[0] == '1');
            return e;
        }
        if (rest.empty()) err_syntax("literal digits");
        char base = static_cast<char>(std::tolower(rest[0]));
        std::string digits = rest.substr(1);
        int width = 32;
        e->lit_sized = !size_part.empty();
        if (!size_part.empty()) {
            width = 0;
            for (char ch : size_part) {
                if (ch == '_') continue;
                width = width * 10 + (ch - '0');
            }
            if (width <= 0 || width > 4096)
                raise(ErrCode::SyntaxError, "bad literal size", unit_.path, tok.span.line);
        } else if (base == 'b') {
            int n = 0;
            for (char ch : digits)
                if (ch != '_') ++n;
            width = std::max(1, n);
        } else if (base == 'h') {
            int n = 0;
            for (char ch : digits)
                if (ch != '_') ++n;
            width = std::max(1, n * 4);
        }
        e->lit_value = parse_based_value(digits, base, width, &e->lit_care, unit_.path,
                                         tok.span.line);
        return e;
    }

    ExprPtr parse_primary() {
        check_supported_ident();
        if (cur().kind == Tok::Number) return parse_literal();
        if (is_punct("(")) {
            next();
            ExprPtr e = parse_expr();
            expect_punct(")");
            return e;
        }
        if (is_punct("{")) {
            Span start = cur().span;
            next();
            // possible replication {N{expr}}
            if (cur().kind == Tok::Number && peek().kind == Tok::Punct && peek().text == "{") {
                ExprPtr count = parse_literal();
                expect_punct("{");
                auto e = std::make_unique<Expr>();
                e->kind = ExprKind::Replicate;
                e->repl_count = static_cast<int64_t>(count->lit_value.to_uint());
                e->args.push_back(parse_expr());
                expect_punct("}");
                expect_punct("}");
                e->span = span_from(start);
                return e;
            }
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::Concat;
            e->args.push_back(parse_expr());
            while (is_punct(",")) {
                next();
                e->args.push_back(parse_expr());
            }
            expect_punct("}");
            e->span = span_from(start);
            return e;
        }
        if (cur().kind == Tok::Ident && !kKeywords.count(cur().text)) {
            Token tok = cur();
            next();
            if (is_punct(".")) err_unsupported("hierarchical reference");
            if (is_punct("[")) {
                Span start = tok.span;
                next();
                ExprPtr first = parse_expr();
                if (is_punct(":")) {
                    next();
                    ExprPtr second = parse_expr();
                    expect_punct("]");
                    auto e = std::make_unique<Expr>();
                    e->kind = ExprKind::PartSelect;
                    e->ident = tok.text;
                    e->args.push_back(std::move(first));
                    e->args.push_back(std::move(second));
                    e->span = span_from(start);
                    return e;
                }
                if (is_punct("+:") || is_punct("-:")) err_unsupported("indexed part-select");
                expect_punct("]");
                auto e = std::make_unique<Expr>();
                e->kind = ExprKind::BitSelect;
                e->ident = tok.text;
                e->args.push_back(std::move(first));
                e->span = span_from(start);
                return e;
            }
            return make_ident(tok);
        }
        err_syntax("expression");
    }

    ExprPtr parse_unary() {
        static const struct {
            const char* text;
            UnOp op;
        } unops[] = {{"~", UnOp::BitNot}, {"!", UnOp::LogNot}, {"-", UnOp::Neg},
                     {"&", UnOp::RedAnd}, {"|", UnOp::RedOr},  {"^", UnOp::RedXor}};
        if (cur().kind == Tok::Punct) {
            for (const auto& u : unops) {
                if (cur().text == u.text) {
                    Span op_span = cur().span;
                    next();
                    auto e = std::make_unique<Expr>();
                    e->kind = ExprKind::Unary;
                    e->un_op = u.op;
                    e->op_span = op_span;
                    e->args.push_back(parse_unary());
                    e->span = op_span;
                    e->span.end_line = e->args[0]->span.end_line;
                    e->span.end_col = e->args[0]->span.end_col;
                    e->span.end_offset = e->args[0]->span.end_offset;
                    return e;
                }
            }
        }
        return parse_primary();
    }

    struct Level {
        std::vector<std::pair<const char*, BinOp>> ops;
    };

    // Precedence from loosest to tightest; parse_bin recurses downward.
    ExprPtr parse_bin(int level) {
        static const std::vector<Level> levels = {
            {{{"||", BinOp::LogOr}}},
            {{{"&&", BinOp::LogAnd}}},
            {{{"|", BinOp::Or}}},
            {{{"^", BinOp::Xor}}},
            {{{"&", BinOp::And}}},
            {{{"==", BinOp::Eq}, {"!=", BinOp::Ne}}},
            {{{"<", BinOp::Lt}, {"<=", BinOp::Le}, {">", BinOp::Gt}, {">=", BinOp::Ge}}},
            {{{"<<", BinOp::Shl}, {">>", BinOp::Shr}}},
            {{{"+", BinOp::Add}, {"-", BinOp::Sub}}},
            {{{"*", BinOp::Mul}, {"/", BinOp::Div}, {"%", BinOp::Mod}}},
        };
        if (level >= static_cast<int>(levels.size())) return parse_unary();
        ExprPtr lhs = parse_bin(level + 1);
        for (;;) {
            if (cur().kind != Tok::Punct) return lhs;
            if (cur().text == "===") err_unsupported("case equality operator");
            const BinOp* found = nullptr;
            for (const auto& [text, op] : levels[level].ops) {
                if (cur().text == text) {
                    found = &op;
                    break;
                }
            }
            if (!found) return lhs;
            Span op_span = cur().span;
            next();
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::Binary;
            e->bin_op = *found;
            e->op_span = op_span;
            e->span = lhs->span;
            e->args.push_back(std::move(lhs));
            e->args.push_back(parse_bin(level + 1));
            e->span.end_line = e->args[1]->span.end_line;
            e->span.end_col = e->args[1]->span.end_col;
            e->span.end_offset = e->args[1]->span.end_offset;
            lhs = std::move(e);
        }
    }

    ExprPtr parse_expr() {
        ExprPtr cond = parse_bin(0);
        if (is_punct("?")) {
            Span op_span = cur().span;
            next();
            auto e = std::make_unique<Expr>();
            e->kind = ExprKind::Ternary;
            e->op_span = op_span;
            e->span = cond->span;
            e->args.push_back(std::move(cond));
            e->args.push_back(parse_expr());
            expect_punct(":");
            e->args.push_back(parse_expr());
            e->span.end_line = e->args[2]->span.end_line;
            e->span.end_col = e->args[2]->span.end_col;
            e->span.end_offset = e->args[2]->span.end_offset;
            return e;
        }
        return cond;
    }

    // ---- statements ----

    LValue parse_lvalue() {
        LValue lv;
        Span start = cur().span;
        lv.name = expect_ident();
        if (is_punct("[")) {
            next();
            ExprPtr first = parse_expr();
            if (is_punct(":")) {
                next();
                ExprPtr second = parse_expr();
                expect_punct("]");
                if (first->kind != ExprKind::Literal || second->kind != ExprKind::Literal)
                    err_unsupported("non-literal part-select bound on assignment target");
                lv.msb = static_cast<int64_t>(first->lit_value.to_uint());
                lv.lsb = static_cast<int64_t>(second->lit_value.to_uint());
            } else {
                expect_punct("]");
                lv.index = std::move(first);
            }
        }
        lv.span = span_from(start);
        return lv;
    }

    StmtPtr parse_stmt() {
        check_supported_ident();
        Span start = cur().span;
        if (is_punct(";")) {
            next();
            auto s = std::make_unique<Stmt>();
            s->kind = StmtKind::Null;
            s->span = span_from(start);
            return s;
        }
        if (is_kw("begin")) {
            next();
            auto s = std::make_unique<Stmt>();
            s->kind = StmtKind::Block;
            while (!is_kw("end")) {
                if (at_end()) err_syntax("'end'");
                s->stmts.push_back(parse_stmt());
            }
            next();
            s->span = span_from(start);
            return s;
        }
        if (is_kw("if")) {
            next();
            auto s = std::make_unique<Stmt>();
            s->kind = StmtKind::If;
            expect_punct("(");
            s->cond = parse_expr();
            expect_punct(")");
            s->then_branch = parse_stmt();
            if (is_kw("else")) {
                next();
                s->else_branch = parse_stmt();
            }
            s->span = span_from(start);
            return s;
        }
        if (is_kw("case") || is_kw("casez") || is_kw("casex")) {
            auto s = std::make_unique<Stmt>();
            s->kind = StmtKind::Case;
            s->case_kind = is_kw("casez")   ? CaseKind::CaseZ
                           : is_kw("casex") ? CaseKind::CaseX
                                            : CaseKind::Plain;
            next();
            expect_punct("(");
            s->case_expr = parse_expr();
            expect_punct(")");
            while (!is_kw("endcase")) {
                if (at_end()) err_syntax("'endcase'");
                CaseItem item;
                Span item_start = cur().span;
                if (is_kw("default")) {
                    next();
                    item.is_default = true;
                    if (is_punct(":")) next();
                } else {
                    item.patterns.push_back(parse_expr());
                    while (is_punct(",")) {
                        next();
                        item.patterns.push_back(parse_expr());
                    }
                    expect_punct(":");
                }
                item.body = parse_stmt();
                item.span = span_from(item_start);
                s->items.push_back(std::move(item));
            }
            next();
            s->span = span_from(start);
            return s;
        }
        // assignment
        auto s = std::make_unique<Stmt>();
        s->kind = StmtKind::Assign;
        s->lhs = parse_lvalue();
        if (is_punct("<=")) {
            s->nonblocking = true;
            next();
        } else if (is_punct("=")) {
            s->nonblocking = false;
            next();
        } else {
            err_syntax("'=' or '<='");
        }
        s->rhs = parse_expr();
        expect_punct(";");
        s->span = span_from(start);
        return s;
    }

    // ---- module items ----

    ExprPtr parse_range_bound() { return parse_expr(); }

    void parse_range(ExprPtr& msb, ExprPtr& lsb) {
        expect_punct("[");
        msb = parse_range_bound();
        expect_punct(":");
        lsb = parse_range_bound();
        expect_punct("]");
    }

    ModuleDecl parse_module() {
        ModuleDecl mod;
        Span start = toks_[idx_ > 0 ? idx_ - 1 : 0].span; // 'module' keyword
        mod.file = unit_.path;
        mod.name = expect_ident();
        if (is_punct("#")) err_unsupported("parameter port list");
        if (is_punct("(")) {
            next();
            if (!is_punct(")")) parse_port_list(mod);
            expect_punct(")");
        }
        expect_punct(";");

        while (!is_kw("endmodule")) {
            if (at_end()) err_syntax("'endmodule'");
            parse_module_item(mod);
        }
        next();
        mod.span = span_from(start);
        return mod;
    }

    void parse_port_list(ModuleDecl& mod) {
        PortDir dir = PortDir::Input;
        bool have_dir = false;
        for (;;) {
            check_supported_ident();
            if (is_kw("input") || is_kw("output") || is_kw("inout")) {
                dir = is_kw("input") ? PortDir::Input
                      : is_kw("output") ? PortDir::Output
                                        : PortDir::Inout;
                have_dir = true;
                next();
            }
            if (!have_dir) err_unsupported("non-ANSI port list");
            if (is_kw("wire") || is_kw("logic") || is_kw("reg")) next();
            PortDecl port;
            port.dir = dir;
            Span pstart = cur().span;
            if (is_punct("[")) parse_range(port.msb, port.lsb);
            port.name = expect_ident();
            port.span = span_from(pstart);
            mod.ports.push_back(std::move(port));
            if (is_punct(",")) {
                next();
                continue;
            }
            break;
        }
        for (size_t i = 0; i < mod.ports.size(); ++i)
            for (size_t j = i + 1; j < mod.ports.size(); ++j)
                if (mod.ports[i].name == mod.ports[j].name)
                    raise(ErrCode::SyntaxError, "duplicate port name '" + mod.ports[i].name + "'",
                          unit_.path, mod.ports[j].span.line);
    }

    void parse_module_item(ModuleDecl& mod) {
        check_supported_ident();
        Span start = cur().span;
        if (is_kw("parameter") || is_kw("localparam")) {
            bool local = is_kw("localparam");
            next();
            for (;;) {
                ParamDecl p;
                p.local = local;
                p.name = expect_ident();
                expect_punct("=");
                if (cur().kind != Tok::Number)
                    err_unsupported("parameter with non-literal value");
                ExprPtr lit = parse_literal();
                p.value = static_cast<int64_t>(lit->lit_value.to_uint());
                p.span = span_from(start);
                mod.params.push_back(std::move(p));
                if (is_punct(",")) {
                    next();
                    continue;
                }
                break;
            }
            expect_punct(";");
            return;
        }
        if (is_kw("wire") || is_kw("logic") || is_kw("reg")) {
            next();
            ExprPtr msb, lsb;
            if (is_punct("[")) parse_range(msb, lsb);
            for (;;) {
                NetDecl net;
                Span nstart = cur().span;
                net.name = expect_ident();
                if (is_punct("[")) err_unsupported("unpacked array declaration");
                net.msb = msb ? clone_expr(*msb) : nullptr;
                net.lsb = lsb ? clone_expr(*lsb) : nullptr;
                net.span = span_from(nstart);
                mod.nets.push_back(std::move(net));
                if (is_punct(",")) {
                    next();
                    continue;
                }
                break;
            }
            expect_punct(";");
            return;
        }
        if (is_kw("assign")) {
            next();
            ContinuousAssign ca;
            ca.lhs = parse_lvalue();
            expect_punct("=");
            ca.rhs = parse_expr();
            expect_punct(";");
            ca.span = span_from(start);
            mod.assigns.push_back(std::move(ca));
            return;
        }
        if (is_kw("always") || is_kw("always_ff") || is_kw("always_comb")) {
            AlwaysBlock blk;
            bool comb_kw = is_kw("always_comb");
            bool ff_kw = is_kw("always_ff");
            next();
            if (comb_kw) {
                blk.comb = true;
            } else {
                expect_punct("@");
                if (is_punct("*") || is_punct("@*")) {
                    next();
                    blk.comb = true;
                } else {
                    expect_punct("(");
                    if (is_punct("*")) {
                        next();
                        blk.comb = true;
                    } else {
                        check_supported_ident();
                        if (is_kw("negedge")) err_unsupported("negedge-sensitive always block");
                        if (is_kw("posedge")) {
                            next();
                            blk.clocked = true;
                            blk.clock_edge_signal = expect_ident();
                            if (is_kw("or") || is_punct(","))
                                err_unsupported("multi-signal sensitivity list");
                        } else {
                            err_unsupported("explicit sensitivity list");
                        }
                    }
                    expect_punct(")");
                }
            }
            if (ff_kw && !blk.clocked)
                raise(ErrCode::SyntaxError, "always_ff requires a posedge event", unit_.path,
                      start.line);
            blk.body = parse_stmt();
            blk.span = span_from(start);
            mod.always_blocks.push_back(std::move(blk));
            return;
        }
        // instantiation: ident ident ( .port(expr), ... );
        if (cur().kind == Tok::Ident && !kKeywords.count(cur().text)) {
            InstanceDecl inst;
            inst.module_name = expect_ident();
            if (is_punct("#")) {
                next();
                expect_punct("(");
                for (;;) {
                    expect_punct(".");
                    std::string pname = expect_ident();
                    expect_punct("(");
                    if (cur().kind != Tok::Number)
                        err_unsupported("non-literal parameter override");
                    ExprPtr lit = parse_literal();
                    inst.param_overrides.emplace_back(
                        pname, static_cast<int64_t>(lit->lit_value.to_uint()));
                    expect_punct(")");
                    if (is_punct(",")) {
                        next();
                        continue;
                    }
                    break;
                }
                expect_punct(")");
            }
            inst.instance_name = expect_ident();
            expect_punct("(");
            if (!is_punct(")")) {
                for (;;) {
                    if (!is_punct(".")) err_unsupported("positional port connection");
                    Span cstart = cur().span;
                    next();
                    PortConnection conn;
                    conn.port = expect_ident();
                    expect_punct("(");
                    if (!is_punct(")")) {
                        if (cur().kind == Tok::Number) {
                            conn.actual = parse_literal();
                        } else {
                            Token tok = cur();
                            std::string name = expect_ident();
                            if (is_punct("[") || is_punct("."))
                                err_unsupported("port connection expression");
                            Token ident_tok = tok;
                            conn.actual = make_ident(ident_tok);
                        }
                    }
                    expect_punct(")");
                    conn.span = span_from(cstart);
                    inst.connections.push_back(std::move(conn));
                    if (is_punct(",")) {
                        next();
                        continue;
                    }
                    break;
                }
            }
            expect_punct(")");
            expect_punct(";");
            inst.span = span_from(start);
            mod.instances.push_back(std::move(inst));
            return;
        }
        err_syntax("module item");
    }
};

void check_line_ownership(const ModuleDecl& mod) {
    // Definition-1 disjointness needs every ownable line in at most one
    // statement/connection; reject layouts that share a line.
    struct Owned {
        int first;
        int last;
        const char* what;
    };
    std::vector<Owned> spans;
    for (const auto& a : mod.assigns)
        spans.push_back({a.span.line, a.span.end_line, "assign statement"});
    for (const auto& b : mod.always_blocks)
        spans.push_back({b.span.line, b.span.end_line, "always block"});
    for (const auto& inst : mod.instances)
        for (const auto& c : inst.connections)
            spans.push_back({c.span.line, c.span.end_line, "port connection"});
    std::sort(spans.begin(), spans.end(),
              [](const Owned& a, const Owned& b) { return a.first < b.first; });
    for (size_t i = 1; i < spans.size(); ++i) {
        if (spans[i].first <= spans[i - 1].last)
            raise(ErrCode::UnsupportedConstruct,
                  std::string(spans[i].what) + " shares a source line with a " +
                      spans[i - 1].what,
                  mod.file, spans[i].first);
    }
}

} // namespace

DesignAST parse_sources(std::vector<SourceUnit> files) {
    DesignAST ast;
    ast.sources = std::move(files);
    for (const auto& unit : ast.sources) {
        Parser p(unit);
        p.parse_into(ast);
    }
    std::set<std::string> names;
    for (const auto& m : ast.modules) {
        if (!names.insert(m.name).second)
            raise(ErrCode::SyntaxError, "duplicate module '" + m.name + "'", m.file,
                  m.span.line);
        check_line_ownership(m);
    }
    return ast;
}

} // namespace blockloc
