#include "lexer.hpp"

#include <cctype>

#include "blockloc/diag.hpp"

namespace blockloc {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool digit_or_sep(char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '_'; }
bool based_digit(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '?';
}

struct Cursor {
    const SourceUnit& unit;
    size_t pos = 0;
    int line = 1;
    int col = 1;

    bool done() const { return pos >= unit.text.size(); }
    char peek(size_t ahead = 0) const {
        return pos + ahead < unit.text.size() ? unit.text[pos + ahead] : '\0';
    }
    void advance() {
        if (done()) return;
        if (unit.text[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }
};

} // namespace

std::vector<Token> lex(const SourceUnit& unit) {
    std::vector<Token> out;
    Cursor c{unit};

    auto skip_trivia = [&] {
        for (;;) {
            while (!c.done() && std::isspace(static_cast<unsigned char>(c.peek()))) c.advance();
            if (c.peek() == '/' && c.peek(1) == '/') {
                while (!c.done() && c.peek() != '\n') c.advance();
                continue;
            }
            if (c.peek() == '/' && c.peek(1) == '*') {
                int start_line = c.line;
                c.advance();
                c.advance();
                while (!c.done() && !(c.peek() == '*' && c.peek(1) == '/')) c.advance();
                if (c.done())
                    raise(ErrCode::SyntaxError, "unterminated block comment", unit.path,
                          start_line);
                c.advance();
                c.advance();
                continue;
            }
            break;
        }
    };

    while (true) {
        skip_trivia();
        if (c.done()) break;

        Token tok;
        tok.span.line = c.line;
        tok.span.col = c.col;
        tok.span.offset = c.pos;

        char ch = c.peek();
        if (ident_start(ch)) {
            std::string text;
            while (!c.done() && ident_char(c.peek())) {
                text.push_back(c.peek());
                c.advance();
            }
            tok.kind = Tok::Ident;
            tok.text = std::move(text);
        } else if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '\'') {
            std::string text;
            while (!c.done() && digit_or_sep(c.peek())) {
                text.push_back(c.peek());
                c.advance();
            }
            if (c.peek() == '\'') {
                text.push_back('\'');
                c.advance();
                if (c.peek() == 's' || c.peek() == 'S') {
                    raise(ErrCode::UnsupportedConstruct, "signed literal", unit.path, c.line);
                }
                char base = c.peek();
                if (base == 'h' || base == 'H' || base == 'd' || base == 'D' || base == 'b' ||
                    base == 'B' || base == 'o' || base == 'O') {
                    text.push_back(base);
                    c.advance();
                    while (!c.done() && based_digit(c.peek())) {
                        text.push_back(c.peek());
                        c.advance();
                    }
                } else if (base == '0' || base == '1' || base == 'x' || base == 'z' ||
                           base == 'X' || base == 'Z') {
                    // fill literal '0 '1 'x 'z
                    text.push_back(base);
                    c.advance();
                } else {
                    raise(ErrCode::SyntaxError, "malformed based literal", unit.path, c.line);
                }
            }
            tok.kind = Tok::Number;
            tok.text = std::move(text);
        } else if (ch == '`') {
            c.advance();
            std::string text;
            while (!c.done() && ident_char(c.peek())) {
                text.push_back(c.peek());
                c.advance();
            }
            tok.kind = Tok::Directive;
            tok.text = std::move(text);
        } else {
            // punctuation, longest-match first
            static const char* two[] = {"<=", ">=", "==", "!=", "&&", "||", "<<", ">>",
                                        "@*", "+:", "-:", "::", "->"};
            static const char* three[] = {"==="};
            std::string text;
            bool matched = false;
            for (const char* t : three) {
                if (c.peek() == t[0] && c.peek(1) == t[1] && c.peek(2) == t[2]) {
                    text = t;
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                for (const char* t : two) {
                    if (c.peek() == t[0] && c.peek(1) == t[1]) {
                        text = t;
                        matched = true;
                        break;
                    }
                }
            }
            if (!matched) text = std::string(1, ch);
            for (size_t i = 0; i < text.size(); ++i) c.advance();
            tok.kind = Tok::Punct;
            tok.text = std::move(text);
        }

        tok.span.end_line = c.line;
        tok.span.end_col = c.col;
        tok.span.end_offset = c.pos;
        out.push_back(std::move(tok));
    }

    Token eof;
    eof.kind = Tok::End;
    eof.span.line = c.line;
    eof.span.col = c.col;
    eof.span.offset = c.pos;
    eof.span.end_line = c.line;
    eof.span.end_col = c.col;
    eof.span.end_offset = c.pos;
    out.push_back(std::move(eof));
    return out;
}

} // namespace blockloc
