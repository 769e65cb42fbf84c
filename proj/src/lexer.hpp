#pragma once

#include <string>
#include <vector>

#include "blockloc/source.hpp"

namespace blockloc {

enum class Tok {
    Ident,
    Number,    // decimal or based literal, possibly with size prefix
    Punct,     // operators and delimiters, text in `text`
    Directive, // `word
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    Span span;
};

/// Tokenize one source unit. Comments and whitespace are skipped; based
/// literals (8'hFF, 4'b1x?0, '0) come out as a single Number token.
std::vector<Token> lex(const SourceUnit& unit);

} // namespace blockloc
