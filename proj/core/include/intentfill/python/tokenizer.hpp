#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "intentfill/error.hpp"

namespace intentfill::py {

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, int col)
        : Error(what + " at " + std::to_string(line) + ":" + std::to_string(col)),
          line_(line),
          col_(col) {}

    int line() const noexcept { return line_; }
    int col() const noexcept { return col_; }

private:
    int line_;
    int col_;
};

enum class TokenKind {
    Name,
    Number,
    String,
    Op,
    Newline,
    Indent,
    Dedent,
    Comment,
    EndMarker,
};

struct Token {
    TokenKind kind = TokenKind::EndMarker;
    std::size_t begin = 0;  // byte offsets into the source
    std::size_t end = 0;
    int line = 1;  // 1-based
    int col = 0;   // 0-based byte column
    std::string_view text;
};

/// Tokenizes Python source following the reference tokenizer's logical-line
/// rules: NEWLINE only at depth 0, INDENT/DEDENT from the indentation stack,
/// implicit joining inside brackets and explicit backslash continuation.
/// The returned tokens reference `source`, which must outlive them.
/// Comments are returned as Comment tokens; blank lines produce nothing.
std::vector<Token> tokenize(std::string_view source);

bool is_keyword(std::string_view word);

}  // namespace intentfill::py
