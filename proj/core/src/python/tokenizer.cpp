#include "intentfill/python/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace intentfill::py {

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",     "assert", "async", "await",
    "break", "class",  "continue", "def",     "del",    "elif",   "else",  "except",
    "finally", "for",  "from",    "global",   "if",     "import", "in",    "is",
    "lambda", "nonlocal", "not",  "or",       "pass",   "raise",  "return", "try",
    "while", "with",   "yield",
};

// Longest first so that greedy matching picks "**=" before "**" before "*".
constexpr std::array<std::string_view, 47> kOperators = {
    "**=", "//=", ">>=", "<<=", "...", "->", ":=", "**", "//", "<<", ">>", "<=",
    ">=",  "==",  "!=",  "+=",  "-=",  "*=", "/=", "%=", "&=", "|=", "^=", "@=",
    "+",   "-",   "*",   "/",   "%",   "@",  "&",  "|",  "^",  "~",  "<",  ">",
    "(",   ")",   "[",   "]",   "{",   "}",  ",",  ":",  ".",  ";",  "=",
};

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        indents_.push_back(0);
        while (pos_ < src_.size()) {
            if (at_line_start_) {
                if (!handle_line_start()) continue;
            }
            if (pos_ >= src_.size()) break;
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\f') {
                advance(1);
                continue;
            }
            if (c == '\r') {
                advance(1);
                continue;
            }
            if (c == '\\') {
                std::size_t p = pos_ + 1;
                if (p < src_.size() && src_[p] == '\r') ++p;
                if (p < src_.size() && src_[p] == '\n') {
                    advance(p + 1 - pos_);
                    continue;
                }
                if (p >= src_.size()) throw error("unexpected EOF after line continuation");
                throw error("unexpected character after line continuation");
            }
            if (c == '\n') {
                if (depth_ == 0 && line_has_tokens_) {
                    push(TokenKind::Newline, pos_, pos_ + 1);
                    line_has_tokens_ = false;
                }
                advance(1);
                if (depth_ == 0) at_line_start_ = true;
                continue;
            }
            if (c == '#') {
                lex_comment();
                continue;
            }
            line_has_tokens_ = true;
            if (std::isdigit(static_cast<unsigned char>(c)) ||
                (c == '.' && pos_ + 1 < src_.size() &&
                 std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
                lex_number();
                continue;
            }
            if (is_ident_start(static_cast<unsigned char>(c))) {
                if (string_prefix_length() > 0) {
                    lex_string();
                    continue;
                }
                lex_name();
                continue;
            }
            if (c == '"' || c == '\'') {
                lex_string();
                continue;
            }
            lex_operator();
        }
        if (depth_ > 0) throw error("unexpected EOF inside brackets");
        if (line_has_tokens_) push(TokenKind::Newline, pos_, pos_);
        while (indents_.size() > 1) {
            indents_.pop_back();
            push(TokenKind::Dedent, pos_, pos_);
        }
        push(TokenKind::EndMarker, pos_, pos_);
        return std::move(tokens_);
    }

private:
    ParseError error(const std::string& msg) const { return ParseError(msg, line_, col()); }

    int col() const { return static_cast<int>(pos_ - line_begin_); }

    void advance(std::size_t n) {
        for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
            if (src_[pos_] == '\n') {
                ++line_;
                line_begin_ = pos_ + 1;
            }
            ++pos_;
        }
    }

    void push(TokenKind kind, std::size_t begin, std::size_t end) {
        Token t;
        t.kind = kind;
        t.begin = begin;
        t.end = end;
        t.line = token_line_;
        t.col = token_col_;
        t.text = src_.substr(begin, end - begin);
        tokens_.push_back(t);
    }

    void mark() {
        token_line_ = line_;
        token_col_ = col();
    }

    // Measures indentation of a fresh logical line. Returns false when the
    // line was blank or comment-only and has been consumed.
    bool handle_line_start() {
        std::size_t width = 0;
        std::size_t p = pos_;
        while (p < src_.size()) {
            char c = src_[p];
            if (c == ' ') {
                ++width;
            } else if (c == '\t') {
                width = (width / 8 + 1) * 8;
            } else if (c == '\f') {
                width = 0;
            } else {
                break;
            }
            ++p;
        }
        advance(p - pos_);
        if (pos_ >= src_.size()) {
            at_line_start_ = false;
            return true;
        }
        char c = src_[pos_];
        if (c == '\n' || c == '\r') {
            std::size_t q = pos_;
            if (src_[q] == '\r') ++q;
            if (q < src_.size() && src_[q] == '\n') ++q;
            advance(q - pos_);
            return false;
        }
        if (c == '#') {
            lex_comment();
            if (pos_ < src_.size() && src_[pos_] == '\n') advance(1);
            return false;
        }
        if (c == '\\') {
            // A continuation at the start of a line keeps the indentation
            // bookkeeping of the line it continues into.
            at_line_start_ = false;
            apply_indent(width);
            return true;
        }
        at_line_start_ = false;
        apply_indent(width);
        return true;
    }

    void apply_indent(std::size_t width) {
        token_line_ = line_;
        token_col_ = col();
        if (width > indents_.back()) {
            indents_.push_back(width);
            push(TokenKind::Indent, pos_, pos_);
        } else {
            while (width < indents_.back()) {
                indents_.pop_back();
                push(TokenKind::Dedent, pos_, pos_);
            }
            if (width != indents_.back()) throw error("unindent does not match any outer indentation level");
        }
    }

    void lex_comment() {
        mark();
        std::size_t start = pos_;
        while (pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '\r') advance(1);
        push(TokenKind::Comment, start, pos_);
    }

    void lex_name() {
        mark();
        std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) advance(1);
        push(TokenKind::Name, start, pos_);
    }

    std::size_t string_prefix_length() const {
        std::size_t n = 0;
        while (pos_ + n < src_.size() && n < 3) {
            char c = static_cast<char>(std::tolower(static_cast<unsigned char>(src_[pos_ + n])));
            if (c == 'r' || c == 'b' || c == 'u' || c == 'f') {
                ++n;
            } else {
                break;
            }
        }
        if (n == 0 || n > 2 || pos_ + n >= src_.size()) return 0;
        char q = src_[pos_ + n];
        if (q != '"' && q != '\'') return 0;
        return n;
    }

    void lex_string() {
        mark();
        std::size_t start = pos_;
        std::size_t prefix = is_ident_start(static_cast<unsigned char>(src_[pos_])) ? string_prefix_length() : 0;
        advance(prefix);
        char quote = src_[pos_];
        bool triple = pos_ + 2 < src_.size() && src_[pos_ + 1] == quote && src_[pos_ + 2] == quote;
        advance(triple ? 3 : 1);
        while (true) {
            if (pos_ >= src_.size()) throw ParseError("unterminated string literal", token_line_, token_col_);
            char c = src_[pos_];
            if (c == '\\') {
                // Raw strings still cannot end on an escaped quote.
                advance(pos_ + 1 < src_.size() ? 2 : 1);
                continue;
            }
            if (!triple && c == '\n') throw ParseError("unterminated string literal", token_line_, token_col_);
            if (c == quote) {
                if (!triple) {
                    advance(1);
                    break;
                }
                if (pos_ + 2 < src_.size() && src_[pos_ + 1] == quote && src_[pos_ + 2] == quote) {
                    advance(3);
                    break;
                }
            }
            advance(1);
        }
        push(TokenKind::String, start, pos_);
    }

    void lex_number() {
        mark();
        std::size_t start = pos_;
        auto digit_run = [&](auto pred) {
            while (pos_ < src_.size() && (pred(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                advance(1);
        };
        auto is_dec = [](unsigned char c) { return std::isdigit(c) != 0; };
        if (src_[pos_] == '0' && pos_ + 1 < src_.size() &&
            std::string_view("xXoObB").find(src_[pos_ + 1]) != std::string_view::npos) {
            advance(2);
            digit_run([](unsigned char c) { return std::isxdigit(c) != 0; });
        } else {
            digit_run(is_dec);
            if (pos_ < src_.size() && src_[pos_] == '.') {
                advance(1);
                digit_run(is_dec);
            }
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                std::size_t p = pos_ + 1;
                if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
                if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                    advance(p - pos_);
                    digit_run(is_dec);
                }
            }
            if (pos_ < src_.size() && (src_[pos_] == 'j' || src_[pos_] == 'J')) advance(1);
        }
        push(TokenKind::Number, start, pos_);
    }

    void lex_operator() {
        mark();
        for (auto op : kOperators) {
            if (src_.substr(pos_, op.size()) == op) {
                std::size_t start = pos_;
                advance(op.size());
                if (op == "(" || op == "[" || op == "{") {
                    ++depth_;
                } else if (op == ")" || op == "]" || op == "}") {
                    if (depth_ == 0) throw ParseError("unmatched '" + std::string(op) + "'", token_line_, token_col_);
                    --depth_;
                }
                push(TokenKind::Op, start, pos_);
                return;
            }
        }
        if (src_[pos_] == '!') throw error("invalid syntax '!'");
        throw error(std::string("invalid character '") + src_[pos_] + "'");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    std::size_t line_begin_ = 0;
    int token_line_ = 1;
    int token_col_ = 0;
    int depth_ = 0;
    bool at_line_start_ = true;
    bool line_has_tokens_ = false;
    std::vector<std::size_t> indents_;
    std::vector<Token> tokens_;
};

}  // namespace

bool is_keyword(std::string_view word) {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace intentfill::py
