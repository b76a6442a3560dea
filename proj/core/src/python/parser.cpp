#include <algorithm>
#include <utility>

#include "intentfill/python/syntax_tree.hpp"
#include "intentfill/text.hpp"

namespace intentfill::py {

const Node* Node::child_by_field(std::string_view f) const noexcept {
    for (const auto& c : children) {
        if (c.field == f) return &c;
    }
    return nullptr;
}

namespace {

bool is_augassign(std::string_view t) {
    static constexpr std::string_view ops[] = {"+=", "-=", "*=", "/=", "//=", "%=", "@=",
                                               "&=", "|=", "^=", ">>=", "<<=", "**="};
    return std::find(std::begin(ops), std::end(ops), t) != std::end(ops);
}

Node with_field(Node n, std::string f) {
    n.field = std::move(f);
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {
        for (auto& t : tokenize(src)) {
            if (t.kind == TokenKind::Comment) {
                comments_.push_back(t);
            } else {
                toks_.push_back(t);
            }
        }
    }

    Node module() {
        Node m;
        m.kind = "module";
        while (!at(TokenKind::EndMarker)) {
            if (at(TokenKind::Newline)) {
                ++pos_;
                continue;
            }
            statement(m.children);
        }
        m.begin = 0;
        m.end = src_.size();
        m.line = 1;
        return m;
    }

    std::vector<Token> take_comments() { return std::move(comments_); }

private:
    // ---- token helpers -------------------------------------------------

    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(std::size_t k = 1) const {
        return toks_[std::min(pos_ + k, toks_.size() - 1)];
    }
    bool at(TokenKind k) const { return cur().kind == k; }
    bool at_op(std::string_view op) const { return cur().kind == TokenKind::Op && cur().text == op; }
    bool at_kw(std::string_view kw) const { return cur().kind == TokenKind::Name && cur().text == kw; }
    static bool tok_is_op(const Token& t, std::string_view op) { return t.kind == TokenKind::Op && t.text == op; }
    static bool tok_is_kw(const Token& t, std::string_view kw) { return t.kind == TokenKind::Name && t.text == kw; }

    [[noreturn]] void fail(const std::string& msg) const {
        std::string got = cur().kind == TokenKind::EndMarker ? "end of input"
                          : cur().kind == TokenKind::Newline ? "newline"
                          : cur().kind == TokenKind::Indent  ? "indent"
                          : cur().kind == TokenKind::Dedent  ? "dedent"
                                                             : "'" + std::string(cur().text) + "'";
        throw ParseError(msg + ", got " + got, cur().line, cur().col);
    }

    Node leaf_from(const Token& t) {
        Node n;
        n.begin = t.begin;
        n.end = t.end;
        n.line = t.line;
        switch (t.kind) {
            case TokenKind::Name:
                if (t.text == "True") {
                    n.kind = "true";
                } else if (t.text == "False") {
                    n.kind = "false";
                } else if (t.text == "None") {
                    n.kind = "none";
                } else if (is_keyword(t.text)) {
                    n.kind = std::string(t.text);
                    n.named = false;
                } else {
                    n.kind = "identifier";
                }
                break;
            case TokenKind::Number: {
                auto s = t.text;
                bool hex = s.size() > 1 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X');
                bool is_float = !hex && (s.find('.') != std::string_view::npos ||
                                         s.find_first_of("eEjJ") != std::string_view::npos);
                n.kind = is_float ? "float" : "integer";
                break;
            }
            case TokenKind::String:
                n.kind = "string";
                break;
            default:
                n.kind = std::string(t.text);
                n.named = false;
                break;
        }
        return n;
    }

    Node take() { return leaf_from(toks_[pos_++]); }

    Node expect_op(std::string_view op) {
        if (!at_op(op)) fail("expected '" + std::string(op) + "'");
        return take();
    }

    Node expect_kw(std::string_view kw) {
        if (!at_kw(kw)) fail("expected '" + std::string(kw) + "'");
        return take();
    }

    Node identifier() {
        if (!at(TokenKind::Name) || is_keyword(cur().text)) fail("expected identifier");
        return take();
    }

    void expect_newline() {
        if (at(TokenKind::Newline)) {
            ++pos_;
            return;
        }
        if (at(TokenKind::EndMarker) || at(TokenKind::Dedent)) return;
        fail("expected newline");
    }

    static Node make(std::string kind, std::vector<Node> children) {
        Node n;
        n.kind = std::move(kind);
        if (!children.empty()) {
            n.begin = children.front().begin;
            n.end = children.back().end;
            n.line = children.front().line;
        }
        n.children = std::move(children);
        return n;
    }

    // Tokens that can start an expression.
    bool starts_expression() const {
        const auto& t = cur();
        if (t.kind == TokenKind::Name) {
            if (!is_keyword(t.text)) return true;
            return t.text == "True" || t.text == "False" || t.text == "None" || t.text == "not" ||
                   t.text == "lambda" || t.text == "await" || t.text == "yield";
        }
        if (t.kind == TokenKind::Number || t.kind == TokenKind::String) return true;
        if (t.kind == TokenKind::Op) {
            return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" || t.text == "+" ||
                   t.text == "~" || t.text == "..." || t.text == "*";
        }
        return false;
    }

    // ---- statements ----------------------------------------------------

    void statement(std::vector<Node>& out) {
        if (at_op("@")) {
            out.push_back(decorated());
            return;
        }
        if (at(TokenKind::Name)) {
            auto t = cur().text;
            if (t == "if") return out.push_back(if_statement());
            if (t == "while") return out.push_back(while_statement());
            if (t == "for") return out.push_back(for_statement());
            if (t == "try") return out.push_back(try_statement());
            if (t == "with") return out.push_back(with_statement());
            if (t == "def") return out.push_back(function_definition());
            if (t == "class") return out.push_back(class_definition());
            if (t == "async") {
                const auto& n = peek();
                if (tok_is_kw(n, "def")) return out.push_back(function_definition());
                if (tok_is_kw(n, "for")) return out.push_back(for_statement());
                if (tok_is_kw(n, "with")) return out.push_back(with_statement());
            }
        }
        if (at(TokenKind::Indent)) fail("unexpected indent");
        simple_statements(out);
    }

    void simple_statements(std::vector<Node>& out) {
        while (true) {
            out.push_back(simple_statement());
            if (at_op(";")) {
                ++pos_;
                if (at(TokenKind::Newline) || at(TokenKind::EndMarker)) break;
                continue;
            }
            break;
        }
        expect_newline();
    }

    Node block() {
        std::vector<Node> stmts;
        if (at(TokenKind::Newline)) {
            ++pos_;
            if (!at(TokenKind::Indent)) fail("expected an indented block");
            ++pos_;
            while (!at(TokenKind::Dedent) && !at(TokenKind::EndMarker)) {
                if (at(TokenKind::Newline)) {
                    ++pos_;
                    continue;
                }
                statement(stmts);
            }
            if (at(TokenKind::Dedent)) ++pos_;
        } else {
            simple_statements(stmts);
        }
        if (stmts.empty()) fail("expected statement");
        return make("block", std::move(stmts));
    }

    Node simple_statement() {
        if (at(TokenKind::Name)) {
            auto t = cur().text;
            if (t == "pass") return make("pass_statement", {take()});
            if (t == "break") return make("break_statement", {take()});
            if (t == "continue") return make("continue_statement", {take()});
            if (t == "return") {
                std::vector<Node> c{take()};
                if (starts_expression()) c.push_back(star_expressions());
                return make("return_statement", std::move(c));
            }
            if (t == "raise") {
                std::vector<Node> c{take()};
                if (starts_expression()) {
                    c.push_back(expression());
                    if (at_kw("from")) {
                        c.push_back(take());
                        c.push_back(with_field(expression(), "cause"));
                    }
                }
                return make("raise_statement", std::move(c));
            }
            if (t == "global" || t == "nonlocal") {
                std::string kind = t == "global" ? "global_statement" : "nonlocal_statement";
                std::vector<Node> c{take(), identifier()};
                while (at_op(",")) {
                    c.push_back(take());
                    c.push_back(identifier());
                }
                return make(kind, std::move(c));
            }
            if (t == "del") {
                std::vector<Node> c{take()};
                c.push_back(star_expressions());
                return make("delete_statement", std::move(c));
            }
            if (t == "assert") {
                std::vector<Node> c{take(), expression()};
                if (at_op(",")) {
                    c.push_back(take());
                    c.push_back(expression());
                }
                return make("assert_statement", std::move(c));
            }
            if (t == "import") return import_statement();
            if (t == "from") return import_from_statement();
        }
        return expression_statement();
    }

    Node dotted_name() {
        std::vector<Node> c{identifier()};
        while (at_op(".")) {
            c.push_back(take());
            c.push_back(identifier());
        }
        return make("dotted_name", std::move(c));
    }

    Node import_statement() {
        std::vector<Node> c{take()};
        auto item = [&] {
            Node name = with_field(dotted_name(), "name");
            if (at_kw("as")) {
                Node as = take();
                return with_field(
                    make("aliased_import", {std::move(name), std::move(as), with_field(identifier(), "alias")}),
                    "name");
            }
            return name;
        };
        c.push_back(item());
        while (at_op(",")) {
            c.push_back(take());
            c.push_back(item());
        }
        return make("import_statement", std::move(c));
    }

    Node import_from_statement() {
        std::vector<Node> c{take()};
        std::vector<Node> dots;
        while (at_op(".") || at_op("...")) dots.push_back(take());
        std::vector<Node> rel;
        if (!dots.empty()) rel.push_back(make("import_prefix", std::move(dots)));
        if (!rel.empty()) {
            if (at(TokenKind::Name) && !at_kw("import")) rel.push_back(dotted_name());
            c.push_back(with_field(make("relative_import", std::move(rel)), "module_name"));
        } else {
            c.push_back(with_field(dotted_name(), "module_name"));
        }
        c.push_back(expect_kw("import"));
        auto item = [&] {
            Node name = with_field(dotted_name(), "name");
            if (at_kw("as")) {
                Node as = take();
                return with_field(
                    make("aliased_import", {std::move(name), std::move(as), with_field(identifier(), "alias")}),
                    "name");
            }
            return name;
        };
        if (at_op("*")) {
            c.push_back(make("wildcard_import", {take()}));
        } else if (at_op("(")) {
            c.push_back(take());
            c.push_back(item());
            while (at_op(",")) {
                c.push_back(take());
                if (at_op(")")) break;
                c.push_back(item());
            }
            c.push_back(expect_op(")"));
        } else {
            c.push_back(item());
            while (at_op(",")) {
                c.push_back(take());
                c.push_back(item());
            }
        }
        return make("import_from_statement", std::move(c));
    }

    Node assignment_rhs() {
        if (at_kw("yield")) return yield_expression();
        return star_expressions();
    }

    Node expression_statement() {
        if (!starts_expression()) fail("invalid syntax");
        Node first = at_kw("yield") ? yield_expression() : star_expressions();
        if (at_op(":")) {
            Node colon = take();
            std::vector<Node> c{with_field(std::move(first), "left"), std::move(colon),
                                with_field(type_node(expression()), "type")};
            if (at_op("=")) {
                c.push_back(take());
                c.push_back(with_field(assignment_rhs(), "right"));
            }
            return make("expression_statement", {make("assignment", std::move(c))});
        }
        if (at_op("=")) {
            std::vector<Node> chain{std::move(first)};
            std::vector<Node> eqs;
            while (at_op("=")) {
                eqs.push_back(take());
                chain.push_back(assignment_rhs());
            }
            Node right = std::move(chain.back());
            for (std::size_t i = chain.size() - 1; i-- > 0;) {
                right = make("assignment", {with_field(to_pattern(std::move(chain[i])), "left"), std::move(eqs[i]),
                                            with_field(std::move(right), "right")});
            }
            return make("expression_statement", {std::move(right)});
        }
        if (cur().kind == TokenKind::Op && is_augassign(cur().text)) {
            Node op = take();
            return make("expression_statement",
                        {make("augmented_assignment", {with_field(std::move(first), "left"), std::move(op),
                                                       with_field(assignment_rhs(), "right")})});
        }
        return make("expression_statement", {std::move(first)});
    }

    Node if_statement() {
        std::vector<Node> c{take()};
        c.push_back(with_field(named_expression(), "condition"));
        c.push_back(expect_op(":"));
        c.push_back(with_field(block(), "consequence"));
        while (at_kw("elif")) {
            std::vector<Node> e{take()};
            e.push_back(with_field(named_expression(), "condition"));
            e.push_back(expect_op(":"));
            e.push_back(with_field(block(), "consequence"));
            c.push_back(with_field(make("elif_clause", std::move(e)), "alternative"));
        }
        if (at_kw("else")) c.push_back(with_field(else_clause(), "alternative"));
        return make("if_statement", std::move(c));
    }

    Node else_clause() {
        std::vector<Node> e{take()};
        e.push_back(expect_op(":"));
        e.push_back(with_field(block(), "body"));
        return make("else_clause", std::move(e));
    }

    Node while_statement() {
        std::vector<Node> c{take()};
        c.push_back(with_field(named_expression(), "condition"));
        c.push_back(expect_op(":"));
        c.push_back(with_field(block(), "body"));
        if (at_kw("else")) c.push_back(with_field(else_clause(), "alternative"));
        return make("while_statement", std::move(c));
    }

    Node for_statement() {
        std::vector<Node> c;
        if (at_kw("async")) c.push_back(take());
        c.push_back(expect_kw("for"));
        c.push_back(with_field(target_list(), "left"));
        c.push_back(expect_kw("in"));
        c.push_back(with_field(star_expressions(), "right"));
        c.push_back(expect_op(":"));
        c.push_back(with_field(block(), "body"));
        if (at_kw("else")) c.push_back(with_field(else_clause(), "alternative"));
        return make("for_statement", std::move(c));
    }

    Node try_statement() {
        std::vector<Node> c{take()};
        c.push_back(expect_op(":"));
        c.push_back(with_field(block(), "body"));
        bool handlers = false;
        while (at_kw("except")) {
            handlers = true;
            std::vector<Node> e{take()};
            if (at_op("*")) e.push_back(take());
            if (!at_op(":")) {
                Node value = expression();
                if (at_kw("as")) {
                    Node as = take();
                    value = as_pattern(std::move(value), std::move(as), identifier());
                }
                e.push_back(with_field(std::move(value), "value"));
                if (at_op(",")) {
                    while (at_op(",")) {
                        e.push_back(take());
                        e.push_back(expression());
                    }
                }
            }
            e.push_back(expect_op(":"));
            e.push_back(block());
            c.push_back(make("except_clause", std::move(e)));
        }
        if (handlers && at_kw("else")) c.push_back(else_clause());
        if (at_kw("finally")) {
            std::vector<Node> f{take()};
            f.push_back(expect_op(":"));
            f.push_back(block());
            c.push_back(make("finally_clause", std::move(f)));
        } else if (!handlers) {
            fail("expected 'except' or 'finally' block");
        }
        return make("try_statement", std::move(c));
    }

    Node with_item() {
        Node value = expression();
        if (at_kw("as")) {
            Node as = take();
            value = as_pattern(std::move(value), std::move(as), star_target());
        }
        return make("with_item", {with_field(std::move(value), "value")});
    }

    Node as_pattern(Node value, Node as, Node target) {
        Node alias = with_field(make("as_pattern_target", {std::move(target)}), "alias");
        return make("as_pattern", {std::move(value), std::move(as), std::move(alias)});
    }

    // True when the '(' at the cursor wraps a parenthesized with-item list.
    bool parenthesized_with_items() const {
        std::size_t i = pos_;
        int depth = 0;
        bool has_as_or_comma = false;
        for (; i < toks_.size(); ++i) {
            const auto& t = toks_[i];
            if (t.kind == TokenKind::Op && (t.text == "(" || t.text == "[" || t.text == "{")) ++depth;
            if (t.kind == TokenKind::Op && (t.text == ")" || t.text == "]" || t.text == "}")) {
                if (--depth == 0) break;
            }
            if (depth == 1 && (tok_is_kw(t, "as") || tok_is_op(t, ","))) has_as_or_comma = true;
            if (t.kind == TokenKind::EndMarker) return false;
        }
        return has_as_or_comma && i + 1 < toks_.size() && tok_is_op(toks_[i + 1], ":");
    }

    Node with_statement() {
        std::vector<Node> c;
        if (at_kw("async")) c.push_back(take());
        c.push_back(expect_kw("with"));
        std::vector<Node> items;
        if (at_op("(") && parenthesized_with_items()) {
            items.push_back(take());
            items.push_back(with_item());
            while (at_op(",")) {
                items.push_back(take());
                if (at_op(")")) break;
                items.push_back(with_item());
            }
            items.push_back(expect_op(")"));
        } else {
            items.push_back(with_item());
            while (at_op(",")) {
                items.push_back(take());
                items.push_back(with_item());
            }
        }
        c.push_back(make("with_clause", std::move(items)));
        c.push_back(expect_op(":"));
        c.push_back(with_field(block(), "body"));
        return make("with_statement", std::move(c));
    }

    Node decorated() {
        std::vector<Node> c;
        while (at_op("@")) {
            std::vector<Node> d{take()};
            d.push_back(named_expression());
            expect_newline();
            c.push_back(make("decorator", std::move(d)));
        }
        if (at_kw("def") || (at_kw("async") && tok_is_kw(peek(), "def"))) {
            c.push_back(with_field(function_definition(), "definition"));
        } else if (at_kw("class")) {
            c.push_back(with_field(class_definition(), "definition"));
        } else {
            fail("expected function or class after decorator");
        }
        return make("decorated_definition", std::move(c));
    }

    Node function_definition() {
        std::vector<Node> c;
        if (at_kw("async")) c.push_back(take());
        c.push_back(expect_kw("def"));
        c.push_back(with_field(identifier(), "name"));
        c.push_back(with_field(parameters(), "parameters"));
        if (at_op("->")) {
            c.push_back(take());
            c.push_back(with_field(type_node(expression()), "return_type"));
        }
        c.push_back(expect_op(":"));
        c.push_back(with_field(block(), "body"));
        return make("function_definition", std::move(c));
    }

    Node class_definition() {
        std::vector<Node> c{take()};
        c.push_back(with_field(identifier(), "name"));
        if (at_op("(")) c.push_back(with_field(argument_list(), "superclasses"));
        c.push_back(expect_op(":"));
        c.push_back(with_field(block(), "body"));
        return make("class_definition", std::move(c));
    }

    // Shared by `def` parameters and lambda parameters; `closer` ends the list.
    Node parameter(bool annotations) {
        if (at_op("/")) return make("positional_separator", {take()});
        if (at_op("*") || at_op("**")) {
            bool dict = at_op("**");
            Node star = take();
            if (!dict && (at_op(",") || at_op(")") || at_op(":"))) return make("keyword_separator", {std::move(star)});
            Node pat = make(dict ? "dictionary_splat_pattern" : "list_splat_pattern", {std::move(star), identifier()});
            if (annotations && at_op(":")) {
                Node colon = take();
                return make("typed_parameter",
                            {std::move(pat), std::move(colon), with_field(type_node(expression()), "type")});
            }
            return pat;
        }
        Node name = identifier();
        if (annotations && at_op(":")) {
            Node colon = take();
            Node type = with_field(type_node(expression()), "type");
            if (at_op("=")) {
                Node eq = take();
                return make("typed_default_parameter", {with_field(std::move(name), "name"), std::move(colon),
                                                        std::move(type), std::move(eq),
                                                        with_field(expression(), "value")});
            }
            return make("typed_parameter", {std::move(name), std::move(colon), std::move(type)});
        }
        if (at_op("=")) {
            Node eq = take();
            return make("default_parameter",
                        {with_field(std::move(name), "name"), std::move(eq), with_field(expression(), "value")});
        }
        return name;
    }

    Node parameters() {
        std::vector<Node> c{expect_op("(")};
        while (!at_op(")")) {
            c.push_back(parameter(true));
            if (at_op(",")) {
                c.push_back(take());
            } else if (!at_op(")")) {
                fail("expected ',' or ')' in parameters");
            }
        }
        c.push_back(take());
        return make("parameters", std::move(c));
    }

    // ---- expressions ---------------------------------------------------

    Node yield_expression() {
        std::vector<Node> c{take()};
        if (at_kw("from")) {
            c.push_back(take());
            c.push_back(expression());
        } else if (starts_expression()) {
            c.push_back(star_expressions());
        }
        return make("yield", std::move(c));
    }

    Node star_expression() {
        if (at_op("*")) {
            Node star = take();
            return make("list_splat", {std::move(star), bitor_expr()});
        }
        return expression();
    }

    Node star_named_expression() {
        if (at_op("*")) {
            Node star = take();
            return make("list_splat", {std::move(star), bitor_expr()});
        }
        return named_expression();
    }

    Node star_expressions() {
        Node first = star_expression();
        if (!at_op(",")) return first;
        std::vector<Node> c{std::move(first)};
        while (at_op(",")) {
            c.push_back(take());
            if (!starts_expression()) break;
            c.push_back(star_expression());
        }
        return make("expression_list", std::move(c));
    }

    Node star_target() {
        if (at_op("*")) {
            Node star = take();
            return make("list_splat_pattern", {std::move(star), bitor_expr()});
        }
        return to_pattern(bitor_expr());
    }

    // Annotations: `Name[...]` reads as a generic type with type parameters.
    static Node type_node(Node e) { return make("type", {generic(std::move(e))}); }

    static Node generic(Node e) {
        if (e.kind != "subscript" || e.children.empty() || e.children.front().kind != "identifier") return e;
        auto& kids = e.children;
        Node name = std::move(kids.front());
        name.field.clear();
        std::vector<Node> params;
        for (std::size_t i = 1; i < kids.size(); ++i) {
            Node k = std::move(kids[i]);
            if (k.named) {
                k.field.clear();
                k = make("type", {generic(std::move(k))});
            }
            params.push_back(std::move(k));
        }
        return make("generic_type", {std::move(name), make("type_parameter", std::move(params))});
    }

    // Tuple and list displays used as assignment targets become patterns.
    static Node to_pattern(Node n) {
        static const std::pair<std::string_view, std::string_view> renames[] = {
            {"expression_list", "pattern_list"},
            {"tuple", "tuple_pattern"},
            {"list", "list_pattern"},
            {"list_splat", "list_splat_pattern"},
        };
        for (auto [from, to] : renames) {
            if (n.kind != from) continue;
            n.kind = to;
            for (auto& c : n.children) {
                if (c.named) c = to_pattern(std::move(c));
            }
            break;
        }
        return n;
    }

    // Targets of `for` loops and comprehensions; stops before `in`.
    Node target_list() {
        Node first = star_target();
        if (!at_op(",")) return first;
        std::vector<Node> c{std::move(first)};
        while (at_op(",")) {
            c.push_back(take());
            if (at_kw("in")) break;
            c.push_back(star_target());
        }
        return make("pattern_list", std::move(c));
    }

    Node named_expression() {
        if (at(TokenKind::Name) && !is_keyword(cur().text) && tok_is_op(peek(), ":=")) {
            Node name = take();
            Node op = take();
            return make("named_expression",
                        {with_field(std::move(name), "name"), std::move(op), with_field(expression(), "value")});
        }
        return expression();
    }

    Node expression() {
        if (at_kw("lambda")) return lambda();
        Node body = disjunction();
        if (at_kw("if")) {
            Node if_kw = take();
            Node cond = disjunction();
            Node else_kw = expect_kw("else");
            return make("conditional_expression",
                        {std::move(body), std::move(if_kw), std::move(cond), std::move(else_kw), expression()});
        }
        return body;
    }

    Node lambda() {
        std::vector<Node> c{take()};
        if (!at_op(":")) {
            std::vector<Node> params;
            while (!at_op(":")) {
                params.push_back(parameter(false));
                if (at_op(",")) {
                    params.push_back(take());
                } else if (!at_op(":")) {
                    fail("expected ',' or ':' in lambda parameters");
                }
            }
            c.push_back(with_field(make("lambda_parameters", std::move(params)), "parameters"));
        }
        c.push_back(expect_op(":"));
        c.push_back(with_field(expression(), "body"));
        return make("lambda", std::move(c));
    }

    Node disjunction() {
        Node left = conjunction();
        while (at_kw("or")) {
            Node op = take();
            left = make("boolean_operator", {with_field(std::move(left), "left"), with_field(std::move(op), "operator"),
                                             with_field(conjunction(), "right")});
        }
        return left;
    }

    Node conjunction() {
        Node left = inversion();
        while (at_kw("and")) {
            Node op = take();
            left = make("boolean_operator", {with_field(std::move(left), "left"), with_field(std::move(op), "operator"),
                                             with_field(inversion(), "right")});
        }
        return left;
    }

    Node inversion() {
        if (at_kw("not")) {
            Node op = take();
            return make("not_operator", {std::move(op), with_field(inversion(), "argument")});
        }
        return comparison();
    }

    bool at_comparison_op() const {
        if (cur().kind == TokenKind::Op) {
            auto t = cur().text;
            return t == "<" || t == ">" || t == "==" || t == ">=" || t == "<=" || t == "!=";
        }
        if (at_kw("in") || at_kw("is")) return true;
        return at_kw("not") && tok_is_kw(peek(), "in");
    }

    Node comparison() {
        Node first = bitor_expr();
        if (!at_comparison_op()) return first;
        std::vector<Node> c{std::move(first)};
        while (at_comparison_op()) {
            if (at_kw("not")) {
                Node a = take();
                Node b = take();
                c.push_back(make("not in", {std::move(a), std::move(b)}));
                c.back().named = false;
            } else if (at_kw("is") && tok_is_kw(peek(), "not")) {
                Node a = take();
                Node b = take();
                c.push_back(make("is not", {std::move(a), std::move(b)}));
                c.back().named = false;
            } else {
                c.push_back(take());
            }
            c.back().field = "operators";
            c.push_back(bitor_expr());
        }
        return make("comparison_operator", std::move(c));
    }

    template <typename Next>
    Node binary_level(std::initializer_list<std::string_view> ops, Next next) {
        Node left = (this->*next)();
        while (cur().kind == TokenKind::Op &&
               std::find(ops.begin(), ops.end(), cur().text) != ops.end()) {
            Node op = take();
            left = make("binary_operator", {with_field(std::move(left), "left"), with_field(std::move(op), "operator"),
                                            with_field((this->*next)(), "right")});
        }
        return left;
    }

    Node bitor_expr() { return binary_level({"|"}, &Parser::bitxor_expr); }
    Node bitxor_expr() { return binary_level({"^"}, &Parser::bitand_expr); }
    Node bitand_expr() { return binary_level({"&"}, &Parser::shift_expr); }
    Node shift_expr() { return binary_level({"<<", ">>"}, &Parser::arith_expr); }
    Node arith_expr() { return binary_level({"+", "-"}, &Parser::term); }
    Node term() { return binary_level({"*", "/", "//", "%", "@"}, &Parser::factor); }

    Node factor() {
        if (at_op("+") || at_op("-") || at_op("~")) {
            Node op = take();
            return make("unary_operator", {with_field(std::move(op), "operator"), with_field(factor(), "argument")});
        }
        return power();
    }

    Node power() {
        Node base = await_primary();
        if (at_op("**")) {
            Node op = take();
            return make("binary_operator", {with_field(std::move(base), "left"), with_field(std::move(op), "operator"),
                                            with_field(factor(), "right")});
        }
        return base;
    }

    Node await_primary() {
        if (at_kw("await")) {
            Node kw = take();
            return make("await", {std::move(kw), primary()});
        }
        return primary();
    }

    Node primary() {
        Node n = atom();
        while (true) {
            if (at_op(".")) {
                Node dot = take();
                n = make("attribute", {with_field(std::move(n), "object"), std::move(dot),
                                       with_field(identifier(), "attribute")});
            } else if (at_op("(")) {
                n = make("call", {with_field(std::move(n), "function"), with_field(argument_list(true), "arguments")});
            } else if (at_op("[")) {
                std::vector<Node> c{with_field(std::move(n), "value"), take()};
                c.push_back(with_field(slice_item(), "subscript"));
                while (at_op(",")) {
                    c.push_back(take());
                    if (at_op("]")) break;
                    c.push_back(with_field(slice_item(), "subscript"));
                }
                c.push_back(expect_op("]"));
                n = make("subscript", std::move(c));
            } else {
                return n;
            }
        }
    }

    Node slice_item() {
        std::vector<Node> c;
        if (!at_op(":")) {
            Node e = star_named_expression();
            if (!at_op(":")) return e;
            c.push_back(std::move(e));
        }
        c.push_back(take());
        if (!at_op(":") && !at_op("]") && !at_op(",")) c.push_back(expression());
        if (at_op(":")) {
            c.push_back(take());
            if (!at_op("]") && !at_op(",")) c.push_back(expression());
        }
        return make("slice", std::move(c));
    }

    Node argument_list(bool allow_generator = false) {
        std::vector<Node> c{expect_op("(")};
        while (!at_op(")")) {
            if (at_op("*") || at_op("**")) {
                bool dict = at_op("**");
                Node star = take();
                c.push_back(make(dict ? "dictionary_splat" : "list_splat", {std::move(star), expression()}));
            } else if (at(TokenKind::Name) && !is_keyword(cur().text) && tok_is_op(peek(), "=")) {
                Node name = take();
                Node eq = take();
                c.push_back(make("keyword_argument", {with_field(std::move(name), "name"), std::move(eq),
                                                      with_field(expression(), "value")}));
            } else {
                Node e = named_expression();
                if (allow_generator && c.size() == 1 && (at_kw("for") || (at_kw("async") && tok_is_kw(peek(), "for")))) {
                    std::vector<Node> g{std::move(c.front()), with_field(std::move(e), "body")};
                    comprehension_clauses(g);
                    g.push_back(expect_op(")"));
                    return make("generator_expression", std::move(g));
                }
                c.push_back(std::move(e));
            }
            if (at_op(",")) {
                c.push_back(take());
            } else if (!at_op(")")) {
                fail("expected ',' or ')' in argument list");
            }
        }
        c.push_back(take());
        return make("argument_list", std::move(c));
    }

    bool at_comprehension() const { return at_kw("for") || (at_kw("async") && tok_is_kw(peek(), "for")); }

    void comprehension_clauses(std::vector<Node>& out) {
        while (true) {
            if (at_comprehension()) {
                std::vector<Node> f;
                if (at_kw("async")) f.push_back(take());
                f.push_back(take());
                f.push_back(with_field(target_list(), "left"));
                f.push_back(expect_kw("in"));
                f.push_back(with_field(disjunction(), "right"));
                out.push_back(make("for_in_clause", std::move(f)));
            } else if (at_kw("if")) {
                Node kw = take();
                out.push_back(make("if_clause", {std::move(kw), disjunction()}));
            } else {
                return;
            }
        }
    }

    Node atom() {
        const auto& t = cur();
        switch (t.kind) {
            case TokenKind::Name:
                if (t.text == "True" || t.text == "False" || t.text == "None" || !is_keyword(t.text)) return take();
                if (t.text == "yield") fail("'yield' outside parentheses");
                fail("invalid syntax");
            case TokenKind::Number:
                return take();
            case TokenKind::String: {
                Node first = take();
                if (!at(TokenKind::String)) return first;
                std::vector<Node> c{std::move(first)};
                while (at(TokenKind::String)) c.push_back(take());
                return make("concatenated_string", std::move(c));
            }
            case TokenKind::Op:
                if (t.text == "...") return make("ellipsis", {take()});
                if (t.text == "(") return paren_atom();
                if (t.text == "[") return list_atom();
                if (t.text == "{") return brace_atom();
                break;
            default:
                break;
        }
        fail("invalid syntax");
    }

    Node paren_atom() {
        Node open = take();
        if (at_op(")")) return make("tuple", {std::move(open), take()});
        if (at_kw("yield")) {
            Node y = yield_expression();
            return make("parenthesized_expression", {std::move(open), std::move(y), expect_op(")")});
        }
        Node first = star_named_expression();
        if (at_comprehension()) {
            std::vector<Node> c{std::move(open), with_field(std::move(first), "body")};
            comprehension_clauses(c);
            c.push_back(expect_op(")"));
            return make("generator_expression", std::move(c));
        }
        if (at_op(",")) {
            std::vector<Node> c{std::move(open), std::move(first)};
            while (at_op(",")) {
                c.push_back(take());
                if (at_op(")")) break;
                c.push_back(star_named_expression());
            }
            c.push_back(expect_op(")"));
            return make("tuple", std::move(c));
        }
        return make("parenthesized_expression", {std::move(open), std::move(first), expect_op(")")});
    }

    Node list_atom() {
        Node open = take();
        if (at_op("]")) return make("list", {std::move(open), take()});
        Node first = star_named_expression();
        if (at_comprehension()) {
            std::vector<Node> c{std::move(open), with_field(std::move(first), "body")};
            comprehension_clauses(c);
            c.push_back(expect_op("]"));
            return make("list_comprehension", std::move(c));
        }
        std::vector<Node> c{std::move(open), std::move(first)};
        while (at_op(",")) {
            c.push_back(take());
            if (at_op("]")) break;
            c.push_back(star_named_expression());
        }
        c.push_back(expect_op("]"));
        return make("list", std::move(c));
    }

    Node dict_item() {
        if (at_op("**")) {
            Node star = take();
            return make("dictionary_splat", {std::move(star), bitor_expr()});
        }
        Node key = expression();
        Node colon = expect_op(":");
        return make("pair", {with_field(std::move(key), "key"), std::move(colon), with_field(expression(), "value")});
    }

    Node brace_atom() {
        Node open = take();
        if (at_op("}")) return make("dictionary", {std::move(open), take()});
        bool is_dict;
        Node first;
        if (at_op("**")) {
            first = dict_item();
            is_dict = true;
        } else {
            Node e = star_named_expression();
            if (at_op(":")) {
                Node colon = take();
                first = make("pair", {with_field(std::move(e), "key"), std::move(colon), with_field(expression(), "value")});
                is_dict = true;
            } else {
                first = std::move(e);
                is_dict = false;
            }
        }
        if (at_comprehension()) {
            std::vector<Node> c{std::move(open), with_field(std::move(first), "body")};
            comprehension_clauses(c);
            c.push_back(expect_op("}"));
            return make(is_dict ? "dictionary_comprehension" : "set_comprehension", std::move(c));
        }
        std::vector<Node> c{std::move(open), std::move(first)};
        while (at_op(",")) {
            c.push_back(take());
            if (at_op("}")) break;
            c.push_back(is_dict ? dict_item() : star_named_expression());
        }
        c.push_back(expect_op("}"));
        return make(is_dict ? "dictionary" : "set", std::move(c));
    }

    std::string_view src_;
    std::vector<Token> toks_;
    std::vector<Token> comments_;
    std::size_t pos_ = 0;
};

void sexp_into(const Node& n, std::string& out, bool fields) {
    out.push_back('(');
    out.append(n.kind);
    for (const auto& c : n.children) {
        if (!c.named) continue;
        out.push_back(' ');
        if (fields && !c.field.empty()) {
            out.append(c.field);
            out.append(": ");
        }
        sexp_into(c, out, fields);
    }
    out.push_back(')');
}

}  // namespace

SyntaxTree parse_module(std::string source) {
    Parser p(source);
    Node root = p.module();
    auto comments = p.take_comments();
    return SyntaxTree(std::move(source), std::move(root), std::move(comments));
}

SyntaxTree parse_body(std::string_view body) {
    // An indented block is wrapped in a throwaway def so that its own
    // indentation is kept; unindented statements parse as a module.
    std::string_view first_line;
    for (auto line : text::split_lines(body)) {
        if (!text::trim(line).empty()) {
            first_line = line;
            break;
        }
    }
    bool indented = !first_line.empty() && (first_line.front() == ' ' || first_line.front() == '\t');
    if (!indented) return parse_module(std::string(body));

    std::string wrapped = "def __body__():\n";
    wrapped.append(body);
    SyntaxTree tree = parse_module(std::move(wrapped));
    const Node* def = nullptr;
    for (const auto& c : tree.root().children) {
        if (c.kind == "function_definition") def = &c;
    }
    if (def == nullptr || tree.root().children.size() != 1) throw ParseError("body is not a single block", 1, 0);
    Node module;
    module.kind = "module";
    module.begin = 0;
    module.end = tree.source().size();
    module.line = 1;
    module.children = def->child_by_field("body")->children;
    return SyntaxTree(tree.source(), std::move(module), tree.comments());
}

std::string sexp(const Node& n, bool fields) {
    std::string out;
    sexp_into(n, out, fields);
    return out;
}

}  // namespace intentfill::py
