#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "intentfill/python/tokenizer.hpp"

namespace intentfill::py {

/// One node of a concrete syntax tree. Node kinds follow the tree-sitter
/// Python grammar vocabulary (`function_definition`, `if_statement`,
/// `identifier`, ...). Keywords and punctuation are kept as anonymous leaves
/// whose kind is their literal text.
struct Node {
    std::string kind;
    bool named = true;
    std::string field;  // role within the parent ("name", "body", ...); may be empty
    std::size_t begin = 0;
    std::size_t end = 0;
    int line = 0;  // 1-based line of `begin`
    std::vector<Node> children;

    bool leaf() const noexcept { return children.empty(); }
    const Node* child_by_field(std::string_view f) const noexcept;
    std::string_view text(std::string_view source) const { return source.substr(begin, end - begin); }
};

/// Owns its source so node offsets stay valid for the tree's lifetime.
class SyntaxTree {
public:
    SyntaxTree(std::string source, Node root, std::vector<Token> comments)
        : source_(std::move(source)), root_(std::move(root)), comments_(std::move(comments)) {
        rebind();
    }
    SyntaxTree(const SyntaxTree& o) : source_(o.source_), root_(o.root_), comments_(o.comments_) { rebind(); }
    SyntaxTree(SyntaxTree&& o) noexcept
        : source_(std::move(o.source_)), root_(std::move(o.root_)), comments_(std::move(o.comments_)) {
        rebind();
    }
    SyntaxTree& operator=(SyntaxTree o) noexcept {
        source_ = std::move(o.source_);
        root_ = std::move(o.root_);
        comments_ = std::move(o.comments_);
        rebind();
        return *this;
    }

    const std::string& source() const noexcept { return source_; }
    const Node& root() const noexcept { return root_; }
    std::string_view text(const Node& n) const { return n.text(source_); }
    /// Comment tokens; their text views point into source().
    const std::vector<Token>& comments() const noexcept { return comments_; }

private:
    void rebind() noexcept {
        for (auto& c : comments_) c.text = std::string_view(source_).substr(c.begin, c.end - c.begin);
    }

    std::string source_;
    Node root_;
    std::vector<Token> comments_;
};

/// Parses a whole module. Throws ParseError on invalid syntax.
SyntaxTree parse_module(std::string source);

/// Parses a function body (an indented statement block or unindented
/// statements). The root is a `module` holding the body's statements; node
/// offsets are relative to the wrapper text held by the returned tree.
SyntaxTree parse_body(std::string_view body);

/// S-expression of the named structure, e.g. `(return_statement (identifier))`.
/// With `fields`, children playing a role are labelled: `(call function: (identifier) ...)`.
std::string sexp(const Node& n, bool fields = false);

template <typename F>
void walk(const Node& n, F&& visit) {
    visit(n);
    for (const auto& c : n.children) walk(c, visit);
}

}  // namespace intentfill::py
