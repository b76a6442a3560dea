#include "intentfill/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "intentfill/python/syntax_tree.hpp"
#include "intentfill/python/tokenizer.hpp"
#include "intentfill/text.hpp"

namespace intentfill::eval {

// ---- edit similarity ---------------------------------------------------

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t up = row[j];
            row[j] = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

double edit_similarity(std::string_view ref, std::string_view hyp) {
    auto r = text::utf8_decode(text::normalize_lines(ref));
    auto h = text::utf8_decode(text::normalize_lines(hyp));
    std::size_t longest = std::max(r.size(), h.size());
    if (longest == 0) return 100.0;
    return 100.0 * (1.0 - double(levenshtein(r, h)) / double(longest));
}

// ---- weights -----------------------------------------------------------

void CodeBleuWeights::validate() const {
    for (double w : {ngram, weighted_ngram, syntax, dataflow}) {
        if (!(w >= 0) || !std::isfinite(w)) throw Error("codebleu weights must be finite and non-negative");
    }
    if (ngram + weighted_ngram + syntax + dataflow <= 0) throw Error("codebleu weights sum to zero");
}

void to_json(nlohmann::json& j, const CodeBleuWeights& w) {
    j = {{"ngram", w.ngram}, {"weighted_ngram", w.weighted_ngram}, {"syntax", w.syntax}, {"dataflow", w.dataflow}};
}

void from_json(const nlohmann::json& j, CodeBleuWeights& w) {
    w = CodeBleuWeights{};
    for (auto& [k, v] : j.items()) {
        if (k == "ngram") w.ngram = v.get<double>();
        else if (k == "weighted_ngram") w.weighted_ngram = v.get<double>();
        else if (k == "syntax") w.syntax = v.get<double>();
        else if (k == "dataflow") w.dataflow = v.get<double>();
        else throw Error("unknown codebleu weight '" + k + "'");
    }
    w.validate();
}

void to_json(nlohmann::json& j, const CodeBleuResult& r) {
    j = {{"score", r.score},
         {"ngram", r.ngram},
         {"weighted_ngram", r.weighted_ngram},
         {"syntax", r.syntax},
         {"dataflow", r.dataflow}};
    if (r.hyp_unparseable) j["hyp_unparseable"] = true;
    if (r.ref_unparseable) j["ref_unparseable"] = true;
}

// ---- n-gram components -------------------------------------------------

const std::vector<std::string>& python_keywords() {
    static const std::vector<std::string> kw{
        "False", "None",   "True",  "and",      "as",    "assert", "async",  "await",  "break",
        "class", "continue", "def", "del",      "elif",  "else",   "except", "finally", "for",
        "from",  "global", "if",    "import",   "in",    "is",     "lambda", "nonlocal", "not",
        "or",    "pass",   "raise", "return",   "try",   "while",  "with",   "yield",  "match",
        "case",  "type",
    };
    return kw;
}

namespace {

using Tokens = std::vector<std::string>;
using Gram = std::vector<std::string>;

std::map<Gram, std::size_t> count_ngrams(const Tokens& t, std::size_t n) {
    std::map<Gram, std::size_t> out;
    if (t.size() < n) return out;
    for (std::size_t i = 0; i + n <= t.size(); ++i) ++out[Gram(t.begin() + long(i), t.begin() + long(i + n))];
    return out;
}

double brevity_penalty(double ref_len, double hyp_len) {
    if (hyp_len > ref_len) return 1.0;
    if (hyp_len == 0) return 0.0;
    return std::exp(1.0 - ref_len / hyp_len);
}

// Fraction (numerator, denominator) per order; smoothing and the geometric
// mean are shared by both BLEU flavours.
using Fractions = std::vector<std::pair<double, double>>;

double combine(const Fractions& p, double bp) {
    if (p.empty()) return 0.0;
    if (p.front().first == 0) return 0.0;
    double w = 1.0 / double(p.size());
    double s = 0;
    for (auto [num, den] : p) {
        if (num == 0) num = 0.1;
        s += w * std::log(num / den);
    }
    return bp * std::exp(s);
}

std::size_t active_orders(const Tokens& ref, const Tokens& hyp) { return std::min<std::size_t>({4, ref.size(), hyp.size()}); }

}  // namespace

double bleu(const Tokens& ref, const Tokens& hyp) {
    if (ref.empty() && hyp.empty()) return 1.0;
    Fractions p;
    for (std::size_t n = 1; n <= active_orders(ref, hyp); ++n) {
        auto hc = count_ngrams(hyp, n);
        auto rc = count_ngrams(ref, n);
        double num = 0, total = 0;
        for (auto& [g, c] : hc) {
            total += double(c);
            auto it = rc.find(g);
            if (it != rc.end()) num += double(std::min(c, it->second));
        }
        p.emplace_back(num, std::max(1.0, total));
    }
    return combine(p, brevity_penalty(double(ref.size()), double(hyp.size())));
}

double weighted_bleu(const Tokens& ref, const Tokens& hyp) {
    if (ref.empty() && hyp.empty()) return 1.0;
    static const std::unordered_set<std::string> keywords(python_keywords().begin(), python_keywords().end());
    auto weight = [&](const std::string& tok) { return keywords.count(tok) ? 1.0 : 0.2; };
    Fractions p;
    for (std::size_t n = 1; n <= active_orders(ref, hyp); ++n) {
        auto hc = count_ngrams(hyp, n);
        auto rc = count_ngrams(ref, n);
        double num = 0, den = 0;
        for (auto& [g, c] : rc) {
            double w = n == 1 ? weight(g.front()) : 1.0;
            auto it = hc.find(g);
            if (it != hc.end()) num += w * double(std::min(c, it->second));
            den += w * double(c);
        }
        p.emplace_back(num, den > 0 ? den : 1.0);
    }
    return combine(p, 1.0);
}

// ---- comment and docstring removal -------------------------------------

std::string strip_comments_and_docstrings(std::string_view code) {
    std::vector<py::Token> toks;
    try {
        toks = py::tokenize(code);
    } catch (const py::ParseError&) {
        return std::string(code);
    }
    std::vector<std::pair<std::size_t, std::size_t>> cut;
    // A string opening a logical line directly after an indent or a
    // newline (no blank line in between) is a docstring, as is any string
    // starting in column 0.
    enum class Prev { Indent, Newline, Other } prev = Prev::Indent;
    int newline_line = 0;
    for (const auto& t : toks) {
        switch (t.kind) {
        case py::TokenKind::Comment:
            cut.emplace_back(t.begin, t.end);
            continue;
        case py::TokenKind::String: {
            bool after_newline = prev == Prev::Newline && t.line == newline_line + 1;
            bool docstring = prev == Prev::Indent || after_newline || t.col == 0;
            if (docstring) cut.emplace_back(t.begin, t.end);
            prev = Prev::Other;
            break;
        }
        case py::TokenKind::Indent:
            prev = Prev::Indent;
            break;
        case py::TokenKind::Newline:
            prev = Prev::Newline;
            newline_line = t.line;
            break;
        case py::TokenKind::Dedent:
        case py::TokenKind::EndMarker:
            if (t.kind == py::TokenKind::Dedent) prev = Prev::Other;
            break;
        default:
            prev = Prev::Other;
        }
    }
    std::string kept;
    std::size_t pos = 0;
    for (auto [b, e] : cut) {
        kept.append(code.substr(pos, b - pos));
        pos = e;
    }
    kept.append(code.substr(pos));
    std::string out;
    for (auto line : text::split_lines(kept)) {
        if (text::trim(line).empty()) continue;
        if (!out.empty()) out.push_back('\n');
        out.append(line);
    }
    return out;
}

// ---- syntax match ------------------------------------------------------

namespace {

py::Node leaf(std::string kind, std::string field = {}) {
    py::Node n;
    n.kind = std::move(kind);
    n.field = std::move(field);
    return n;
}

py::Node expand_strings(const py::Node& n, std::string_view src);

// An embedded f-string expression, parsed on its own.
std::optional<py::Node> parse_embedded(std::string_view expr) {
    std::string src(text::trim(expr));
    if (src.empty()) return std::nullopt;
    try {
        auto tree = py::parse_module("(" + src + ")");
        const auto& stmt = tree.root().children.at(0);
        const auto& paren = stmt.children.at(0);
        for (const auto& c : paren.children) {
            if (c.named) {
                py::Node e = expand_strings(c, tree.source());
                e.field = "expression";
                return e;
            }
        }
    } catch (const std::exception&) {
    }
    return std::nullopt;
}

// Finds the end of a replacement field's expression starting at `i`:
// the first '!', ':', '=' (debug form) or '}' at bracket depth 0.
std::size_t scan_expression(std::string_view s, std::size_t i) {
    int depth = 0;
    while (i < s.size()) {
        char c = s[i];
        if (c == '\'' || c == '"') {
            char q = c;
            ++i;
            while (i < s.size() && s[i] != q) i += s[i] == '\\' ? 2 : 1;
            ++i;
            continue;
        }
        if (c == '(' || c == '[' || c == '{') ++depth;
        else if ((c == ')' || c == ']' || c == '}') && depth > 0) --depth;
        else if (depth == 0) {
            if (c == '}' || c == ':') return i;
            if (c == '!' && (i + 1 >= s.size() || s[i + 1] != '=')) return i;
            if (c == '=' && i + 1 < s.size() && s[i + 1] != '=' && i > 0 &&
                std::string_view("=!<>").find(s[i - 1]) == std::string_view::npos) {
                std::size_t j = i + 1;
                while (j < s.size() && s[j] == ' ') ++j;
                if (j < s.size() && (s[j] == '}' || s[j] == '!' || s[j] == ':')) return i;
            }
        }
        ++i;
    }
    return i;
}

std::size_t match_escape(std::string_view s, std::size_t i) {
    static const std::regex re(R"(^\\(u[0-9a-fA-F]{4}|U[0-9a-fA-F]{8}|x[0-9a-fA-F]{2}|[0-7]{1,3}|\r?\n|['"abfrntv\\]|N\{[^}]+\}))");
    std::match_results<std::string_view::const_iterator> m;
    if (std::regex_search(s.begin() + long(i), s.end(), m, re)) return std::size_t(m.length(0));
    return 0;
}

struct StringScanner {
    std::string_view s;
    bool raw = false;
    bool fmt = false;
    std::vector<py::Node> parts;
    std::vector<py::Node> content;  // children of the pending string_content
    bool pending = false;

    void flush() {
        if (!pending) return;
        py::Node n = leaf("string_content");
        n.children = std::move(content);
        content.clear();
        parts.push_back(std::move(n));
        pending = false;
    }

    // Scans [i, end) as literal text with escapes and, for f-strings, nested
    // replacement fields. `in_spec` marks a format specifier.
    void scan(std::size_t i, std::size_t end, std::vector<py::Node>* spec_out) {
        while (i < end) {
            char c = s[i];
            if (fmt && c == '{') {
                if (!spec_out && i + 1 < end && s[i + 1] == '{') {
                    pending = true;
                    content.push_back(leaf("escape_interpolation"));
                    i += 2;
                    continue;
                }
                i = field(i, end, spec_out);
                continue;
            }
            if (fmt && !spec_out && c == '}' && i + 1 < end && s[i + 1] == '}') {
                pending = true;
                content.push_back(leaf("escape_interpolation"));
                i += 2;
                continue;
            }
            if (!raw && c == '\\' && !spec_out) {
                if (std::size_t len = match_escape(s.substr(0, end), i)) {
                    pending = true;
                    content.push_back(leaf("escape_sequence"));
                    i += len;
                    continue;
                }
            }
            if (!spec_out) pending = true;
            ++i;
        }
    }

    // A replacement field starting at the '{' at `i`; returns the index past
    // its closing brace.
    std::size_t field(std::size_t i, std::size_t end, std::vector<py::Node>* spec_out) {
        std::size_t e = std::min(scan_expression(s.substr(0, end), i + 1), end);
        py::Node interp = leaf(spec_out ? "format_expression" : "interpolation");
        if (auto expr = parse_embedded(s.substr(i + 1, e - i - 1))) interp.children.push_back(std::move(*expr));
        std::size_t j = e;
        if (j < end && s[j] == '=') ++j;
        if (j < end && s[j] == '!') {
            interp.children.push_back(leaf("type_conversion", "type_conversion"));
            while (j < end && s[j] != ':' && s[j] != '}') ++j;
        }
        if (j < end && s[j] == ':') {
            std::size_t k = j + 1;
            int depth = 0;
            std::size_t close = k;
            for (; close < end; ++close) {
                if (s[close] == '{') ++depth;
                else if (s[close] == '}') {
                    if (depth == 0) break;
                    --depth;
                }
            }
            py::Node spec = leaf("format_specifier", "format_specifier");
            std::vector<py::Node> nested;
            scan(k, close, &nested);
            spec.children = std::move(nested);
            interp.children.push_back(std::move(spec));
            j = close;
        }
        if (j < end && s[j] == '}') ++j;
        if (spec_out) {
            spec_out->push_back(std::move(interp));
        } else {
            flush();
            parts.push_back(std::move(interp));
        }
        return j;
    }
};

py::Node string_node(std::string_view lit) {
    std::size_t p = 0;
    while (p < lit.size() && std::isalpha(static_cast<unsigned char>(lit[p]))) ++p;
    std::string prefix = text::to_lower(lit.substr(0, p));
    std::size_t q = (lit.size() >= p + 6 && (lit.substr(p, 3) == "\"\"\"" || lit.substr(p, 3) == "'''")) ? 3 : 1;
    py::Node n = leaf("string");
    n.children.push_back(leaf("string_start"));
    if (lit.size() >= p + 2 * q) {
        StringScanner sc;
        sc.s = lit.substr(p + q, lit.size() - p - 2 * q);
        sc.raw = prefix.find('r') != std::string::npos;
        sc.fmt = prefix.find('f') != std::string::npos;
        sc.scan(0, sc.s.size(), nullptr);
        sc.flush();
        for (auto& part : sc.parts) n.children.push_back(std::move(part));
    }
    n.children.push_back(leaf("string_end"));
    return n;
}

py::Node expand_strings(const py::Node& n, std::string_view src) {
    if (n.kind == "string") {
        py::Node s = string_node(n.text(src));
        s.field = n.field;
        s.named = n.named;
        return s;
    }
    py::Node out;
    out.kind = n.kind;
    out.named = n.named;
    out.field = n.field;
    out.children.reserve(n.children.size());
    for (const auto& c : n.children) out.children.push_back(expand_strings(c, src));
    return out;
}

std::vector<std::string> subtrees(const py::Node& root) {
    std::vector<std::string> out;
    std::vector<const py::Node*> stack{&root};
    while (!stack.empty()) {
        const py::Node* n = stack.back();
        stack.pop_back();
        out.push_back(py::sexp(*n, true));
        for (const auto& c : n->children) {
            if (!c.children.empty()) stack.push_back(&c);
        }
    }
    return out;
}

py::SyntaxTree parse_prepared(std::string_view code) {
    std::string src(text::trim(text::dedent(code)));
    std::string stripped = strip_comments_and_docstrings(src);
    try {
        return py::parse_module(stripped);
    } catch (const py::ParseError&) {
        // Dropping a docstring can empty a block; keep the original then.
        if (stripped == src) throw;
        return py::parse_module(src);
    }
}

}  // namespace

namespace {

double syntax_match(const py::SyntaxTree& rt, const py::SyntaxTree& ht) {
    auto ref_trees = subtrees(expand_strings(rt.root(), rt.source()));
    auto hyp_list = subtrees(expand_strings(ht.root(), ht.source()));
    std::unordered_set<std::string> hyp_trees(hyp_list.begin(), hyp_list.end());
    std::size_t hit = 0;
    for (const auto& s : ref_trees) hit += hyp_trees.count(s);
    return ref_trees.empty() ? 0.0 : double(hit) / double(ref_trees.size());
}

}  // namespace

double syntax_match(std::string_view ref, std::string_view hyp) {
    return syntax_match(parse_prepared(ref), parse_prepared(hyp));
}

// ---- dataflow ----------------------------------------------------------

namespace {

using States = std::map<std::string, std::vector<int>>;
using Edges = std::vector<DataflowEdge>;

void sort_by_index(Edges& e) {
    std::stable_sort(e.begin(), e.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
}

// Union keeping first occurrences in order.
std::vector<std::string> merge_names(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (auto& x : a) {
        if (seen.insert(x).second) out.push_back(std::move(x));
    }
    return out;
}

template <typename T>
std::vector<T> sorted_unique(std::vector<T> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

class DataflowBuilder {
public:
    explicit DataflowBuilder(const py::SyntaxTree& tree) : tree_(tree) { index(tree.root()); }

    Edges run() {
        auto [edges, states] = visit(tree_.root(), {});
        (void)states;
        return edges;
    }

private:
    struct Tok {
        int idx;
        std::string code;
    };

    static bool is_token(const py::Node& n) { return (n.leaf() || n.kind == "string") && n.kind != "comment"; }

    void index(const py::Node& n) {
        if (is_token(n)) {
            std::string code(tree_.text(n));
            code.erase(std::remove(code.begin(), code.end(), '\n'), code.end());
            toks_.emplace(&n, Tok{int(toks_.size()), std::move(code)});
            return;
        }
        for (const auto& c : n.children) index(c);
    }

    void variables(const py::Node& n, std::vector<const Tok*>& out) const {
        if (is_token(n)) {
            const Tok& t = toks_.at(&n);
            if (n.kind != t.code) out.push_back(&t);
            return;
        }
        for (const auto& c : n.children) variables(c, out);
    }

    std::vector<const Tok*> variables(const py::Node& n) const {
        std::vector<const Tok*> out;
        variables(n, out);
        return out;
    }

    static std::vector<const py::Node*> non_commas(const py::Node& n) {
        std::vector<const py::Node*> out;
        for (const auto& c : n.children) {
            if (c.kind != ",") out.push_back(&c);
        }
        return out;
    }

    // Pairs up targets and values element-wise when both sides are
    // sequences of equal length, otherwise treats each side whole.
    static void pair_sides(const py::Node* left, const py::Node* right, std::vector<const py::Node*>& lhs,
                           std::vector<const py::Node*>& rhs) {
        lhs = non_commas(*left);
        rhs = non_commas(*right);
        if (lhs.size() != rhs.size()) {
            lhs = {left};
            rhs = {right};
        }
        if (lhs.empty()) lhs = {left};
        if (rhs.empty()) rhs = {right};
    }

    void bind(const std::vector<const py::Node*>& lhs, const std::vector<const py::Node*>& rhs, Edges& out,
              States& states) const {
        for (std::size_t i = 0; i < std::min(lhs.size(), rhs.size()); ++i) {
            auto targets = variables(*lhs[i]);
            auto sources = variables(*rhs[i]);
            for (const Tok* t : targets) {
                DataflowEdge e{t->code, t->idx, "computedFrom", {}, {}};
                for (const Tok* s : sources) {
                    e.parents.push_back(s->code);
                    e.parent_indices.push_back(s->idx);
                }
                out.push_back(std::move(e));
                states[t->code] = {t->idx};
            }
        }
    }

    // Loops are walked twice; the repeated edges are folded per (name,
    // index, relation) with parents unioned.
    static Edges fold(const Edges& edges) {
        Edges out;
        std::map<std::tuple<std::string, int, std::string>, std::size_t> seen;
        for (const auto& e : edges) {
            auto key = std::make_tuple(e.name, e.index, e.relation);
            auto it = seen.find(key);
            if (it == seen.end()) {
                seen.emplace(key, out.size());
                out.push_back(e);
                continue;
            }
            auto& d = out[it->second];
            d.parents = merge_names(std::move(d.parents), e.parents);
            d.parent_indices.insert(d.parent_indices.end(), e.parent_indices.begin(), e.parent_indices.end());
            d.parent_indices = sorted_unique(std::move(d.parent_indices));
        }
        sort_by_index(out);
        return out;
    }

    std::pair<Edges, States> visit(const py::Node& n, States states) const {
        const std::string& k = n.kind;
        if (is_token(n)) {
            const Tok& t = toks_.at(&n);
            if (k == t.code) return {{}, states};
            auto it = states.find(t.code);
            if (it != states.end()) return {{DataflowEdge{t.code, t.idx, "comesFrom", {t.code}, it->second}}, states};
            if (k == "identifier") states[t.code] = {t.idx};
            return {{DataflowEdge{t.code, t.idx, "comesFrom", {}, {}}}, states};
        }
        if (k == "default_parameter") {
            const py::Node* name = n.child_by_field("name");
            const py::Node* value = n.child_by_field("value");
            Edges out;
            if (!name) return {out, states};
            if (!value) {
                for (const Tok* t : variables(*name)) {
                    out.push_back({t->code, t->idx, "comesFrom", {}, {}});
                    states[t->code] = {t->idx};
                }
                sort_by_index(out);
                return {out, states};
            }
            auto names = variables(*name);
            auto values = variables(*value);
            auto [sub, st] = visit(*value, states);
            states = std::move(st);
            out = std::move(sub);
            for (const Tok* t : names) {
                for (const Tok* v : values) out.push_back({t->code, t->idx, "comesFrom", {v->code}, {v->idx}});
                states[t->code] = {t->idx};
            }
            sort_by_index(out);
            return {out, states};
        }
        if (k == "assignment" || k == "augmented_assignment" || k == "for_in_clause") {
            std::vector<const py::Node*> lhs, rhs;
            if (k == "for_in_clause") {
                const py::Node* left = n.child_by_field("left");
                if (!left || n.children.empty()) return {{}, states};
                lhs = {left};
                rhs = {&n.children.back()};
            } else {
                const py::Node* left = n.child_by_field("left");
                const py::Node* right = n.child_by_field("right");
                if (!right || !left) return {{}, states};
                pair_sides(left, right, lhs, rhs);
            }
            Edges out;
            for (const py::Node* r : rhs) {
                auto [sub, st] = visit(*r, std::move(states));
                states = std::move(st);
                out.insert(out.end(), sub.begin(), sub.end());
            }
            bind(lhs, rhs, out, states);
            sort_by_index(out);
            return {out, states};
        }
        if (k == "if_statement") {
            Edges out;
            States current = states;
            std::vector<States> branches;
            bool has_else = false;
            for (const auto& c : n.children) {
                if (c.kind.find("else") != std::string::npos) has_else = true;
                if (c.kind != "elif_clause" && c.kind != "else_clause") {
                    auto [sub, st] = visit(c, std::move(current));
                    current = std::move(st);
                    out.insert(out.end(), sub.begin(), sub.end());
                } else {
                    auto [sub, st] = visit(c, states);
                    out.insert(out.end(), sub.begin(), sub.end());
                    branches.push_back(std::move(st));
                }
            }
            branches.push_back(std::move(current));
            if (!has_else) branches.push_back(states);
            States merged;
            for (const auto& b : branches) {
                for (const auto& [name, idx] : b) {
                    auto& m = merged[name];
                    m.insert(m.end(), idx.begin(), idx.end());
                }
            }
            for (auto& [name, idx] : merged) idx = sorted_unique(std::move(idx));
            sort_by_index(out);
            return {out, merged};
        }
        if (k == "for_statement") {
            Edges out;
            const py::Node* left = n.child_by_field("left");
            const py::Node* right = n.child_by_field("right");
            if (!left || !right) return {{}, states};
            for (int pass = 0; pass < 2; ++pass) {
                std::vector<const py::Node*> lhs, rhs;
                pair_sides(left, right, lhs, rhs);
                for (const py::Node* r : rhs) {
                    auto [sub, st] = visit(*r, std::move(states));
                    states = std::move(st);
                    out.insert(out.end(), sub.begin(), sub.end());
                }
                bind(lhs, rhs, out, states);
                if (n.children.back().kind == "block") {
                    auto [sub, st] = visit(n.children.back(), std::move(states));
                    states = std::move(st);
                    out.insert(out.end(), sub.begin(), sub.end());
                }
            }
            return {fold(out), states};
        }
        if (k == "while_statement") {
            Edges out;
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& c : n.children) {
                    auto [sub, st] = visit(c, std::move(states));
                    states = std::move(st);
                    out.insert(out.end(), sub.begin(), sub.end());
                }
            }
            return {fold(out), states};
        }
        Edges out;
        for (int first : {1, 0}) {
            for (const auto& c : n.children) {
                if ((c.kind == "for_in_clause") != bool(first)) continue;
                auto [sub, st] = visit(c, std::move(states));
                states = std::move(st);
                out.insert(out.end(), sub.begin(), sub.end());
            }
        }
        sort_by_index(out);
        return {out, states};
    }

    const py::SyntaxTree& tree_;
    std::unordered_map<const py::Node*, Tok> toks_;
};

using NormalEdge = std::tuple<std::string, std::string, std::vector<std::string>>;

std::vector<NormalEdge> normalize(const Edges& edges) {
    std::unordered_map<std::string, std::string> names;
    auto rename = [&](const std::string& n) {
        auto it = names.find(n);
        if (it == names.end()) it = names.emplace(n, "var_" + std::to_string(names.size())).first;
        return it->second;
    };
    std::vector<NormalEdge> out;
    for (const auto& e : edges) {
        std::vector<std::string> parents;
        for (const auto& p : e.parents) parents.push_back(rename(p));
        out.emplace_back(rename(e.name), e.relation, std::move(parents));
    }
    return out;
}

}  // namespace

namespace {

Edges dataflow_graph(const py::SyntaxTree& tree) {
    Edges all = DataflowBuilder(tree).run();
    sort_by_index(all);
    std::set<int> involved;
    for (const auto& e : all) {
        if (!e.parent_indices.empty()) involved.insert(e.index);
        involved.insert(e.parent_indices.begin(), e.parent_indices.end());
    }
    // Edges sharing a token index collapse into one with merged parents.
    Edges out;
    std::map<int, std::size_t> at;
    for (const auto& e : all) {
        if (!involved.count(e.index)) continue;
        auto it = at.find(e.index);
        if (it == at.end()) {
            at.emplace(e.index, out.size());
            out.push_back(e);
            continue;
        }
        auto& d = out[it->second];
        d = DataflowEdge{e.name, e.index, e.relation, d.parents, d.parent_indices};
        d.parents = merge_names(std::move(d.parents), e.parents);
        d.parent_indices.insert(d.parent_indices.end(), e.parent_indices.begin(), e.parent_indices.end());
        d.parent_indices = sorted_unique(std::move(d.parent_indices));
    }
    return out;
}

double dataflow_match(const py::SyntaxTree& rt, const py::SyntaxTree& ht) {
    auto ref_edges = normalize(dataflow_graph(rt));
    auto hyp_edges = normalize(dataflow_graph(ht));
    if (ref_edges.empty()) return 1.0;
    std::size_t hit = 0;
    for (const auto& e : ref_edges) {
        auto it = std::find(hyp_edges.begin(), hyp_edges.end(), e);
        if (it != hyp_edges.end()) {
            ++hit;
            hyp_edges.erase(it);
        }
    }
    return double(hit) / double(ref_edges.size());
}

std::optional<py::SyntaxTree> try_parse(std::string_view code) {
    try {
        return parse_prepared(code);
    } catch (const py::ParseError&) {
        return std::nullopt;
    }
}

}  // namespace

std::vector<DataflowEdge> dataflow_graph(std::string_view code) { return dataflow_graph(parse_prepared(code)); }

double dataflow_match(std::string_view ref, std::string_view hyp) {
    return dataflow_match(parse_prepared(ref), parse_prepared(hyp));
}

// ---- composite ---------------------------------------------------------

CodeBleuResult codebleu(std::string_view ref, std::string_view hyp, const CodeBleuWeights& weights) {
    weights.validate();
    CodeBleuResult r;
    auto words = [](std::string_view s) {
        Tokens out;
        for (auto w : text::split_words(s)) out.emplace_back(w);
        return out;
    };
    Tokens rt = words(ref);
    Tokens ht = words(hyp);
    r.ngram = bleu(rt, ht);
    r.weighted_ngram = weighted_bleu(rt, ht);

    auto rtree = try_parse(ref);
    auto htree = try_parse(hyp);
    r.ref_unparseable = !rtree;
    r.hyp_unparseable = !htree;
    if (rtree && htree) {
        r.syntax = syntax_match(*rtree, *htree);
        r.dataflow = dataflow_match(*rtree, *htree);
    }
    double total = weights.ngram + weights.weighted_ngram + weights.syntax + weights.dataflow;
    r.score = 100.0 *
              (weights.ngram * r.ngram + weights.weighted_ngram * r.weighted_ngram + weights.syntax * r.syntax +
               weights.dataflow * r.dataflow) /
              total;
    return r;
}

}  // namespace intentfill::eval
