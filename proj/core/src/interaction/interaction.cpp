#include "intentfill/interaction/interaction.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <regex>

#include <nlohmann/json.hpp>

#include "intentfill/text.hpp"

namespace intentfill::interaction {

using nlohmann::json;

double cosine(const std::vector<float>& a, const std::vector<float>& b) {
    if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw ZeroVector();
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

Embedder backend_embedder(gateway::Backend& backend) {
    return [&backend](const std::string& s) { return backend.embed(s); };
}

int simulate_select(const std::vector<completion::CandidateIntent>& candidates, const std::string& oracle_doc,
                    const Embedder& embed) {
    if (candidates.empty()) throw completion::InvalidAction("no candidates to select from");
    if (candidates.size() == 1) return candidates.front().rank;
    const auto target = embed(oracle_doc);
    auto ordered = candidates;
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto& x, const auto& y) { return x.rank < y.rank; });
    int best_rank = ordered.front().rank;
    double best = -2.0;
    for (const auto& c : ordered) {
        const double sim = cosine(embed(c.docstring_text), target);
        if (sim > best) {
            best = sim;
            best_rank = c.rank;
        }
    }
    return best_rank;
}

void to_json(json& j, const EditOp& op) {
    j = json{{"position", op.position}, {"old", op.old_token}, {"new", op.new_token}};
}

void from_json(const json& j, EditOp& op) {
    op.position = j.at("position").get<int>();
    op.old_token = j.at("old").get<std::string>();
    op.new_token = j.at("new").get<std::string>();
}

namespace {

struct Tok {
    std::size_t begin;
    std::size_t end;
    int line;
    bool first_on_line;
};

std::vector<Tok> tokens_of(const std::string& s) {
    std::vector<Tok> out;
    int line = 0;
    std::size_t i = 0;
    bool line_start = true;
    while (i < s.size()) {
        const char c = s[i];
        if (c == '\n') {
            ++line;
            line_start = true;
            ++i;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else {
            auto j = i;
            while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back({i, j, line, line_start});
            line_start = false;
            i = j;
        }
    }
    return out;
}

std::string_view tok_text(const std::string& s, const Tok& t) { return std::string_view(s).substr(t.begin, t.end - t.begin); }

bool is_header(std::string_view t) {
    return t == "Args:" || t == "Arguments:" || t == "Parameters:" || t == "Returns:" || t == "Return:" ||
           t == "Yields:" || t == "Raises:" || t == "Examples:" || t == "Example:" || t == "Note:";
}

/// Token indices of the identifier slots in a Google-style docstring.
struct Slots {
    std::optional<std::size_t> returns_type;
    std::vector<std::size_t> arg_names;
    std::vector<std::optional<std::size_t>> arg_types;  // parallel to arg_names
    bool structured = false;
};

Slots find_slots(const std::string& s, const std::vector<Tok>& toks) {
    static const std::regex name_re(R"(^\*{0,2}[A-Za-z_]\w*$)");
    static const std::regex type_re(R"(^\([^()\s]+\):?$)");
    Slots slots;
    enum { None, Args, Returns } section = None;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const auto t = tok_text(s, toks[i]);
        if (toks[i].first_on_line && is_header(t)) {
            slots.structured = true;
            section = (t == "Returns:" || t == "Return:") ? Returns : (t == "Raises:" || t == "Yields:" ||
                                                                       t == "Examples:" || t == "Example:" ||
                                                                       t == "Note:")
                                                                          ? None
                                                                          : Args;
            if (section == Returns && i + 1 < toks.size()) {
                // "type: description" on the next line, or on the header line.
                const auto next = tok_text(s, toks[i + 1]);
                if (next.size() > 1 && next.back() == ':' && !is_header(next)) slots.returns_type = i + 1;
            }
            continue;
        }
        if (section == Args && toks[i].first_on_line) {
            std::string name(t);
            if (!name.empty() && name.back() == ':') name.pop_back();
            if (!std::regex_match(name, name_re)) continue;
            slots.arg_names.push_back(i);
            std::optional<std::size_t> type;
            if (i + 1 < toks.size() && toks[i + 1].line == toks[i].line &&
                std::regex_match(std::string(tok_text(s, toks[i + 1])), type_re))
                type = i + 1;
            slots.arg_types.push_back(type);
        }
    }
    return slots;
}

bool identifier_like(std::string_view t) {
    static const std::regex re(R"(^[\(\[]?[A-Za-z_][\w\.\[\],|]*[\)\]]?:?,?$)");
    return std::regex_match(std::string(t), re);
}

/// Same-length replaced runs of an LCS alignment between token sequences,
/// paired positionally.
std::vector<std::pair<std::size_t, std::size_t>> substitutions(const std::vector<std::string>& a,
                                                               const std::vector<std::string>& b) {
    const auto n = a.size(), m = b.size();
    std::vector<std::vector<int>> L(n + 1, std::vector<int>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = m; j-- > 0;)
            L[i][j] = a[i] == b[j] ? L[i + 1][j + 1] + 1 : std::max(L[i + 1][j], L[i][j + 1]);

    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::vector<std::size_t> dels, ins;
    auto flush = [&] {
        if (dels.size() == ins.size())
            for (std::size_t k = 0; k < dels.size(); ++k) out.emplace_back(dels[k], ins[k]);
        dels.clear();
        ins.clear();
    };
    std::size_t i = 0, j = 0;
    while (i < n || j < m) {
        if (i < n && j < m && a[i] == b[j]) {
            flush();
            ++i;
            ++j;
        } else if (j == m || (i < n && L[i + 1][j] >= L[i][j + 1])) {
            dels.push_back(i++);
        } else {
            ins.push_back(j++);
        }
    }
    flush();
    return out;
}

}  // namespace

EditResult simulate_edit(const std::string& selected, const std::string& oracle, std::size_t max_edits) {
    EditResult r{selected, {}};
    const auto st = tokens_of(selected);
    const auto ot = tokens_of(oracle);
    const auto ss = find_slots(selected, st);
    const auto os = find_slots(oracle, ot);

    std::vector<std::pair<std::size_t, std::size_t>> plan;  // (selected token, oracle token)
    if (ss.structured && os.structured) {
        if (ss.returns_type && os.returns_type) plan.emplace_back(*ss.returns_type, *os.returns_type);
        const auto n = std::min(ss.arg_names.size(), os.arg_names.size());
        for (std::size_t i = 0; i < n; ++i) plan.emplace_back(ss.arg_names[i], os.arg_names[i]);
        for (std::size_t i = 0; i < n; ++i)
            if (ss.arg_types[i] && os.arg_types[i]) plan.emplace_back(*ss.arg_types[i], *os.arg_types[i]);
    } else {
        std::vector<std::string> a, b;
        for (const auto& t : st) a.emplace_back(tok_text(selected, t));
        for (const auto& t : ot) b.emplace_back(tok_text(oracle, t));
        for (auto [i, j] : substitutions(a, b))
            if (identifier_like(a[i]) && identifier_like(b[j])) plan.emplace_back(i, j);
    }

    for (auto [si, oi] : plan) {
        if (r.ops.size() >= max_edits) break;
        const auto old_tok = tok_text(selected, st[si]);
        const auto new_tok = tok_text(oracle, ot[oi]);
        if (old_tok == new_tok) continue;
        if (std::any_of(r.ops.begin(), r.ops.end(), [&](const EditOp& op) { return op.position == static_cast<int>(si); }))
            continue;
        r.ops.push_back({static_cast<int>(si), std::string(old_tok), std::string(new_tok)});
    }
    r.text = apply_edits(selected, r.ops);
    return r;
}

std::string apply_edits(const std::string& doc, const std::vector<EditOp>& ops) {
    std::string out = doc;
    for (const auto& op : ops) {
        const auto toks = tokens_of(out);
        if (op.position < 0 || static_cast<std::size_t>(op.position) >= toks.size())
            throw completion::InvalidAction("edit position " + std::to_string(op.position) + " out of range");
        const auto& t = toks[static_cast<std::size_t>(op.position)];
        if (tok_text(out, t) != op.old_token)
            throw completion::InvalidAction("token " + std::to_string(op.position) + " is '" +
                                            std::string(tok_text(out, t)) + "', not '" + op.old_token + "'");
        if (op.new_token.empty() ||
            std::any_of(op.new_token.begin(), op.new_token.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }))
            throw completion::InvalidAction("replacement must be a single non-empty token");
        out.replace(t.begin, t.end - t.begin, op.new_token);
    }
    return out;
}

SimulatedInteractor::SimulatedInteractor(std::string oracle_doc, Embedder embed)
    : oracle_(std::move(oracle_doc)), embed_(std::move(embed)) {}

int SimulatedInteractor::select(const completion::Session& session) {
    if (session.candidates.size() > 1) requests_ += static_cast<int>(session.candidates.size()) + 1;
    return simulate_select(session.candidates, oracle_, embed_);
}

std::optional<std::string> SimulatedInteractor::edit(const completion::Session&, const std::string& doc,
                                                     std::string& detail) {
    auto r = simulate_edit(doc, oracle_);
    detail = "edits=" + std::to_string(r.ops.size());
    if (r.ops.empty()) return std::nullopt;
    return r.text;
}

int SimulatedInteractor::take_request_count() {
    const int n = requests_;
    requests_ = 0;
    return n;
}

}  // namespace intentfill::interaction
