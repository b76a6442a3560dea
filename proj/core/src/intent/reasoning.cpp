#include "intentfill/intent/reasoning.hpp"

#include <cctype>
#include <optional>
#include <regex>

#include <nlohmann/json.hpp>

#include "intentfill/text.hpp"

namespace intentfill::intent {

using nlohmann::json;

ParseIncomplete::ParseIncomplete(std::vector<std::string> missing)
    : Error("incomplete output; missing: " + text::join(missing, ", ")), missing_(std::move(missing)) {}

const std::string& ReasoningTrace::step(std::size_t i) const {
    const auto& part = i < 3 ? lexical_steps : i < 6 ? semantic_steps : intent_steps;
    return part.at(i % 3);
}

std::string& ReasoningTrace::step(std::size_t i) {
    return const_cast<std::string&>(static_cast<const ReasoningTrace&>(*this).step(i));
}

std::size_t word_count(std::string_view s) { return text::split_words(s).size(); }

namespace {

void warn(std::vector<std::string>* sink, std::string msg) {
    if (sink != nullptr) sink->push_back(std::move(msg));
}

std::string collapse(std::string_view s) {
    std::string out;
    for (auto w : text::split_words(s)) {
        if (!out.empty()) out += ' ';
        out += w;
    }
    return out;
}

// "A.1: text", "- A.1) text", "**A.1** text"
const std::regex& label_re() {
    static const std::regex re(R"(^[-*\s]*\**([ABC])\.([123])\**\s*[:.)\-]?\s*(.*)$)");
    return re;
}

}  // namespace

std::string render_reasoning(const ReasoningTrace& trace) {
    std::string out = "\n";
    for (std::size_t i = 0; i < kStepLabels.size(); ++i) {
        out += kStepLabels[i];
        out += ": ";
        out += trace.step(i);
        out += '\n';
    }
    return out;
}

ReasoningTrace parse_reasoning(std::string_view input, std::vector<std::string>* warnings) {
    ReasoningTrace trace;
    std::array<bool, 9> seen{};
    constexpr std::size_t kNone = kStepLabels.size();
    std::size_t current = kNone;
    for (auto raw : text::split_lines(input)) {
        std::string line(text::trim(raw));
        if (line.empty()) continue;
        std::smatch m;
        if (std::regex_match(line, m, label_re())) {
            std::size_t idx = static_cast<std::size_t>(m[1].str()[0] - 'A') * 3 + static_cast<std::size_t>(m[2].str()[0] - '1');
            if (seen[idx]) {
                warn(warnings, "duplicate step " + std::string(kStepLabels[idx]) + " ignored");
                current = kNone;
                continue;
            }
            seen[idx] = true;
            trace.step(idx) = std::string(text::trim(m[3].str()));
            current = idx;
        } else if (line.back() == ':') {
            current = kNone;
        } else if (current != kNone) {
            auto& s = trace.step(current);
            s += s.empty() ? line : " " + line;
        } else {
            warn(warnings, "text outside any step ignored: " + line);
        }
    }
    std::vector<std::string> missing;
    for (std::size_t i = 0; i < kStepLabels.size(); ++i) {
        if (trace.step(i).empty()) missing.emplace_back(kStepLabels[i]);
        else if (word_count(trace.step(i)) > kStepWordLimit) {
            warn(warnings, "step " + std::string(kStepLabels[i]) + " has " + std::to_string(word_count(trace.step(i))) +
                               " words (limit " + std::to_string(kStepWordLimit) + ")");
        }
    }
    if (!missing.empty()) throw ParseIncomplete(std::move(missing));
    return trace;
}

// ---- docstrings -----------------------------------------------------------

std::string render_docstring(const Docstring& doc) {
    std::string out = "\n" + doc.summary + "\n";
    if (!doc.operations.empty()) {
        out += "\n";
        for (const auto& op : doc.operations) out += op + "\n";
    }
    if (!doc.args.empty() || !doc.returns.empty() || !doc.returns_type.empty()) out += "\n";
    if (!doc.args.empty()) {
        out += "Args:\n";
        for (const auto& a : doc.args) {
            out += "    " + a.name;
            if (!a.type.empty()) out += " (" + a.type + ")";
            out += ":";
            if (!a.description.empty()) out += " " + a.description;
            out += "\n";
        }
    }
    if (!doc.returns.empty() || !doc.returns_type.empty()) {
        out += "Returns:\n    ";
        if (!doc.returns_type.empty()) {
            out += doc.returns_type + ":";
            if (!doc.returns.empty()) out += " ";
        }
        out += doc.returns + "\n";
    }
    return out;
}

namespace {

enum class Section { Head, Args, Returns, Other };

std::optional<Section> section_header(std::string_view line) {
    auto t = text::trim(line);
    if (t.empty() || t.back() != ':') return std::nullopt;
    auto name = text::to_lower(text::rtrim(t.substr(0, t.size() - 1)));
    if (name == "args" || name == "arguments" || name == "parameters" || name == "params") return Section::Args;
    if (name == "returns" || name == "return" || name == "yields") return Section::Returns;
    if (name == "raises" || name == "examples" || name == "example" || name == "note" || name == "notes" ||
        name == "attributes" || name == "see also") {
        return Section::Other;
    }
    return std::nullopt;
}

std::size_t indent_of(std::string_view line) {
    std::size_t n = 0;
    while (n < line.size() && (line[n] == ' ' || line[n] == '\t')) ++n;
    return n;
}

std::string_view strip_quotes(std::string_view s) {
    s = text::trim(s);
    for (std::string_view q : {"\"\"\"", "'''"}) {
        if (s.size() >= 6 && s.substr(0, 3) == q && s.substr(s.size() - 3) == q) return text::trim(s.substr(3, s.size() - 6));
    }
    return s;
}

// First line trimmed, the rest dedented by their common indentation.
std::string clean_doc(std::string_view s) {
    auto nl = s.find('\n');
    if (nl == std::string_view::npos) return std::string(text::trim(s));
    return std::string(text::trim(s.substr(0, nl))) + "\n" + text::dedent(s.substr(nl + 1));
}

const std::regex& arg_re() {
    static const std::regex re(R"(^(\*{0,2}[A-Za-z_]\w*)\s*(?:\(([^)]*)\))?\s*:\s*(.*)$)");
    return re;
}

const std::regex& type_re() {
    static const std::regex re(R"(^[A-Za-z_][\w\[\]., |]*$)");
    return re;
}

}  // namespace

Docstring parse_docstring(std::string_view input, std::vector<std::string>* warnings) {
    std::string body = clean_doc(strip_quotes(input));
    auto lines = text::split_lines(body);

    Docstring doc;
    std::vector<std::vector<std::string>> paragraphs{{}};
    Section section = Section::Head;
    std::size_t item_indent = 0;
    bool returns_started = false;

    for (auto raw : lines) {
        auto line = text::rtrim(raw);
        if (auto h = section_header(line); h && indent_of(line) == 0) {
            section = *h;
            item_indent = std::string_view::npos;
            continue;
        }
        auto t = std::string(text::trim(line));
        switch (section) {
            case Section::Head:
                if (t.empty()) {
                    if (!paragraphs.back().empty()) paragraphs.emplace_back();
                } else {
                    paragraphs.back().push_back(t);
                }
                break;
            case Section::Args: {
                if (t.empty()) break;
                std::size_t ind = indent_of(line);
                if (item_indent == std::string_view::npos) item_indent = ind;
                std::smatch m;
                if (ind <= item_indent && std::regex_match(t, m, arg_re())) {
                    doc.args.push_back(DocArg{m[1].str(), std::string(text::trim(m[2].str())), m[3].str()});
                } else if (!doc.args.empty()) {
                    auto& d = doc.args.back().description;
                    d += d.empty() ? t : " " + t;
                } else {
                    warn(warnings, "unrecognized Args line: " + t);
                }
                break;
            }
            case Section::Returns: {
                if (t.empty()) break;
                if (!returns_started) {
                    returns_started = true;
                    auto colon = t.find(':');
                    if (colon != std::string::npos && colon > 0 && (colon + 1 == t.size() || t[colon + 1] == ' ')) {
                        std::string type(text::rtrim(t.substr(0, colon)));
                        if (std::regex_match(type, type_re()) && type.back() != ' ') {
                            doc.returns_type = type;
                            doc.returns = std::string(text::trim(std::string_view(t).substr(colon + 1)));
                            break;
                        }
                    }
                    doc.returns = t;
                } else {
                    doc.returns += doc.returns.empty() ? t : " " + t;
                }
                break;
            }
            case Section::Other:
                break;
        }
    }
    if (paragraphs.back().empty()) paragraphs.pop_back();
    if (paragraphs.empty()) throw ParseIncomplete({"summary"});

    doc.summary = collapse(text::join(paragraphs.front(), " "));
    for (std::size_t i = 1; i < paragraphs.size(); ++i) {
        for (auto& op : paragraphs[i]) doc.operations.push_back(std::move(op));
    }
    if (doc.args.empty() && doc.returns.empty() && doc.returns_type.empty()) {
        warn(warnings, "docstring has no Args or Returns section");
    }
    for (auto& w : docstring_warnings(doc, {})) warn(warnings, std::move(w));
    return doc;
}

std::vector<std::string> docstring_warnings(const Docstring& doc, const std::vector<std::string>& arg_names) {
    std::vector<std::string> out;
    auto s = text::rtrim(doc.summary);
    auto terminal = [](char c) { return c == '.' || c == '!' || c == '?'; };
    if (s.empty() || !terminal(s.back())) {
        out.push_back("summary does not end with a sentence terminator");
    } else if (s.size() >= 2 && terminal(s[s.size() - 2])) {
        out.push_back("summary ends with more than one terminator");
    }
    if (doc.operations.size() > 3) {
        out.push_back(std::to_string(doc.operations.size()) + " operation lines (expected 1-3)");
    }
    if (!arg_names.empty()) {
        for (const auto& a : doc.args) {
            std::string bare = a.name;
            while (!bare.empty() && bare.front() == '*') bare.erase(bare.begin());
            bool known = false;
            for (const auto& n : arg_names) known = known || n == bare;
            if (!known) out.push_back("documented argument '" + a.name + "' is not in the signature");
        }
    }
    return out;
}

// ---- JSON -----------------------------------------------------------------

void to_json(json& j, const ReasoningTrace& t) {
    j = json{{"lexical_steps", t.lexical_steps}, {"semantic_steps", t.semantic_steps}, {"intent_steps", t.intent_steps}};
}

void from_json(const json& j, ReasoningTrace& t) {
    if (j.is_string()) {
        t = parse_reasoning(j.get<std::string>());
        return;
    }
    j.at("lexical_steps").get_to(t.lexical_steps);
    j.at("semantic_steps").get_to(t.semantic_steps);
    j.at("intent_steps").get_to(t.intent_steps);
}

void to_json(json& j, const DocArg& a) { j = json{{"name", a.name}, {"type", a.type}, {"description", a.description}}; }

void from_json(const json& j, DocArg& a) {
    j.at("name").get_to(a.name);
    a.type = j.value("type", std::string{});
    a.description = j.value("description", std::string{});
}

void to_json(json& j, const Docstring& d) {
    j = json{{"summary", d.summary},
             {"operations", d.operations},
             {"args", d.args},
             {"returns_type", d.returns_type},
             {"returns", d.returns}};
}

void from_json(const json& j, Docstring& d) {
    if (j.is_string()) {
        d = parse_docstring(j.get<std::string>());
        return;
    }
    j.at("summary").get_to(d.summary);
    d.operations = j.value("operations", std::vector<std::string>{});
    d.args = j.value("args", std::vector<DocArg>{});
    d.returns_type = j.value("returns_type", std::string{});
    d.returns = j.value("returns", std::string{});
}

}  // namespace intentfill::intent
