#include "intentfill/dataset/formatter.hpp"

#include <nlohmann/json.hpp>

#include "intentfill/intent/reasoning.hpp"

namespace intentfill::dataset {

using nlohmann::json;

void to_json(json& j, const TrainingRecord& r) {
    j = json{{"text", r.text},
             {"mask_boundary", r.mask_boundary},
             {"instance_id", r.instance_id},
             {"template_version", r.template_version}};
}

void from_json(const json& j, TrainingRecord& r) {
    j.at("text").get_to(r.text);
    j.at("mask_boundary").get_to(r.mask_boundary);
    j.at("instance_id").get_to(r.instance_id);
    j.at("template_version").get_to(r.template_version);
}

bool contains_segment_token(std::string_view s) {
    for (auto t : kSegmentTokens) {
        if (s.find(t) != std::string_view::npos) return true;
    }
    return false;
}

namespace {

constexpr std::array<std::string_view, 3> kTagNames = {"reasoning>", "docstring>", "code>"};

// Length of the tag tail ("/"? name ">") at `pos`, or 0.
std::size_t tag_tail(std::string_view s, std::size_t pos) {
    std::size_t p = pos;
    if (p < s.size() && s[p] == '/') ++p;
    for (auto name : kTagNames) {
        if (s.substr(p, name.size()) == name) return p + name.size() - pos;
    }
    return 0;
}

}  // namespace

std::string escape_segments(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += s[i];
        if (s[i] != '<') continue;
        std::size_t j = i + 1;
        while (j < s.size() && s[j] == '\\') ++j;
        if (tag_tail(s, j) > 0) out += '\\';
    }
    return out;
}

std::string unescape_segments(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += s[i];
        if (s[i] != '<' || i + 1 >= s.size() || s[i + 1] != '\\') continue;
        std::size_t j = i + 1;
        while (j < s.size() && s[j] == '\\') ++j;
        if (tag_tail(s, j) > 0) ++i;  // drop one backslash
    }
    return out;
}

std::string verbalize_context(const miner::FunctionInstance& inst) {
    std::string out;
    if (inst.extra_context) out += "\"cross-file context\": " + escape_segments(*inst.extra_context) + ",\n";
    out += "\"file name\": " + escape_segments(inst.file_name) + ",\n";
    out += "\"preceding code\": " + escape_segments(inst.preceding_code) + ",\n";
    out += "\"function name & signature\": " + escape_segments(inst.signature);
    return out;
}

TrainingRecord verbalize(const annotation::AnnotatedInstance& x, std::vector<std::string>* warnings) {
    const auto& inst = x.instance;
    std::string r = intent::render_reasoning(x.trace);
    std::string d = intent::render_docstring(x.docstring);
    if (warnings != nullptr) {
        auto check = [&](std::string_view field, std::string_view value) {
            if (contains_segment_token(value)) {
                warnings->push_back(inst.id + ": " + std::string(field) + " contains a segment token; escaped");
            }
        };
        check("file_name", inst.file_name);
        check("preceding_code", inst.preceding_code);
        check("signature", inst.signature);
        if (inst.extra_context) check("extra_context", *inst.extra_context);
        check("reasoning", r);
        check("docstring", d);
        check("body", inst.body);
    }
    TrainingRecord rec;
    rec.text = verbalize_context(inst);
    rec.text += '\n';
    rec.mask_boundary = rec.text.size();
    rec.text += std::string(kReasoningOpen) + escape_segments(r) + std::string(kReasoningClose) + "\n";
    rec.text += std::string(kDocOpen) + escape_segments(d) + std::string(kDocClose) + "\n";
    rec.text += std::string(kCodeOpen) + escape_segments(inst.body) + std::string(kCodeClose);
    rec.instance_id = inst.id;
    rec.template_version = x.template_version;
    return rec;
}

namespace {

std::size_t count_of(std::string_view text, std::string_view needle) {
    std::size_t n = 0;
    for (auto p = text.find(needle); p != std::string_view::npos; p = text.find(needle, p + needle.size())) ++n;
    return n;
}

Segment extract(std::string_view text, std::string_view open, std::string_view close, std::string_view name,
                std::vector<std::string>& warnings) {
    Segment seg;
    auto first_open = text.find(open);
    if (first_open == std::string_view::npos) return seg;
    auto close_pos = text.find(close, first_open + open.size());
    std::size_t begin = first_open + open.size();
    std::size_t end;
    if (close_pos != std::string_view::npos) {
        begin = text.rfind(open, close_pos - open.size()) + open.size();
        end = close_pos;
    } else {
        seg.unterminated = true;
        end = text.size();
        for (auto other : {kReasoningOpen, kDocOpen, kCodeOpen}) {
            if (other == open) continue;
            auto p = text.find(other, begin);
            if (p != std::string_view::npos && p < end) end = p;
        }
        warnings.push_back(std::string(name) + " segment is unterminated");
    }
    seg.duplicated = count_of(text, open) > 1 || count_of(text, close) > 1;
    if (seg.duplicated) warnings.push_back("duplicate " + std::string(name) + " tokens; first segment taken");
    seg.content = unescape_segments(text.substr(begin, end - begin));
    return seg;
}

}  // namespace

ParsedGeneration parse_generation(std::string_view text) {
    ParsedGeneration g;
    g.trace = extract(text, kReasoningOpen, kReasoningClose, "reasoning", g.warnings);
    g.docstring = extract(text, kDocOpen, kDocClose, "docstring", g.warnings);
    g.code = extract(text, kCodeOpen, kCodeClose, "code", g.warnings);
    return g;
}

std::string build_inference_prefix(const miner::FunctionInstance& inst, Stage stage,
                                   const std::optional<std::string>& doc) {
    std::string out = verbalize_context(inst) + "\n";
    if (stage == Stage::Intent) return out + std::string(kReasoningOpen);
    if (!doc) throw MissingDocstring();
    return out + std::string(kDocOpen) + escape_segments(*doc) + std::string(kDocClose) + "\n" + std::string(kCodeOpen);
}

}  // namespace intentfill::dataset
