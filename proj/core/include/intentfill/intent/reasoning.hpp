#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "intentfill/error.hpp"

namespace intentfill::intent {

/// Identifier of the prompt and layout assets; stamped on every record.
inline constexpr std::string_view kTemplateVersion = "intent-v1";

inline constexpr std::array<std::string_view, 9> kStepLabels = {"A.1", "A.2", "A.3", "B.1", "B.2",
                                                                 "B.3", "C.1", "C.2", "C.3"};

/// Soft limit per reasoning step; longer steps parse with a warning.
inline constexpr std::size_t kStepWordLimit = 20;

/// Required parts were absent from a model output.
class ParseIncomplete : public Error {
public:
    explicit ParseIncomplete(std::vector<std::string> missing);
    const std::vector<std::string>& missing() const noexcept { return missing_; }

private:
    std::vector<std::string> missing_;
};

struct ReasoningTrace {
    std::array<std::string, 3> lexical_steps;   // A.1-A.3
    std::array<std::string, 3> semantic_steps;  // B.1-B.3
    std::array<std::string, 3> intent_steps;    // C.1-C.3

    /// Step by flat index 0..8 in label order.
    const std::string& step(std::size_t i) const;
    std::string& step(std::size_t i);

    bool operator==(const ReasoningTrace&) const = default;
};

struct DocArg {
    std::string name;
    std::string type;  // may be empty
    std::string description;

    bool operator==(const DocArg&) const = default;
};

struct Docstring {
    std::string summary;
    std::vector<std::string> operations;
    std::vector<DocArg> args;
    std::string returns_type;  // may be empty
    std::string returns;

    bool operator==(const Docstring&) const = default;
};

void to_json(nlohmann::json& j, const ReasoningTrace& t);
void from_json(const nlohmann::json& j, ReasoningTrace& t);
void to_json(nlohmann::json& j, const DocArg& a);
void from_json(const nlohmann::json& j, DocArg& a);
void to_json(nlohmann::json& j, const Docstring& d);
/// Accepts either the structured object or a docstring text.
void from_json(const nlohmann::json& j, Docstring& d);

/// One "X.n: text" line per step, framed by newlines.
std::string render_reasoning(const ReasoningTrace& trace);

/// Reads "A.1:"-style labeled lines. Unlabeled lines continue the previous
/// step; unlabeled lines ending in ':' are treated as headings and dropped.
/// The first occurrence of a duplicated label wins. Throws ParseIncomplete
/// naming every absent or empty step.
ReasoningTrace parse_reasoning(std::string_view text, std::vector<std::string>* warnings = nullptr);

/// Google-style layout: summary, blank line, operation lines, blank line,
/// "Args:" with "name (type): description" lines, "Returns:" with
/// "type: description". Framed by newlines like render_reasoning.
std::string render_docstring(const Docstring& doc);

/// Inverse of render_docstring, tolerant of surrounding quotes, indentation,
/// wrapped lines and alternative section names. Throws ParseIncomplete when
/// no summary precedes the first section.
Docstring parse_docstring(std::string_view text, std::vector<std::string>* warnings = nullptr);

/// Soft checks: summary terminator, operation count, documented argument
/// names against the signature's.
std::vector<std::string> docstring_warnings(const Docstring& doc, const std::vector<std::string>& arg_names);

std::size_t word_count(std::string_view s);

}  // namespace intentfill::intent
