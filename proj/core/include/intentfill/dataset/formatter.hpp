#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "intentfill/annotation/annotated_instance.hpp"
#include "intentfill/error.hpp"
#include "intentfill/stage.hpp"

namespace intentfill::dataset {

inline constexpr std::string_view kReasoningOpen = "<reasoning>";
inline constexpr std::string_view kReasoningClose = "</reasoning>";
inline constexpr std::string_view kDocOpen = "<docstring>";
inline constexpr std::string_view kDocClose = "</docstring>";
inline constexpr std::string_view kCodeOpen = "<code>";
inline constexpr std::string_view kCodeClose = "</code>";

inline constexpr std::array<std::string_view, 6> kSegmentTokens = {kReasoningOpen, kReasoningClose, kDocOpen,
                                                                   kDocClose,      kCodeOpen,       kCodeClose};

class MissingDocstring : public Error {
public:
    MissingDocstring() : Error("code-stage prefix requires a docstring") {}
};

struct TrainingRecord {
    std::string text;
    std::size_t mask_boundary = 0;  // offset of the first "<reasoning>"
    std::string instance_id;
    std::string template_version;

    bool operator==(const TrainingRecord&) const = default;
};

void to_json(nlohmann::json& j, const TrainingRecord& r);
void from_json(const nlohmann::json& j, TrainingRecord& r);

bool contains_segment_token(std::string_view s);

/// Content escaping: "<" followed by k backslashes and a segment tag name
/// gains one backslash, so "</code>" becomes "<\/code>" and "<\/code>"
/// becomes "<\\/code>". unescape_segments is the exact inverse.
std::string escape_segments(std::string_view s);
std::string unescape_segments(std::string_view s);

/// The three labeled context fields (escaped), without a trailing newline.
std::string verbalize_context(const miner::FunctionInstance& inst);

/// Context, then "\n<reasoning>r</reasoning>\n<docstring>d</docstring>\n<code>body</code>"
/// with r and d rendered by the intent module. Content holding literal
/// segment tokens is escaped and reported through `warnings`.
TrainingRecord verbalize(const annotation::AnnotatedInstance& x, std::vector<std::string>* warnings = nullptr);

struct Segment {
    std::optional<std::string> content;  // unescaped
    bool unterminated = false;
    bool duplicated = false;

    bool operator==(const Segment&) const = default;
};

struct ParsedGeneration {
    Segment trace;
    Segment docstring;
    Segment code;
    std::vector<std::string> warnings;
};

/// Best-effort segment extraction. A segment spans from its innermost
/// opening token to the first closing token. Without a closing token it
/// runs to the next opening token of another segment or the end of text.
ParsedGeneration parse_generation(std::string_view text);

/// Intent: context + "\n<reasoning>". Code: context + "\n<docstring>doc</docstring>\n<code>".
/// Throws MissingDocstring for the code stage without `doc`.
std::string build_inference_prefix(const miner::FunctionInstance& inst, Stage stage,
                                   const std::optional<std::string>& doc = std::nullopt);

}  // namespace intentfill::dataset
