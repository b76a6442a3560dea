#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "intentfill/intent/reasoning.hpp"
#include "intentfill/miner/corpus_miner.hpp"

namespace intentfill::annotation {

struct AnnotatedInstance {
    miner::FunctionInstance instance;
    intent::ReasoningTrace trace;
    intent::Docstring docstring;
    std::string annotator;  // backend/model id, or "human"
    std::string template_version{intent::kTemplateVersion};

    bool operator==(const AnnotatedInstance&) const = default;
};

void to_json(nlohmann::json& j, const AnnotatedInstance& a);
/// Throws on schema problems, including an empty body.
void from_json(const nlohmann::json& j, AnnotatedInstance& a);

}  // namespace intentfill::annotation
