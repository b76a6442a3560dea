#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>

#include "intentfill/annotation/annotated_instance.hpp"
#include "intentfill/miner/corpus_miner.hpp"

namespace intentfill::intent {

/// Raw text of a bundled template asset (file stem under templates/v1).
/// Throws Error for unknown names.
std::string_view template_asset(std::string_view name);

/// Replaces every "{{key}}" in one pass; substituted text is not rescanned.
/// Throws Error on a placeholder without a value.
std::string fill_template(std::string_view tpl, const std::map<std::string, std::string, std::less<>>& vars);

/// Instructed prompt for models without the fine-tuned layout. The caller
/// appends "<reasoning>".
std::string build_inference_prompt(const miner::FunctionInstance& inst);

/// One demonstration as it appears inside an annotation prompt.
std::string render_demo(const annotation::AnnotatedInstance& demo);

/// Two demonstrations followed by the target, whose ground-truth body is
/// included. Demos are expected to be truncated already.
std::string build_annotation_prompt(const miner::FunctionInstance& target,
                                    const std::array<annotation::AnnotatedInstance, 2>& demos);

/// Appended to an annotation prompt after an unparseable answer.
std::string format_reminder(std::string_view problem);

}  // namespace intentfill::intent
