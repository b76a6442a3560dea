#include "intentfill/intent/prompts.hpp"

#include <nlohmann/json.hpp>

#include "intentfill/error.hpp"

namespace intentfill::intent {

namespace detail {
const std::map<std::string, std::string_view, std::less<>>& embedded_templates();
}

std::string_view template_asset(std::string_view name) {
    const auto& table = detail::embedded_templates();
    auto it = table.find(name);
    if (it == table.end()) throw Error("unknown template asset '" + std::string(name) + "'");
    return it->second;
}

std::string fill_template(std::string_view tpl, const std::map<std::string, std::string, std::less<>>& vars) {
    std::string out;
    out.reserve(tpl.size());
    std::size_t pos = 0;
    while (pos < tpl.size()) {
        auto open = tpl.find("{{", pos);
        if (open == std::string_view::npos) break;
        auto close = tpl.find("}}", open + 2);
        if (close == std::string_view::npos) break;
        auto key = tpl.substr(open + 2, close - open - 2);
        auto it = vars.find(key);
        if (it == vars.end()) throw Error("template placeholder '" + std::string(key) + "' has no value");
        out.append(tpl.substr(pos, open - pos));
        out += it->second;
        pos = close + 2;
    }
    out.append(tpl.substr(pos));
    return out;
}

namespace {

std::string or_placeholder(const std::string& s) { return s.empty() ? "(no preceding code)" : s; }

std::string block(const miner::FunctionInstance& inst) {
    return fill_template(template_asset("annotation_block"), {{"file_name", inst.file_name},
                                                              {"preceding_code", or_placeholder(inst.preceding_code)},
                                                              {"signature", inst.signature},
                                                              {"body", inst.body}});
}

}  // namespace

std::string build_inference_prompt(const miner::FunctionInstance& inst) {
    return fill_template(template_asset("inference"), {{"file_name", inst.file_name},
                                                       {"preceding_code", or_placeholder(inst.preceding_code)},
                                                       {"signature", inst.signature}});
}

std::string render_demo(const annotation::AnnotatedInstance& demo) {
    return block(demo.instance) + "<reasoning>" + render_reasoning(demo.trace) + "</reasoning>\n<docstring>" +
           render_docstring(demo.docstring) + "</docstring>\n";
}

std::string build_annotation_prompt(const miner::FunctionInstance& target,
                                    const std::array<annotation::AnnotatedInstance, 2>& demos) {
    std::string demo_text;
    for (std::size_t i = 0; i < demos.size(); ++i)
        demo_text += "Example " + std::to_string(i + 1) + ":\n" + render_demo(demos[i]) + "\n";
    return fill_template(template_asset("annotation"), {{"demos", demo_text}, {"target", block(target)}});
}

std::string format_reminder(std::string_view problem) {
    return fill_template(template_asset("format_reminder"), {{"problem", std::string(problem)}});
}

}  // namespace intentfill::intent
