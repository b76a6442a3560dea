#include "intentfill/annotation/annotated_instance.hpp"

#include <nlohmann/json.hpp>

#include "intentfill/error.hpp"

namespace intentfill::annotation {

using nlohmann::json;

void to_json(json& j, const AnnotatedInstance& a) {
    j = json{{"instance", a.instance},
             {"trace", a.trace},
             {"docstring", a.docstring},
             {"annotator", a.annotator},
             {"template_version", a.template_version}};
}

void from_json(const json& j, AnnotatedInstance& a) {
    j.at("instance").get_to(a.instance);
    j.at("trace").get_to(a.trace);
    j.at("docstring").get_to(a.docstring);
    a.annotator = j.value("annotator", std::string("human"));
    a.template_version = j.value("template_version", std::string(intent::kTemplateVersion));
    if (a.instance.body.empty()) throw Error("annotated instance '" + a.instance.id + "' has an empty body");
    for (std::size_t i = 0; i < intent::kStepLabels.size(); ++i) {
        if (a.trace.step(i).empty()) {
            throw Error("annotated instance '" + a.instance.id + "' has an empty step " +
                        std::string(intent::kStepLabels[i]));
        }
    }
    if (a.docstring.summary.empty()) throw Error("annotated instance '" + a.instance.id + "' has no docstring summary");
}

}  // namespace intentfill::annotation
