#include <gtest/gtest.h>

#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "annotated_gen.hpp"
#include "intentfill/dataset/formatter.hpp"
#include "intentfill/intent/reasoning.hpp"

using namespace intentfill;
using namespace intentfill::dataset;

namespace {

std::size_t occurrences(std::string_view hay, std::string_view needle) {
    std::size_t n = 0;
    for (auto p = hay.find(needle); p != std::string_view::npos; p = hay.find(needle, p + 1)) ++n;
    return n;
}

annotation::AnnotatedInstance minimal() {
    annotation::AnnotatedInstance x;
    x.instance.id = "r/paths.py::sep@L2";
    x.instance.file_name = "paths.py";
    x.instance.preceding_code = "import os\n";
    x.instance.signature = "def sep():\n";
    x.instance.body = "    return os.sep\n";
    x.instance.function_name = "sep";
    for (std::size_t i = 0; i < 9; ++i) x.trace.step(i) = "step " + std::to_string(i);
    x.docstring.summary = "Return the path separator.";
    x.docstring.returns_type = "str";
    x.docstring.returns = "the separator.";
    x.annotator = "human";
    return x;
}

}  // namespace

TEST(Verbalize, MinimalLayout) {
    auto x = minimal();
    auto rec = verbalize(x);
    std::size_t last = 0;
    for (auto tok : kSegmentTokens) {
        auto p = rec.text.find(tok, last);
        ASSERT_NE(p, std::string::npos) << tok;
        EXPECT_EQ(occurrences(rec.text, tok), 1u) << tok;
        last = p;
    }
    EXPECT_EQ(rec.text.substr(rec.mask_boundary, kReasoningOpen.size()), kReasoningOpen);
    EXPECT_EQ(rec.text.rfind("\"file name\": ", 0), 0u);
    EXPECT_NE(rec.text.find("\"preceding code\": import os\n,\n"), std::string::npos);
    EXPECT_TRUE(rec.text.ends_with("\n<code>    return os.sep\n</code>"));
    EXPECT_EQ(rec.template_version, "intent-v1");
}

TEST(Verbalize, RoundTripThroughParseGeneration) {
    auto x = minimal();
    auto rec = verbalize(x);
    auto g = parse_generation(std::string_view(rec.text).substr(rec.mask_boundary));
    EXPECT_EQ(g.trace.content, intent::render_reasoning(x.trace));
    EXPECT_EQ(g.docstring.content, intent::render_docstring(x.docstring));
    EXPECT_EQ(g.code.content, x.instance.body);
    EXPECT_TRUE(g.warnings.empty());
}

TEST(Verbalize, EscapesLiteralCloseTokenInBody) {
    auto x = minimal();
    x.instance.body = "    return '</code>'\n";
    std::vector<std::string> warnings;
    auto rec = verbalize(x, &warnings);
    EXPECT_EQ(occurrences(rec.text, "</code>"), 1u);
    EXPECT_NE(rec.text.find("'<\\/code>'"), std::string::npos);
    EXPECT_EQ(warnings.size(), 1u);
    EXPECT_EQ(parse_generation(rec.text).code.content, x.instance.body);
}

TEST(Escaping, IsExactInverse) {
    std::mt19937_64 rng(3);
    const std::string alphabet = "<\\/>codeaxrsingt ";
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        int n = static_cast<int>(rng() % 40);
        for (int k = 0; k < n; ++k) s += alphabet[rng() % alphabet.size()];
        if (rng() % 3 == 0) s.insert(rng() % (s.size() + 1), std::string(kSegmentTokens[rng() % 6]));
        auto e = escape_segments(s);
        EXPECT_FALSE(contains_segment_token(e)) << s;
        EXPECT_EQ(unescape_segments(e), s) << s;
    }
}

TEST(Verbalize, PropertyRoundTripAndOrdering) {
    testsupport::AnnotatedGenerator gen(21);
    for (int i = 0; i < 300; ++i) {
        auto x = gen.next();
        auto rec = verbalize(x);
        EXPECT_EQ(rec.text.find(kReasoningOpen), rec.mask_boundary);
        std::size_t last = 0;
        for (auto tok : kSegmentTokens) {
            EXPECT_EQ(occurrences(rec.text, tok), 1u);
            auto p = rec.text.find(tok);
            EXPECT_GE(p, last);
            last = p;
        }
        auto g = parse_generation(std::string_view(rec.text).substr(rec.mask_boundary));
        ASSERT_TRUE(g.trace.content && g.docstring.content && g.code.content);
        EXPECT_EQ(intent::parse_reasoning(*g.trace.content), x.trace);
        EXPECT_EQ(intent::parse_docstring(*g.docstring.content), x.docstring);
        EXPECT_EQ(*g.code.content, x.instance.body);
    }
}

TEST(ParseGeneration, IntentOnly) {
    auto g = parse_generation("<reasoning>r</reasoning><docstring>d</docstring>");
    EXPECT_EQ(g.trace.content, "r");
    EXPECT_EQ(g.docstring.content, "d");
    EXPECT_FALSE(g.code.content.has_value());
    EXPECT_TRUE(g.warnings.empty());
}

TEST(ParseGeneration, Unterminated) {
    auto g = parse_generation("<docstring>d");
    EXPECT_EQ(g.docstring.content, "d");
    EXPECT_TRUE(g.docstring.unterminated);
    auto h = parse_generation("<reasoning>r\n<docstring>d</docstring>");
    EXPECT_EQ(h.trace.content, "r\n");
    EXPECT_TRUE(h.trace.unterminated);
    EXPECT_FALSE(h.docstring.unterminated);
}

TEST(ParseGeneration, DuplicateTokensTakeFirst) {
    auto g = parse_generation("<code>a</code>\n<code>b</code>");
    EXPECT_EQ(g.code.content, "a");
    EXPECT_TRUE(g.code.duplicated);
    EXPECT_EQ(g.warnings.size(), 1u);
    auto h = parse_generation("<code><code>x</code>");
    EXPECT_EQ(h.code.content, "x");
}

TEST(ParseGeneration, FuzzedPlacementNeverThrows) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        int parts = static_cast<int>(rng() % 8);
        for (int k = 0; k < parts; ++k) {
            s += "x" + std::to_string(k);
            s += kSegmentTokens[rng() % kSegmentTokens.size()];
        }
        auto g = parse_generation(s);
        const std::pair<const Segment*, std::string_view> segs[] = {
            {&g.trace, kReasoningClose}, {&g.docstring, kDocClose}, {&g.code, kCodeClose}};
        for (const auto& [seg, close] : segs) {
            if (seg->content && !seg->unterminated) EXPECT_EQ(seg->content->find(close), std::string::npos) << s;
        }
    }
}

TEST(InferencePrefix, Stages) {
    auto x = minimal();
    auto intent_prefix = build_inference_prefix(x.instance, Stage::Intent);
    EXPECT_TRUE(intent_prefix.ends_with("<reasoning>"));
    auto code_prefix = build_inference_prefix(x.instance, Stage::Code, std::string("Return sep."));
    EXPECT_TRUE(code_prefix.ends_with("<code>"));
    EXPECT_EQ(occurrences(code_prefix, "Return sep."), 1u);
    EXPECT_EQ(code_prefix.find(kReasoningOpen), std::string::npos);
    EXPECT_THROW(build_inference_prefix(x.instance, Stage::Code), MissingDocstring);
    auto rec = verbalize(x);
    EXPECT_EQ(intent_prefix, rec.text.substr(0, rec.mask_boundary + kReasoningOpen.size()));
}

TEST(TrainingRecordJson, Fields) {
    auto rec = verbalize(minimal());
    auto j = nlohmann::json(rec);
    for (auto key : {"text", "mask_boundary", "instance_id", "template_version"}) EXPECT_TRUE(j.contains(key));
    EXPECT_EQ(j.get<TrainingRecord>(), rec);
}
