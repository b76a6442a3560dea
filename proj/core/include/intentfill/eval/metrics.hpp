#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace intentfill::eval {

/// Unit-cost Levenshtein distance over two code-point sequences.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

/// 100 * (1 - lev / max_len) over code points, after trailing whitespace is
/// stripped per line and newlines unified. Both empty gives 100.
double edit_similarity(std::string_view ref, std::string_view hyp);

inline constexpr std::string_view kEditSimilarityFormula = "char-levenshtein-v1";

struct CodeBleuWeights {
    double ngram = 0.25;
    double weighted_ngram = 0.25;
    double syntax = 0.25;
    double dataflow = 0.25;

    void validate() const;  // throws InvalidArgument on negatives or a zero sum
};

void to_json(nlohmann::json& j, const CodeBleuWeights& w);
void from_json(const nlohmann::json& j, CodeBleuWeights& w);

struct CodeBleuResult {
    double score = 0;  // 0-100
    double ngram = 0;  // components in [0, 1]
    double weighted_ngram = 0;
    double syntax = 0;
    double dataflow = 0;
    bool hyp_unparseable = false;
    bool ref_unparseable = false;
};

void to_json(nlohmann::json& j, const CodeBleuResult& r);

const std::vector<std::string>& python_keywords();

/// Corpus BLEU-4 (clipped precision, smoothing by adding 0.1 to empty
/// numerators) over whitespace tokens. Orders longer than either sequence
/// are dropped and the remaining weights rescaled; two empty sequences score 1.
double bleu(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);

/// Like bleu() but recall-oriented and without a brevity penalty; keyword
/// unigrams weigh 1 and all other unigrams 0.2.
double weighted_bleu(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);

/// Python source without comments and docstrings; whitespace-only lines
/// dropped. Returns the input unchanged if it does not tokenize.
std::string strip_comments_and_docstrings(std::string_view code);

/// Fraction of the reference's non-leaf subtrees (field-labelled
/// s-expressions) that also occur in the hypothesis. Throws py::ParseError.
double syntax_match(std::string_view ref, std::string_view hyp);

/// One def-use edge set: `name` at token `index` comes from / is computed
/// from `parents`.
struct DataflowEdge {
    std::string name;
    int index = 0;
    std::string relation;  // "comesFrom" or "computedFrom"
    std::vector<std::string> parents;
    std::vector<int> parent_indices;
};

/// Def-use edges of `code` restricted to variables taking part in a chain.
/// Throws py::ParseError.
std::vector<DataflowEdge> dataflow_graph(std::string_view code);

/// Fraction of the reference's variable-renamed edges matched (as a
/// multiset) by the hypothesis. A reference without edges scores 1.
double dataflow_match(std::string_view ref, std::string_view hyp);

/// 4-way composite over (ref, hyp). Unparseable input zeroes the structural
/// components and raises the matching flag; never throws on bad code.
CodeBleuResult codebleu(std::string_view ref, std::string_view hyp, const CodeBleuWeights& weights = {});

}  // namespace intentfill::eval
