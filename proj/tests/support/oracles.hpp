#pragma once

// Independent reference computations shared by the unit and acceptance
// tests. Nothing here calls into the library.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

// Full-matrix edit distance, kept separate from the library's two-row DP.
inline std::size_t dp_levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
        }
    }
    return d[a.size()][b.size()];
}

// Line normalization done by hand: drop '\r', strip trailing blanks per line.
inline std::string normalize_by_hand(const std::string& s) {
    std::string out, line;
    auto flush = [&] {
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
        out += line;
        line.clear();
    };
    for (char c : s) {
        if (c == '\r') continue;
        if (c == '\n') {
            flush();
            out += '\n';
        } else {
            line += c;
        }
    }
    flush();
    return out;
}

inline double es_oracle(const std::string& a, const std::string& b) {
    std::string na = normalize_by_hand(a), nb = normalize_by_hand(b);
    std::size_t m = std::max(na.size(), nb.size());
    if (m == 0) return 100.0;
    return 100.0 * (1.0 - static_cast<double>(dp_levenshtein(na, nb)) / static_cast<double>(m));
}

inline std::string random_ascii(std::mt19937_64& rng, std::size_t max_len) {
    static const std::string alphabet = "abcde xyz_()=+\n\t";
    std::size_t n = rng() % (max_len + 1);
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s.push_back(alphabet[rng() % alphabet.size()]);
    return s;
}

// CodeBLEU pairs worked out by hand. Token n-gram counts are over
// whitespace-split tokens; keyword unigrams weigh 1, others 0.2; smoothing
// replaces an empty numerator by 0.1.
struct HandPair {
    const char* ref;
    const char* hyp;
    double ngram;
    double weighted_ngram;
    double syntax;
    double dataflow;
};

inline std::vector<HandPair> hand_pairs() {
    using std::exp;
    using std::log;
    std::vector<HandPair> out;
    {
        // return a + b / return a - b: unigrams 3/4, bigrams 1/3, nothing longer.
        double tail = log(1.0 / 3) + log(0.1 / 2) + log(0.1 / 1);
        out.push_back({"return a + b", "return a - b", exp(0.25 * (log(3.0 / 4) + tail)),
                       exp(0.25 * (log(1.4 / 1.6) + tail)),  // return(1) a(.2) b(.2) of 1.6
                       1.0,                                   // same tree shape
                       1.0});                                 // no def-use chain to match
    }
    {
        // A renamed local: 6/9, 4/8, 3/7, 2/6; all four edges survive renaming.
        double tail = log(4.0 / 8) + log(3.0 / 7) + log(2.0 / 6);
        out.push_back({"s = a + b\nreturn s * 2", "t = a + b\nreturn t * 3", exp(0.25 * (log(6.0 / 9) + tail)),
                       exp(0.25 * (log(2.0 / 2.6) + tail)), 1.0, 1.0});
    }
    {
        // if/else collapsed into `or`: 11 vs 7 tokens (brevity penalty), one
        // of ten reference subtrees and one of six edges kept.
        double ngram = exp(1.0 - 11.0 / 7) * exp(0.25 * (log(6.0 / 7) + log(4.0 / 6) + log(2.0 / 5) + log(0.1 / 4)));
        double weighted = exp(0.25 * (log(2.0 / 3.8) + log(4.0 / 10) + log(2.0 / 9) + log(0.1 / 8)));
        out.push_back({"if a:\n    x = a\nelse:\n    x = b\nreturn x", "x = a or b\nreturn x", ngram, weighted, 0.1,
                       1.0 / 6});
    }
    return out;
}

}  // namespace testsupport
