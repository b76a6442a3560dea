#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "intentfill/completion/engine.hpp"
#include "intentfill/error.hpp"

namespace intentfill::interaction {

class ZeroVector : public Error {
public:
    ZeroVector() : Error("cosine of a zero vector is undefined") {}
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t a, std::size_t b)
        : Error("embedding dimensions differ: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

double cosine(const std::vector<float>& a, const std::vector<float>& b);

using Embedder = std::function<std::vector<float>(const std::string&)>;

/// Embedder backed by a gateway backend's embeddings endpoint.
Embedder backend_embedder(gateway::Backend& backend);

/// Rank of the candidate whose docstring is most cosine-similar to the
/// oracle; ties go to the lower rank.
int simulate_select(const std::vector<completion::CandidateIntent>& candidates, const std::string& oracle_doc,
                    const Embedder& embed);

/// Replacement of the whitespace-delimited token at `position`.
struct EditOp {
    int position = 0;
    std::string old_token;
    std::string new_token;

    bool operator==(const EditOp&) const = default;
};

void to_json(nlohmann::json& j, const EditOp& op);
void from_json(const nlohmann::json& j, EditOp& op);

struct EditResult {
    std::string text;
    std::vector<EditOp> ops;
};

inline constexpr std::size_t kMaxSimulatedEdits = 3;

/// Rewrites identifier tokens of `selected` (return type first, then
/// argument names, then argument types, positionally paired with the
/// oracle's Args/Returns entries) with the oracle's tokens. Descriptions are
/// never touched. When neither side has Args/Returns sections, falls back to
/// identifier substitutions found by a token-level diff.
EditResult simulate_edit(const std::string& selected, const std::string& oracle,
                         std::size_t max_edits = kMaxSimulatedEdits);

/// Applies ops in order. Each must name an existing token position holding
/// `old_token` and supply a non-empty, whitespace-free `new_token`; otherwise
/// throws completion::InvalidAction. Bytes outside replaced tokens are kept.
std::string apply_edits(const std::string& doc, const std::vector<EditOp>& ops);

/// Stage-2 decisions of the simulated user against an oracle docstring.
class SimulatedInteractor : public completion::Interactor {
public:
    SimulatedInteractor(std::string oracle_doc, Embedder embed);

    int select(const completion::Session& session) override;
    std::optional<std::string> edit(const completion::Session& session, const std::string& doc,
                                    std::string& detail) override;
    int take_request_count() override;

private:
    std::string oracle_;
    Embedder embed_;
    int requests_ = 0;
};

}  // namespace intentfill::interaction
