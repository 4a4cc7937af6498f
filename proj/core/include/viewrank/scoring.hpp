#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "viewrank/datamodel.hpp"

namespace viewrank {

class InvertedIndex;

inline constexpr std::string_view kDefaultSeparator = "<extra_id_10>";

/// Token budgets for the rendered re-ranker input. Tokens are whitespace
/// separated words; template keywords are not counted.
struct TokenBudgets {
    std::size_t query = 128;  // utterance + context
    std::size_t document = 384;
};

struct RenderOptions {
    std::string separator{kDefaultSeparator};
    TokenBudgets budgets;
};

/// `Query: <u> Context: <history> Document: <p> Relevant:`
struct RenderedInput {
    std::string text;
    std::string passage_id;
    std::string query_segment;
    std::string context_segment;  // turns joined by " <separator> "
    std::string document_segment;
    std::string separator;
    TokenBudgets budgets;
};

/// Renders one query/passage pair. History is joined oldest-first; when over
/// budget the context loses tokens from its oldest end and the document from
/// its tail. Budgets must be positive (InputError otherwise).
RenderedInput render_input(const ConversationalQuery& query, const Passage& passage,
                           const RenderOptions& options = {});

/// Pointwise relevance scorer. Implementations return one score in [0,1] per
/// input, order-aligned, deterministically, and must tolerate concurrent calls.
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual std::vector<double> score(std::span<const RenderedInput> batch) const = 0;
    virtual std::string name() const = 0;
};

/// Deterministic stand-in for a neural scorer:
/// sigmoid(bm25(query ∪ context terms, passage) / temperature).
class LexicalScorer final : public Scorer {
public:
    /// `temperature` <= 0 selects the index's mean term score.
    explicit LexicalScorer(const InvertedIndex& index, double temperature = 0.0);

    std::vector<double> score(std::span<const RenderedInput> batch) const override;
    std::string name() const override { return "lexical"; }

    double temperature() const noexcept { return temperature_; }

private:
    const InvertedIndex& index_;
    double temperature_;
};

struct RemoteScorerOptions {
    std::string endpoint;  // http://host:port[/prefix]; requests go to <prefix>/score
    std::size_t batch_size = 64;
    std::chrono::milliseconds timeout{30000};
    int retries = 2;
    std::size_t max_in_flight = 4;
};

/// Client for the `/score` JSON protocol:
/// request {"inputs": [...]} -> response {"scores": [...]}.
class RemoteScorer final : public Scorer {
public:
    explicit RemoteScorer(RemoteScorerOptions options);
    ~RemoteScorer() override;

    std::vector<double> score(std::span<const RenderedInput> batch) const override;
    std::string name() const override { return "remote"; }

    const RemoteScorerOptions& options() const noexcept { return options_; }

private:
    struct Endpoint;
    RemoteScorerOptions options_;
    std::unique_ptr<Endpoint> endpoint_;
};

struct RerankOptions {
    std::size_t depth = 100;
    RenderOptions render;
};

struct RerankResult {
    RankedList list;
    double elapsed_ms = 0.0;
};

/// Re-scores the top `depth` candidates and re-sorts them (ties by passage id);
/// remaining candidates keep their relative order after the re-ranked block
/// with scores strictly below it. Scorer failures are rethrown with the query
/// id prefixed.
RerankResult rerank(const RankedList& candidates, const ConversationalQuery& query,
                    const PassageCollection& collection, const Scorer& scorer,
                    const RerankOptions& options = {});

}  // namespace viewrank
