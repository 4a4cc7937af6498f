#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "viewrank/datamodel.hpp"
#include "viewrank/fusion.hpp"
#include "viewrank/scoring.hpp"

namespace viewrank {

class InvertedIndex;

struct LabelingConfig {
    std::size_t first_stage_depth = 1000;  // N
    std::size_t rerank_depth = 200;        // M
    std::size_t label_count = 40;          // k
    std::uint64_t seed = 0;
    std::optional<std::size_t> filter_depth;
    std::string concat_separator = " ";
    RenderOptions render;

    /// Throws InputError unless 0 < k <= M <= N.
    void validate() const;
};

struct LabeledSet {
    std::string query_id;
    std::vector<std::string> positives;  // ranks 1..k of the ensemble
    std::vector<std::string> negatives;  // sampled from ranks k+1..M, in rank order
};

/// Everything the view builders need to run retrieval and re-ranking.
struct LabelingContext {
    const InvertedIndex& index;
    const PassageCollection& collection;
    const Scorer& scorer;
};

/// BM25 top-N for the rewrite, re-ranked against the rewrite, cut to M.
RankedList build_query_view(const LabelingSource& source, const LabelingContext& context,
                            const LabelingConfig& config);

/// Like the query view, but candidates come from BM25 over rewrite ∥ answer.
/// Re-ranking still conditions on the rewrite alone. An empty answer falls
/// back to the query view with a warning.
RankedList build_answer_view(const LabelingSource& source, const LabelingContext& context,
                             const LabelingConfig& config);

/// Per-query seed derived from the root seed and the query id.
std::uint64_t query_seed(std::uint64_t root_seed, std::string_view query_id);

/// Positives are the top-k; negatives are drawn uniformly without replacement
/// from ranks k+1..min(M, size). Warns when fewer than k negatives exist.
LabeledSet sample_labels(const EnsembleList& ensemble, const LabelingConfig& config);

using QueryLookup = std::map<std::string, ConversationalQuery, std::less<>>;

QueryLookup index_queries(std::span<const ConversationalQuery> queries);

/// Writes `<rendered input>\t<true|false>` lines, grouped by labeled set with
/// positives first. Returns the number of lines written.
std::size_t emit_training_file(std::span<const LabeledSet> labeled_sets, const QueryLookup& queries,
                               const PassageCollection& collection, const RenderOptions& render,
                               const std::filesystem::path& path);
std::size_t emit_training_lines(std::span<const LabeledSet> labeled_sets, const QueryLookup& queries,
                                const PassageCollection& collection, const RenderOptions& render,
                                std::ostream& out);

}  // namespace viewrank
