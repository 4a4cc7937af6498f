#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "viewrank/config.hpp"
#include "viewrank/datamodel.hpp"
#include "viewrank/evaluation.hpp"
#include "viewrank/formats.hpp"
#include "viewrank/labeling.hpp"
#include "viewrank/retrieval.hpp"
#include "viewrank/scoring.hpp"

namespace viewrank {

/// Loaded inputs shared by the pipeline stages. Move-only.
struct Workspace {
    PassageCollection collection;
    TopicSet topics;
    std::unique_ptr<InvertedIndex> index;
    std::unique_ptr<Scorer> scorer;
    RunMap imported;  // first-stage run when importing

    Workspace() = default;
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;
    Workspace(Workspace&&) = default;
    Workspace& operator=(Workspace&&) = default;
};

/// Loads corpus, topics, index (built or loaded), the scorer and any imported run.
Workspace open_workspace(const PipelineConfig& config);

/// Text used for built-in BM25 retrieval of a conversational query: history
/// followed by the current utterance, space-joined.
std::string flatten_query(const ConversationalQuery& query);

struct CascadeResult {
    RunMap runs;
    LatencyReport latency;  // re-ranking stage, one entry per query in topic order
};

/// First stage (BM25 or imported run) followed by re-ranking to the configured
/// depth, for every topic query. Work is spread over `config.workers` threads;
/// results do not depend on the worker count.
CascadeResult cascade(const Workspace& workspace, const PipelineConfig& config);

/// cascade() plus `cascade.run` and `latency.tsv` in the output directory.
CascadeResult run_cascade(const PipelineConfig& config);

struct LabelingResult {
    RunMap query_views;
    RunMap answer_views;
    RunMap ensembles;
    std::vector<LabeledSet> labeled;
    std::size_t training_lines = 0;
};

/// Query view, answer view, ensemble and label sampling for every query that
/// carries a rewrite. Queries without one are skipped with a warning.
LabelingResult label(const Workspace& workspace, const PipelineConfig& config);

/// label() plus `query_view.run`, `answer_view.run`, `ensemble.run` and
/// `train.tsv` in the output directory.
LabelingResult run_labeling(const PipelineConfig& config);

/// Samples labels from an existing ranked-list run and writes a training file.
std::size_t emit_from_run(const Workspace& workspace, const PipelineConfig& config,
                          const RunMap& run, const std::filesystem::path& path);

}  // namespace viewrank
