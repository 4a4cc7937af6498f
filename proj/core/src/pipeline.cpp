#include "viewrank/pipeline.hpp"

#include <fstream>

#include "parallel.hpp"
#include "viewrank/diagnostics.hpp"
#include "viewrank/errors.hpp"
#include "viewrank/fusion.hpp"

namespace viewrank {
namespace {

LabelingConfig effective_labeling(const PipelineConfig& config) {
    auto labeling = config.labeling;
    labeling.seed = config.seed;
    labeling.validate();
    return labeling;
}

RerankOptions rerank_options(const PipelineConfig& config) {
    RerankOptions options;
    options.depth = config.rerank_depth;
    options.render = config.labeling.render;
    return options;
}

}  // namespace

Workspace open_workspace(const PipelineConfig& config) {
    config.validate();
    Workspace ws;
    ws.collection = parse_corpus(config.corpus, config.corpus_format);
    ws.topics = parse_topics(config.topics);
    if (!config.index.empty()) {
        ws.index = std::make_unique<InvertedIndex>(InvertedIndex::load(config.index));
    } else {
        ws.index = std::make_unique<InvertedIndex>(InvertedIndex::build(ws.collection, Analyzer{}, config.bm25));
    }
    if (config.scorer.kind == ScorerSpec::Kind::remote) {
        auto options = config.remote;
        if (options.endpoint.empty()) options.endpoint = config.scorer.url;
        ws.scorer = std::make_unique<RemoteScorer>(std::move(options));
    } else {
        ws.scorer = std::make_unique<LexicalScorer>(*ws.index, config.temperature);
    }
    if (config.first_stage.kind == FirstStage::Kind::import_run) {
        ws.imported = read_run(config.first_stage.run);
    }
    return ws;
}

std::string flatten_query(const ConversationalQuery& query) {
    std::string text;
    for (const auto& turn : query.history) {
        text += turn;
        text += ' ';
    }
    text += query.utterance;
    return text;
}

CascadeResult cascade(const Workspace& workspace, const PipelineConfig& config) {
    const auto& queries = workspace.topics.queries;
    if (queries.empty()) throw InputError("topics contain no queries");
    const auto options = rerank_options(config);
    const bool imported = config.first_stage.kind == FirstStage::Kind::import_run;

    std::vector<RankedList> lists(queries.size());
    std::vector<double> elapsed(queries.size());
    detail::parallel_for(queries.size(), config.workers, [&](std::size_t i) {
        const auto& q = queries[i];
        RankedList candidates(q.query_id);
        if (imported) {
            if (auto it = workspace.imported.find(q.query_id); it != workspace.imported.end()) {
                candidates = it->second;
            } else {
                warn("query " + q.query_id + " is missing from the imported run; producing an empty result");
            }
        } else {
            candidates = workspace.index->search(q.query_id, flatten_query(q), config.candidates);
        }
        auto result = rerank(candidates, q, workspace.collection, *workspace.scorer, options);
        lists[i] = std::move(result.list);
        elapsed[i] = result.elapsed_ms;
    });

    CascadeResult result;
    for (std::size_t i = 0; i < queries.size(); ++i) result.runs.emplace(queries[i].query_id, std::move(lists[i]));
    result.latency = summarize_latency(std::move(elapsed));
    return result;
}

CascadeResult run_cascade(const PipelineConfig& config) {
    const auto ws = open_workspace(config);
    auto result = cascade(ws, config);
    write_run(result.runs, {"viewrank-cascade", config.seed}, config.output_dir / "cascade.run");

    std::ofstream latency(config.output_dir / "latency.tsv", std::ios::binary | std::ios::trunc);
    if (!latency) throw InputError("cannot write " + (config.output_dir / "latency.tsv").string());
    latency << "query_id\tms\n";
    for (std::size_t i = 0; i < ws.topics.queries.size(); ++i) {
        latency << ws.topics.queries[i].query_id << '\t' << result.latency.per_query_ms[i] << '\n';
    }
    latency << "mean\t" << result.latency.mean_ms << '\n';
    return result;
}

LabelingResult label(const Workspace& workspace, const PipelineConfig& config) {
    const auto labeling = effective_labeling(config);

    struct Item {
        const LabelingSource* source;
        RankedList query_view;
        RankedList answer_view;
        EnsembleList ensemble;
        std::optional<LabeledSet> labeled;
    };
    std::vector<Item> items;
    for (const auto& q : workspace.topics.queries) {
        const auto* source = workspace.topics.find_source(q.query_id);
        if (!source) {
            warn("query " + q.query_id + " has no rewrite; skipped for labeling");
            continue;
        }
        items.push_back({source, {}, {}, {}, std::nullopt});
    }

    const LabelingContext context{*workspace.index, workspace.collection, *workspace.scorer};
    detail::parallel_for(items.size(), config.workers, [&](std::size_t i) {
        auto& item = items[i];
        item.query_view = build_query_view(*item.source, context, labeling);
        item.answer_view = build_answer_view(*item.source, context, labeling);
        item.ensemble = ensemble_filter(item.query_view, item.answer_view, labeling.filter_depth);
        if (item.ensemble.list.empty()) {
            warn("query " + item.source->query_id + ": empty ensemble; no labels sampled");
        } else {
            item.labeled = sample_labels(item.ensemble, labeling);
        }
    });

    LabelingResult result;
    for (auto& item : items) {
        const auto& qid = item.source->query_id;
        result.query_views.emplace(qid, std::move(item.query_view));
        result.answer_views.emplace(qid, std::move(item.answer_view));
        result.ensembles.emplace(qid, std::move(item.ensemble.list));
        if (item.labeled) {
            result.training_lines += item.labeled->positives.size() + item.labeled->negatives.size();
            result.labeled.push_back(std::move(*item.labeled));
        }
    }
    return result;
}

LabelingResult run_labeling(const PipelineConfig& config) {
    const auto ws = open_workspace(config);
    auto result = label(ws, config);
    const auto& out = config.output_dir;
    write_run(result.query_views, {"viewrank-query-view", config.seed}, out / "query_view.run");
    write_run(result.answer_views, {"viewrank-answer-view", config.seed}, out / "answer_view.run");
    write_run(result.ensembles, {"viewrank-ensemble", config.seed}, out / "ensemble.run");
    const auto lookup = index_queries(ws.topics.queries);
    result.training_lines =
        emit_training_file(result.labeled, lookup, ws.collection, config.labeling.render, out / "train.tsv");
    return result;
}

std::size_t emit_from_run(const Workspace& workspace, const PipelineConfig& config, const RunMap& run,
                          const std::filesystem::path& path) {
    const auto labeling = effective_labeling(config);
    std::vector<LabeledSet> labeled;
    for (const auto& q : workspace.topics.queries) {
        auto it = run.find(q.query_id);
        if (it == run.end() || it->second.empty()) continue;
        labeled.push_back(sample_labels(EnsembleList{it->second, 0}, labeling));
    }
    const auto lookup = index_queries(workspace.topics.queries);
    return emit_training_file(labeled, lookup, workspace.collection, config.labeling.render, path);
}

}  // namespace viewrank
