// viewrank command-line front end.
//
// Exit codes: 0 success, 1 input error, 2 contract violation.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "viewrank/viewrank.hpp"

namespace {

using namespace viewrank;

constexpr int kExitInput = 1;
constexpr int kExitContract = 2;

/// Flags that map one-to-one onto config keys. CLI values override the
/// config file and the environment.
struct ConfigFlags {
    std::optional<std::string> config_path;
    std::vector<std::pair<std::string, std::string>> keys;  // flag -> config key
    std::map<std::string, std::string> values;              // config key -> value

    void add(CLI::App& app, const std::string& flag, const std::string& key, const std::string& help) {
        keys.emplace_back(flag, key);
        app.add_option(flag, values[key], help);
    }

    PipelineConfig resolve(const CLI::App& app) const {
        PipelineConfig config = config_path ? load_config(*config_path) : PipelineConfig{};
        apply_environment(config);
        for (const auto& [flag, key] : keys) {
            if (app.count(flag) > 0) config.set(key, values.at(key));
        }
        return config;
    }
};

void add_config_option(CLI::App& app, ConfigFlags& flags) {
    app.add_option("--config", flags.config_path, "TOML-style key = value config file");
}

void add_input_flags(CLI::App& app, ConfigFlags& flags) {
    flags.add(app, "--corpus", "corpus", "Passage collection (tsv or jsonl)");
    flags.add(app, "--format", "corpus_format", "Corpus format: tsv | jsonl");
    flags.add(app, "--topics", "topics", "Conversational topics (jsonl)");
    flags.add(app, "--index", "index", "Prebuilt index file (built from the corpus when omitted)");
    flags.add(app, "--k1", "bm25.k1", "BM25 k1");
    flags.add(app, "--b", "bm25.b", "BM25 b");
}

void add_scoring_flags(CLI::App& app, ConfigFlags& flags) {
    flags.add(app, "--scorer", "scorer", "lexical | remote:<url>");
    flags.add(app, "--temperature", "temperature", "Lexical scorer temperature (0 = index default)");
    flags.add(app, "--separator", "render.separator", "Context separator token");
    flags.add(app, "--query-budget", "render.query_budget", "Query + context token budget");
    flags.add(app, "--doc-budget", "render.doc_budget", "Document token budget");
    flags.add(app, "--batch-size", "remote.batch_size", "Remote scorer batch size");
    flags.add(app, "--timeout-ms", "remote.timeout_ms", "Remote scorer timeout");
    flags.add(app, "--retries", "remote.retries", "Remote scorer retries per chunk");
    flags.add(app, "--max-in-flight", "remote.max_in_flight", "Concurrent remote requests");
}

void add_run_flags(CLI::App& app, ConfigFlags& flags) {
    flags.add(app, "--output-dir", "output_dir", "Directory for output files");
    flags.add(app, "--seed", "seed", "Root random seed");
    flags.add(app, "--workers", "workers", "Worker threads");
}

void add_labeling_flags(CLI::App& app, ConfigFlags& flags) {
    flags.add(app, "--first-stage-depth", "labeling.first_stage_depth", "BM25 candidates per view (N)");
    flags.add(app, "--label-depth", "labeling.rerank_depth", "Re-ranked view depth (M)");
    flags.add(app, "--label-count", "labeling.label_count", "Positives / negatives per query (k)");
    flags.add(app, "--filter-depth", "labeling.filter_depth", "Depth of the filter view used for agreement");
}

std::vector<std::size_t> parse_cutoffs(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        std::size_t k = 0;
        try {
            k = std::stoul(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != item.size() || k == 0) throw InputError("invalid nDCG cutoff '" + item + "'");
        out.push_back(k);
    }
    if (out.empty()) throw InputError("no nDCG cutoffs given");
    return out;
}

RankedList list_or_empty(const RunMap& run, const std::string& qid) {
    auto it = run.find(qid);
    return it == run.end() ? RankedList(qid) : it->second;
}

std::string fixed(double v, int digits = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

int run_index(const PipelineConfig& config, const std::string& out) {
    if (config.corpus.empty()) throw InputError("--corpus is required");
    const auto collection = parse_corpus(config.corpus, config.corpus_format);
    const auto index = InvertedIndex::build(collection, Analyzer{}, config.bm25);
    index.save(out);
    std::cout << "indexed " << index.doc_count() << " passages, " << index.term_count()
              << " terms, avg length " << fixed(index.avg_doc_length(), 2) << " -> " << out << '\n';
    return 0;
}

int run_search(const PipelineConfig& config, const std::string& out, const std::string& field) {
    if (config.topics.empty()) throw InputError("--topics is required");
    std::optional<InvertedIndex> index;
    if (!config.index.empty()) {
        index = InvertedIndex::load(config.index);
    } else {
        if (config.corpus.empty()) throw InputError("--index or --corpus is required");
        index = InvertedIndex::build(parse_corpus(config.corpus, config.corpus_format), Analyzer{}, config.bm25);
    }
    const auto topics = parse_topics(config.topics);
    RunMap runs;
    for (const auto& q : topics.queries) {
        std::string text;
        if (field == "rewrite") {
            const auto* src = topics.find_source(q.query_id);
            if (!src) {
                warn("query " + q.query_id + " has no rewrite; skipped");
                continue;
            }
            text = src->rewritten_query;
        } else {
            text = flatten_query(q);
        }
        runs.emplace(q.query_id, index->search(q.query_id, text, config.candidates));
    }
    write_run(runs, {"viewrank-bm25", config.seed}, out);
    std::cout << "wrote " << runs.size() << " queries -> " << out << '\n';
    return 0;
}

int run_fuse(const std::string& method, const std::vector<std::string>& inputs, double k,
             std::optional<std::size_t> filter_depth, const std::string& out, const std::string& tag) {
    std::vector<RunMap> runs;
    for (const auto& path : inputs) runs.push_back(read_run(path));
    RunMap fused;
    if (method == "rrf") {
        if (runs.size() < 2) throw InputError("rrf needs at least two runs");
        std::set<std::string> qids;
        for (const auto& r : runs) {
            for (const auto& [qid, _] : r) qids.insert(qid);
        }
        for (const auto& qid : qids) {
            std::vector<RankedList> lists;
            for (const auto& r : runs) lists.push_back(list_or_empty(r, qid));
            fused.emplace(qid, rrf(lists, k));
        }
    } else if (method == "ensemble" || method == "reverse-ensemble") {
        if (runs.size() != 2) throw InputError(method + " takes exactly two runs: <query view> <answer view>");
        const bool reverse = method == "reverse-ensemble";
        const auto& query_view = runs[0];
        const auto& answer_view = runs[1];
        const auto& primary = reverse ? answer_view : query_view;
        const auto& filter = reverse ? query_view : answer_view;
        for (const auto& [qid, list] : primary) {
            fused.emplace(qid, ensemble_filter(list, list_or_empty(filter, qid), filter_depth).list);
        }
    } else {
        throw InputError("unknown fusion method '" + method + "' (rrf, ensemble, reverse-ensemble)");
    }
    write_run(fused, {tag, std::nullopt}, out);
    std::cout << "fused " << fused.size() << " queries -> " << out << '\n';
    return 0;
}

int run_eval(const std::string& qrels_path, const std::vector<std::string>& run_paths, const std::string& cutoffs,
             const std::optional<std::string>& baseline, const std::optional<std::string>& tsv_path) {
    const auto qrels = parse_qrels(qrels_path);
    const auto ks = parse_cutoffs(cutoffs);

    struct Row {
        std::string name;
        std::vector<MetricReport> reports;
    };
    auto evaluate = [&](const std::string& path) {
        Row row{path, {}};
        const auto run = read_run(path);
        for (auto k : ks) row.reports.push_back(ndcg_at_k(run, qrels, k));
        return row;
    };

    std::optional<Row> base;
    if (baseline) base = evaluate(*baseline);
    std::vector<Row> rows;
    for (const auto& p : run_paths) rows.push_back(evaluate(p));

    std::size_t width = 8;
    for (const auto& r : rows) width = std::max(width, r.name.size());
    if (base) width = std::max(width, base->name.size());

    std::cout << std::left << std::setw(static_cast<int>(width)) << "run";
    for (auto k : ks) std::cout << "  " << std::setw(10) << ("nDCG@" + std::to_string(k));
    if (base) {
        for (auto k : ks) std::cout << "  " << std::setw(18) << ("t/p@" + std::to_string(k));
    }
    std::cout << '\n';
    auto print_row = [&](const Row& row, bool compare) {
        std::cout << std::left << std::setw(static_cast<int>(width)) << row.name;
        for (const auto& r : row.reports) std::cout << "  " << std::setw(10) << fixed(r.mean);
        if (compare) {
            for (std::size_t i = 0; i < ks.size(); ++i) {
                std::string cell;
                try {
                    const auto t = compare_reports(row.reports[i], base->reports[i]);
                    cell = fixed(t.t, 3) + "/" + fixed(t.p, 4) + (t.p <= 0.05 ? "*" : "");
                } catch (const InputError&) {
                    cell = "n/a";
                }
                std::cout << "  " << std::setw(18) << cell;
            }
        }
        std::cout << '\n';
    };
    if (base) print_row(*base, false);
    for (const auto& r : rows) print_row(r, base.has_value());

    for (const auto& row : rows) {
        for (const auto& r : row.reports) {
            for (const auto& qid : r.no_positive_judgments) {
                warn(row.name + ": query " + qid + " has no positive judgments (scored 0, excluded from t-tests)");
            }
            break;
        }
    }

    if (tsv_path) {
        std::ofstream tsv(*tsv_path, std::ios::binary | std::ios::trunc);
        if (!tsv) throw InputError("cannot write " + *tsv_path);
        tsv << "run\tmetric\tquery_id\tvalue\n";
        auto dump = [&](const Row& row) {
            for (const auto& r : row.reports) {
                for (const auto& [qid, v] : r.per_query) tsv << row.name << '\t' << r.metric << '\t' << qid << '\t' << fixed(v, 6) << '\n';
                tsv << row.name << '\t' << r.metric << "\tall\t" << fixed(r.mean, 6) << '\n';
            }
        };
        if (base) dump(*base);
        for (const auto& r : rows) dump(r);
    }
    return 0;
}

int run_bench(const PipelineConfig& config, const std::optional<std::string>& out) {
    const auto ws = open_workspace(config);
    const auto& queries = ws.topics.queries;
    RerankOptions options;
    options.depth = config.rerank_depth;
    options.render = config.labeling.render;

    // Candidates are produced outside the timed stage.
    std::map<std::string, RankedList> candidates;
    for (const auto& q : queries) {
        if (config.first_stage.kind == FirstStage::Kind::import_run) {
            candidates.emplace(q.query_id, list_or_empty(ws.imported, q.query_id));
        } else {
            candidates.emplace(q.query_id, ws.index->search(q.query_id, flatten_query(q), config.candidates));
        }
    }
    const std::function<void(const ConversationalQuery&)> stage = [&](const ConversationalQuery& q) {
        rerank(candidates.at(q.query_id), q, ws.collection, *ws.scorer, options);
    };
    const auto report = measure_latency<ConversationalQuery>(stage, queries);
    std::cout << "re-ranking latency: " << fixed(report.mean_ms, 3) << " ms/q over " << queries.size()
              << " queries (depth " << config.rerank_depth << ", scorer " << ws.scorer->name() << ")\n";
    if (out) {
        std::ofstream tsv(*out, std::ios::binary | std::ios::trunc);
        if (!tsv) throw InputError("cannot write " + *out);
        tsv << "query_id\tms\n";
        for (std::size_t i = 0; i < queries.size(); ++i) {
            tsv << queries[i].query_id << '\t' << fixed(report.per_query_ms[i], 3) << '\n';
        }
        tsv << "mean\t" << fixed(report.mean_ms, 3) << '\n';
    }
    return 0;
}

int run_synth(const SyntheticOptions& options, const std::string& dir) {
    const auto data = make_ambiguous_dataset(options);
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    {
        std::ofstream corpus(base / "corpus.tsv", std::ios::binary | std::ios::trunc);
        write_corpus_tsv(data.collection, corpus);
        std::ofstream topics(base / "topics.jsonl", std::ios::binary | std::ios::trunc);
        write_topics_jsonl(data.topics, topics);
    }
    write_qrels(data.qrels, base / "qrels.txt");
    std::cout << "wrote " << data.collection.size() << " passages, " << data.topics.queries.size()
              << " queries -> " << dir << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"viewrank: conversational passage ranking and view-ensemble pseudo-labeling"};
    app.require_subcommand(1);

    // index
    ConfigFlags index_flags;
    std::string index_out;
    auto* index_cmd = app.add_subcommand("index", "Build a BM25 index and save it");
    add_config_option(*index_cmd, index_flags);
    add_input_flags(*index_cmd, index_flags);
    index_cmd->add_option("--out,-o", index_out, "Index file")->required();

    // search
    ConfigFlags search_flags;
    std::string search_out;
    std::string search_field = "flattened";
    auto* search_cmd = app.add_subcommand("search", "BM25 first-stage retrieval for every topic query");
    add_config_option(*search_cmd, search_flags);
    add_input_flags(*search_cmd, search_flags);
    search_flags.add(*search_cmd, "--depth", "candidates", "Passages per query");
    search_flags.add(*search_cmd, "--seed", "seed", "Seed recorded in the run header");
    search_cmd->add_option("--query", search_field, "flattened (history + utterance) | rewrite")
        ->check(CLI::IsMember({"flattened", "rewrite"}));
    search_cmd->add_option("--out,-o", search_out, "Run file")->required();

    // rerank (cascade)
    ConfigFlags rerank_flags;
    auto* rerank_cmd = app.add_subcommand("rerank", "Cascade: first stage then re-ranking; writes cascade.run");
    add_config_option(*rerank_cmd, rerank_flags);
    add_input_flags(*rerank_cmd, rerank_flags);
    add_scoring_flags(*rerank_cmd, rerank_flags);
    add_run_flags(*rerank_cmd, rerank_flags);
    rerank_flags.add(*rerank_cmd, "--first-stage", "first_stage", "bm25 | import:<run file>");
    rerank_flags.add(*rerank_cmd, "--candidates", "candidates", "BM25 candidates per query");
    rerank_flags.add(*rerank_cmd, "--depth", "rerank_depth", "Re-ranking depth");

    // fuse
    std::string fuse_method = "rrf";
    std::vector<std::string> fuse_inputs;
    double fuse_k = kDefaultRrfK;
    std::optional<std::size_t> fuse_filter_depth;
    std::string fuse_out;
    std::string fuse_tag = "viewrank-fused";
    auto* fuse_cmd = app.add_subcommand("fuse", "Fuse run files (rrf, ensemble, reverse-ensemble)");
    fuse_cmd->add_option("--method", fuse_method, "rrf | ensemble | reverse-ensemble")
        ->check(CLI::IsMember({"rrf", "ensemble", "reverse-ensemble"}));
    fuse_cmd->add_option("--k", fuse_k, "RRF constant");
    fuse_cmd->add_option("--filter-depth", fuse_filter_depth, "Filter view depth for ensembles");
    fuse_cmd->add_option("--tag", fuse_tag, "Run tag");
    fuse_cmd->add_option("--out,-o", fuse_out, "Fused run file")->required();
    fuse_cmd->add_option("runs", fuse_inputs, "Input runs (ensembles: <query view> <answer view>)")
        ->required()
        ->expected(2, -1);

    // label
    ConfigFlags label_flags;
    auto* label_cmd = app.add_subcommand("label", "Build query/answer views, the ensemble and a training file");
    add_config_option(*label_cmd, label_flags);
    add_input_flags(*label_cmd, label_flags);
    add_scoring_flags(*label_cmd, label_flags);
    add_run_flags(*label_cmd, label_flags);
    add_labeling_flags(*label_cmd, label_flags);

    // emit
    ConfigFlags emit_flags;
    std::string emit_run;
    std::string emit_out;
    auto* emit_cmd = app.add_subcommand("emit", "Sample labels from a ranked-list run and write a training file");
    add_config_option(*emit_cmd, emit_flags);
    add_input_flags(*emit_cmd, emit_flags);
    add_labeling_flags(*emit_cmd, emit_flags);
    emit_flags.add(*emit_cmd, "--seed", "seed", "Root random seed");
    emit_flags.add(*emit_cmd, "--separator", "render.separator", "Context separator token");
    emit_flags.add(*emit_cmd, "--query-budget", "render.query_budget", "Query + context token budget");
    emit_flags.add(*emit_cmd, "--doc-budget", "render.doc_budget", "Document token budget");
    emit_cmd->add_option("--run", emit_run, "Ranked lists to label from")->required();
    emit_cmd->add_option("--out,-o", emit_out, "Training file")->required();

    // eval
    std::string eval_qrels;
    std::vector<std::string> eval_runs;
    std::string eval_cutoffs = "3,100";
    std::optional<std::string> eval_baseline;
    std::optional<std::string> eval_tsv;
    auto* eval_cmd = app.add_subcommand("eval", "nDCG@k with paired t-tests against a baseline");
    eval_cmd->add_option("--qrels", eval_qrels, "Qrels file")->required();
    eval_cmd->add_option("--ndcg-cut", eval_cutoffs, "Comma-separated cutoffs");
    eval_cmd->add_option("--compare", eval_baseline, "Baseline run for paired t-tests");
    eval_cmd->add_option("--tsv", eval_tsv, "Per-query scores as TSV");
    eval_cmd->add_option("runs", eval_runs, "Run files")->required();

    // bench
    ConfigFlags bench_flags;
    std::optional<std::string> bench_out;
    auto* bench_cmd = app.add_subcommand("bench", "Serial per-query latency of the re-ranking stage");
    add_config_option(*bench_cmd, bench_flags);
    add_input_flags(*bench_cmd, bench_flags);
    add_scoring_flags(*bench_cmd, bench_flags);
    bench_flags.add(*bench_cmd, "--first-stage", "first_stage", "bm25 | import:<run file>");
    bench_flags.add(*bench_cmd, "--candidates", "candidates", "BM25 candidates per query");
    bench_flags.add(*bench_cmd, "--depth", "rerank_depth", "Re-ranking depth");
    bench_cmd->add_option("--out,-o", bench_out, "Per-query latency TSV");

    // synth
    SyntheticOptions synth_options;
    std::string synth_dir;
    auto* synth_cmd = app.add_subcommand("synth", "Generate the ambiguous-entity toy dataset");
    synth_cmd->add_option("--topics", synth_options.topics, "Number of topics");
    synth_cmd->add_option("--per-sense", synth_options.passages_per_sense, "Passages per sense cluster");
    synth_cmd->add_option("--noise", synth_options.noise_per_topic, "Off-topic passages per topic");
    synth_cmd->add_option("--seed", synth_options.seed, "Generator seed");
    synth_cmd->add_option("--out-dir,-o", synth_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*index_cmd) return run_index(index_flags.resolve(*index_cmd), index_out);
        if (*search_cmd) return run_search(search_flags.resolve(*search_cmd), search_out, search_field);
        if (*rerank_cmd) {
            const auto config = rerank_flags.resolve(*rerank_cmd);
            const auto result = run_cascade(config);
            std::cout << "re-ranked " << result.runs.size() << " queries; mean " << fixed(result.latency.mean_ms, 3)
                      << " ms/q -> " << (config.output_dir / "cascade.run").string() << '\n';
            return 0;
        }
        if (*fuse_cmd) return run_fuse(fuse_method, fuse_inputs, fuse_k, fuse_filter_depth, fuse_out, fuse_tag);
        if (*label_cmd) {
            const auto config = label_flags.resolve(*label_cmd);
            const auto result = run_labeling(config);
            std::cout << "labeled " << result.labeled.size() << " queries; " << result.training_lines
                      << " training lines -> " << (config.output_dir / "train.tsv").string() << '\n';
            return 0;
        }
        if (*emit_cmd) {
            auto config = emit_flags.resolve(*emit_cmd);
            config.validate();
            const auto ws = open_workspace(config);
            const auto lines = emit_from_run(ws, config, read_run(emit_run), emit_out);
            std::cout << "wrote " << lines << " training lines -> " << emit_out << '\n';
            return 0;
        }
        if (*eval_cmd) return run_eval(eval_qrels, eval_runs, eval_cutoffs, eval_baseline, eval_tsv);
        if (*bench_cmd) return run_bench(bench_flags.resolve(*bench_cmd), bench_out);
        if (*synth_cmd) return run_synth(synth_options, synth_dir);
    } catch (const ContractViolation& e) {
        std::cerr << "contract violation: " << e.what() << '\n';
        return kExitContract;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}
