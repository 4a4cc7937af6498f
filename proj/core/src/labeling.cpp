#include "viewrank/labeling.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>

#include "viewrank/diagnostics.hpp"
#include "viewrank/errors.hpp"
#include "viewrank/retrieval.hpp"

namespace viewrank {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform integer in [0, n) by rejection sampling.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const auto r = rng();
        if (r >= threshold) return r % n;
    }
}

bool is_blank(std::string_view s) {
    return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

RankedList retrieve_and_rerank(const std::string& query_id, const std::string& retrieval_text,
                               const std::string& rerank_text, const LabelingContext& context,
                               const LabelingConfig& config) {
    const auto candidates = context.index.search(query_id, retrieval_text, config.first_stage_depth);
    RerankOptions options;
    options.depth = config.first_stage_depth;
    options.render = config.render;
    const auto query = ConversationalQuery::standalone(query_id, rerank_text);
    return rerank(candidates, query, context.collection, context.scorer, options)
        .list.truncated(config.rerank_depth);
}

}  // namespace

void LabelingConfig::validate() const {
    if (!(label_count > 0 && label_count <= rerank_depth && rerank_depth <= first_stage_depth)) {
        throw InputError("labeling config requires 0 < k <= M <= N (got k=" + std::to_string(label_count) +
                         ", M=" + std::to_string(rerank_depth) + ", N=" + std::to_string(first_stage_depth) +
                         ")");
    }
    if (filter_depth && *filter_depth == 0) throw InputError("filter depth must be at least 1");
}

RankedList build_query_view(const LabelingSource& source, const LabelingContext& context,
                            const LabelingConfig& config) {
    config.validate();
    if (is_blank(source.rewritten_query)) {
        throw InputError("query " + source.query_id + ": empty rewritten query");
    }
    return retrieve_and_rerank(source.query_id, source.rewritten_query, source.rewritten_query, context,
                               config);
}

RankedList build_answer_view(const LabelingSource& source, const LabelingContext& context,
                             const LabelingConfig& config) {
    if (is_blank(source.answer)) {
        warn("query " + source.query_id + ": empty answer; answer view falls back to the query view");
        return build_query_view(source, context, config);
    }
    config.validate();
    if (is_blank(source.rewritten_query)) {
        throw InputError("query " + source.query_id + ": empty rewritten query");
    }
    return retrieve_and_rerank(source.query_id,
                               source.rewritten_query + config.concat_separator + source.answer,
                               source.rewritten_query, context, config);
}

std::uint64_t query_seed(std::uint64_t root_seed, std::string_view query_id) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : query_id) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(root_seed ^ splitmix64(h));
}

LabeledSet sample_labels(const EnsembleList& ensemble, const LabelingConfig& config) {
    config.validate();
    const auto& list = ensemble.list;
    if (list.empty()) {
        throw InputError("query " + list.query_id() + ": cannot sample labels from an empty ranked list");
    }

    LabeledSet labeled;
    labeled.query_id = list.query_id();
    const auto positives = std::min(config.label_count, list.size());
    for (std::size_t i = 0; i < positives; ++i) labeled.positives.push_back(list[i].passage_id);

    const auto pool_end = std::min(config.rerank_depth, list.size());
    const auto pool_size = pool_end > positives ? pool_end - positives : 0;
    const auto negatives = std::min(config.label_count, pool_size);
    if (negatives < config.label_count) {
        warn("query " + labeled.query_id + ": only " + std::to_string(negatives) +
             " negatives available (wanted " + std::to_string(config.label_count) + ")");
    }

    std::vector<std::size_t> pool(pool_size);
    std::iota(pool.begin(), pool.end(), positives);
    std::mt19937_64 rng(query_seed(config.seed, labeled.query_id));
    for (std::size_t i = 0; i < negatives; ++i) {
        const auto j = i + uniform_below(rng, pool_size - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(negatives);
    std::sort(pool.begin(), pool.end());
    for (auto idx : pool) labeled.negatives.push_back(list[idx].passage_id);
    return labeled;
}

QueryLookup index_queries(std::span<const ConversationalQuery> queries) {
    QueryLookup lookup;
    for (const auto& q : queries) lookup.emplace(q.query_id, q);
    return lookup;
}

std::size_t emit_training_lines(std::span<const LabeledSet> labeled_sets, const QueryLookup& queries,
                                const PassageCollection& collection, const RenderOptions& render,
                                std::ostream& out) {
    std::size_t lines = 0;
    for (const auto& set : labeled_sets) {
        auto q = queries.find(set.query_id);
        if (q == queries.end()) {
            throw InputError("training file: unknown query id '" + set.query_id + "'");
        }
        auto emit = [&](const std::vector<std::string>& ids, std::string_view target) {
            for (const auto& id : ids) {
                const auto* passage = collection.find(id);
                if (!passage) {
                    throw InputError("training file: query " + set.query_id + " references unknown passage '" +
                                     id + "'");
                }
                out << render_input(q->second, *passage, render).text << '\t' << target << '\n';
                ++lines;
            }
        };
        emit(set.positives, "true");
        emit(set.negatives, "false");
    }
    return lines;
}

std::size_t emit_training_file(std::span<const LabeledSet> labeled_sets, const QueryLookup& queries,
                               const PassageCollection& collection, const RenderOptions& render,
                               const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    const auto lines = emit_training_lines(labeled_sets, queries, collection, render, out);
    if (!out) throw InputError("failed writing " + path.string());
    return lines;
}

}  // namespace viewrank
