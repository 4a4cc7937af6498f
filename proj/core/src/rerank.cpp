#include <algorithm>
#include <chrono>

#include "viewrank/errors.hpp"
#include "viewrank/scoring.hpp"

namespace viewrank {
namespace {

[[noreturn]] void rethrow_with_query(const std::string& query_id) {
    const std::string prefix = "query " + query_id + ": ";
    try {
        throw;
    } catch (const ContractViolation& e) {
        throw ContractViolation(prefix + e.what());
    } catch (const ServiceError& e) {
        throw ServiceError(prefix + e.what(), e.chunk_index());
    } catch (const InputError& e) {
        throw InputError(prefix + e.what());
    } catch (const std::exception& e) {
        throw Error(prefix + e.what());
    }
}

}  // namespace

RerankResult rerank(const RankedList& candidates, const ConversationalQuery& query,
                    const PassageCollection& collection, const Scorer& scorer,
                    const RerankOptions& options) {
    if (options.depth == 0) throw InputError("rerank depth must be at least 1");
    const auto start = std::chrono::steady_clock::now();

    const auto& entries = candidates.entries();
    const auto block = std::min(options.depth, entries.size());

    std::vector<double> scores;
    try {
        std::vector<RenderedInput> inputs;
        inputs.reserve(block);
        for (std::size_t i = 0; i < block; ++i) {
            inputs.push_back(render_input(query, collection.at(entries[i].passage_id), options.render));
        }
        scores = scorer.score(inputs);
        if (scores.size() != block) {
            throw ContractViolation("scorer '" + scorer.name() + "' returned " + std::to_string(scores.size()) +
                                    " scores for " + std::to_string(block) + " inputs");
        }
    } catch (...) {
        rethrow_with_query(query.query_id);
    }

    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(block);
    for (std::size_t i = 0; i < block; ++i) scored.emplace_back(entries[i].passage_id, scores[i]);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    std::vector<RankedEntry> out;
    out.reserve(entries.size());
    for (auto& [id, score] : scored) out.push_back({std::move(id), out.size() + 1, score});
    // Tail keeps first-stage order with scores strictly below the block.
    const double floor = out.empty() ? 0.0 : out.back().score;
    for (std::size_t i = block; i < entries.size(); ++i) {
        out.push_back({entries[i].passage_id, out.size() + 1, floor - static_cast<double>(i - block + 1)});
    }

    RerankResult result;
    result.list = RankedList::from_entries(candidates.query_id(), std::move(out));
    result.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace viewrank
