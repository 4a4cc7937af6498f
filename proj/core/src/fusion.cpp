#include "viewrank/fusion.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "viewrank/errors.hpp"

namespace viewrank {

EnsembleList ensemble_filter(const RankedList& primary_view, const RankedList& filter_view,
                             std::optional<std::size_t> filter_depth) {
    if (primary_view.query_id() != filter_view.query_id()) {
        throw InputError("ensemble filter: query ids differ ('" + primary_view.query_id() + "' vs '" +
                         filter_view.query_id() + "')");
    }
    const auto depth = std::min(filter_depth.value_or(filter_view.size()), filter_view.size());
    std::unordered_set<std::string_view> members;
    members.reserve(depth);
    for (std::size_t i = 0; i < depth; ++i) members.insert(filter_view[i].passage_id);

    std::vector<std::string> agreed;
    std::vector<std::string> disagreed;
    for (const auto& e : primary_view.entries()) {
        (members.contains(e.passage_id) ? agreed : disagreed).push_back(e.passage_id);
    }

    EnsembleList out;
    out.boundary = agreed.size();
    agreed.insert(agreed.end(), std::make_move_iterator(disagreed.begin()),
                  std::make_move_iterator(disagreed.end()));
    out.list = RankedList::from_order(primary_view.query_id(), agreed);
    return out;
}

EnsembleList reverse_ensemble_filter(const RankedList& answer_view, const RankedList& query_view,
                                     std::optional<std::size_t> filter_depth) {
    return ensemble_filter(answer_view, query_view, filter_depth);
}

RankedList rrf(std::span<const RankedList> lists, double k) {
    if (lists.size() < 2) throw InputError("rank fusion needs at least two lists");
    if (!(k > 0.0)) throw InputError("rank fusion constant must be positive");
    const auto& qid = lists.front().query_id();
    std::unordered_map<std::string, std::vector<std::size_t>> ranks;
    for (const auto& list : lists) {
        if (list.query_id() != qid) {
            throw InputError("rank fusion: query ids differ ('" + qid + "' vs '" + list.query_id() + "')");
        }
        for (const auto& e : list.entries()) ranks[e.passage_id].push_back(e.rank);
    }
    // Reciprocals are summed in ascending rank order.
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(ranks.size());
    for (auto& [id, r] : ranks) {
        std::sort(r.begin(), r.end());
        double total = 0.0;
        for (auto rank : r) total += 1.0 / (k + static_cast<double>(rank));
        scored.emplace_back(id, total);
    }
    return RankedList::from_scores(qid, std::move(scored));
}

}  // namespace viewrank
