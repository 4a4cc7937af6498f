#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "viewrank/datamodel.hpp"

namespace viewrank {

/// A ranked list split into an agreed prefix [0, boundary) and a disagreed tail.
struct EnsembleList {
    RankedList list;
    std::size_t boundary = 0;
};

/// View-ensemble filter: stable partition of `primary_view` moving passages
/// also present in `filter_view` ahead of those that are not. Membership
/// considers the first `filter_depth` entries of the filter (all by default).
/// Scores become positional (size - rank + 1).
EnsembleList ensemble_filter(const RankedList& primary_view, const RankedList& filter_view,
                             std::optional<std::size_t> filter_depth = std::nullopt);

/// The reversed ensemble, with the answer view as primary and the query view
/// as filter.
EnsembleList reverse_ensemble_filter(const RankedList& answer_view, const RankedList& query_view,
                                     std::optional<std::size_t> filter_depth = std::nullopt);

inline constexpr double kDefaultRrfK = 60.0;

/// Reciprocal rank fusion: score(d) = sum over lists of 1 / (k + rank_d).
RankedList rrf(std::span<const RankedList> lists, double k = kDefaultRrfK);

}  // namespace viewrank
