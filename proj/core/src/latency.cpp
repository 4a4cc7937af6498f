#include <numeric>

#include "viewrank/errors.hpp"
#include "viewrank/evaluation.hpp"

namespace viewrank {

LatencyReport summarize_latency(std::vector<double> per_query_ms) {
    if (per_query_ms.empty()) throw InputError("empty query set");
    LatencyReport report;
    report.mean_ms = std::accumulate(per_query_ms.begin(), per_query_ms.end(), 0.0) /
                     static_cast<double>(per_query_ms.size());
    report.per_query_ms = std::move(per_query_ms);
    return report;
}

}  // namespace viewrank
