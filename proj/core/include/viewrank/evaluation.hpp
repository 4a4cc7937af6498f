#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "viewrank/datamodel.hpp"

namespace viewrank {

using PerQuery = std::map<std::string, double>;

struct MetricReport {
    std::string metric;  // e.g. "ndcg_cut_3"
    std::size_t k = 0;
    PerQuery per_query;
    double mean = 0.0;
    /// Judged queries without any positive grade; scored 0.
    std::set<std::string> no_positive_judgments;
};

/// nDCG@k with gain 2^grade - 1 and discount log2(rank + 1), evaluated over
/// every query present in `qrels`. Queries absent from `runs` score 0.
MetricReport ndcg_at_k(const RunMap& runs, const Qrels& qrels, std::size_t k);

/// nDCG@k of a single list against one query's judgments.
double ndcg(const RankedList& list, const Qrels& qrels, std::size_t k);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;  // two-sided
    std::size_t n = 0;
    bool degenerate_variance = false;
};

/// Two-sided paired t-test over the queries common to `a` and `b`.
/// Throws InputError when fewer than two queries are shared.
TTestResult paired_t_test(const PerQuery& a, const PerQuery& b);

/// Drops queries without positive judgments before testing.
TTestResult compare_reports(const MetricReport& a, const MetricReport& b);

/// Regularized incomplete beta I_x(a, b).
double regularized_incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for Student's t with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

struct LatencyReport {
    double mean_ms = 0.0;
    std::vector<double> per_query_ms;
};

/// Times `stage` once per query, serially. Throws InputError on an empty set.
template <typename Query>
LatencyReport measure_latency(const std::function<void(const Query&)>& stage,
                              std::span<const Query> queries);

LatencyReport summarize_latency(std::vector<double> per_query_ms);

template <typename Query>
LatencyReport measure_latency(const std::function<void(const Query&)>& stage,
                              std::span<const Query> queries) {
    std::vector<double> per_query;
    per_query.reserve(queries.size());
    for (const auto& q : queries) {
        const auto start = std::chrono::steady_clock::now();
        stage(q);
        const auto stop = std::chrono::steady_clock::now();
        per_query.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
    }
    return summarize_latency(std::move(per_query));
}

}  // namespace viewrank
