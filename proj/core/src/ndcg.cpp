#include <algorithm>
#include <cmath>

#include "viewrank/errors.hpp"
#include "viewrank/evaluation.hpp"

namespace viewrank {
namespace {

double gain(int grade) { return std::exp2(static_cast<double>(grade)) - 1.0; }
double discount(std::size_t position) { return std::log2(static_cast<double>(position) + 1.0); }

double ideal_dcg(const Qrels& qrels, std::string_view query_id, std::size_t k) {
    const auto* judged = qrels.judgments(query_id);
    if (!judged) return 0.0;
    std::vector<int> grades;
    grades.reserve(judged->size());
    for (const auto& [_, g] : *judged) grades.push_back(g);
    std::sort(grades.begin(), grades.end(), std::greater<>());
    double idcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, grades.size()); ++i) idcg += gain(grades[i]) / discount(i + 1);
    return idcg;
}

}  // namespace

double ndcg(const RankedList& list, const Qrels& qrels, std::size_t k) {
    if (k == 0) throw InputError("nDCG cutoff must be at least 1");
    const double idcg = ideal_dcg(qrels, list.query_id(), k);
    if (idcg <= 0.0) return 0.0;
    double dcg = 0.0;
    const auto n = std::min(k, list.size());
    for (std::size_t i = 0; i < n; ++i) {
        dcg += gain(qrels.grade(list.query_id(), list[i].passage_id)) / discount(i + 1);
    }
    return dcg / idcg;
}

MetricReport ndcg_at_k(const RunMap& runs, const Qrels& qrels, std::size_t k) {
    if (k == 0) throw InputError("nDCG cutoff must be at least 1");
    MetricReport report;
    report.metric = "ndcg_cut_" + std::to_string(k);
    report.k = k;
    double sum = 0.0;
    for (const auto& [qid, _] : qrels.data()) {
        double value = 0.0;
        if (ideal_dcg(qrels, qid, k) <= 0.0) {
            report.no_positive_judgments.insert(qid);
        } else if (auto it = runs.find(qid); it != runs.end()) {
            value = ndcg(it->second, qrels, k);
        }
        report.per_query.emplace(qid, value);
        sum += value;
    }
    report.mean = report.per_query.empty() ? 0.0 : sum / static_cast<double>(report.per_query.size());
    return report;
}

}  // namespace viewrank
