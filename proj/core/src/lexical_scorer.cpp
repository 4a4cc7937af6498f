#include <algorithm>
#include <cmath>

#include "viewrank/errors.hpp"
#include "viewrank/retrieval.hpp"
#include "viewrank/scoring.hpp"

namespace viewrank {

LexicalScorer::LexicalScorer(const InvertedIndex& index, double temperature)
    : index_(index), temperature_(temperature) {
    if (temperature_ <= 0.0) temperature_ = index_.mean_term_score();
    if (!(temperature_ > 0.0)) temperature_ = 1.0;
}

std::vector<double> LexicalScorer::score(std::span<const RenderedInput> batch) const {
    const auto& analyzer = index_.analyzer();
    std::vector<double> scores;
    scores.reserve(batch.size());
    for (const auto& input : batch) {
        if (!index_.contains(input.passage_id)) {
            throw InputError("lexical scorer: passage '" + input.passage_id + "' is not in the index");
        }
        auto terms = analyzer.tokenize(input.query_segment);
        std::string context;
        std::size_t i = 0;
        const std::string_view segment = input.context_segment;
        while (i < segment.size()) {
            auto end = segment.find(' ', i);
            if (end == std::string_view::npos) end = segment.size();
            const auto token = segment.substr(i, end - i);
            if (token != input.separator) {
                context += token;
                context += ' ';
            }
            i = end + 1;
        }
        auto context_terms = analyzer.tokenize(context);
        terms.insert(terms.end(), context_terms.begin(), context_terms.end());
        std::sort(terms.begin(), terms.end());
        terms.erase(std::unique(terms.begin(), terms.end()), terms.end());

        const double raw = index_.bm25_score(terms, input.passage_id);
        scores.push_back(1.0 / (1.0 + std::exp(-raw / temperature_)));
    }
    return scores;
}

}  // namespace viewrank
