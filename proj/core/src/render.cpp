#include <cctype>

#include "viewrank/errors.hpp"
#include "viewrank/scoring.hpp"

namespace viewrank {
namespace {

std::vector<std::string_view> whitespace_tokens(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        const auto start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) out.push_back(text.substr(start, i - start));
    }
    return out;
}

template <typename It>
std::string join(It first, It last) {
    std::string out;
    for (auto it = first; it != last; ++it) {
        if (!out.empty()) out += ' ';
        out += *it;
    }
    return out;
}

}  // namespace

RenderedInput render_input(const ConversationalQuery& query, const Passage& passage,
                           const RenderOptions& options) {
    const auto& budgets = options.budgets;
    if (budgets.query == 0 || budgets.document == 0) {
        throw InputError("token budgets must be positive");
    }
    if (options.separator.empty() || whitespace_tokens(options.separator).size() != 1) {
        throw InputError("context separator must be a single non-empty token");
    }

    auto query_tokens = whitespace_tokens(query.utterance);
    if (query_tokens.size() > budgets.query) query_tokens.resize(budgets.query);
    const std::size_t context_budget = budgets.query - query_tokens.size();

    // Context tokens oldest first; separators count against the budget.
    struct ContextToken {
        std::string_view text;
        bool separator;
    };
    std::vector<ContextToken> context;
    for (const auto& turn : query.history) {
        const auto tokens = whitespace_tokens(turn);
        if (tokens.empty()) continue;
        if (!context.empty()) context.push_back({options.separator, true});
        for (auto t : tokens) context.push_back({t, false});
    }
    std::size_t first = context.size() > context_budget ? context.size() - context_budget : 0;
    if (first < context.size() && context[first].separator) ++first;

    std::vector<std::string_view> context_tokens;
    for (std::size_t i = first; i < context.size(); ++i) context_tokens.push_back(context[i].text);

    auto doc_tokens = whitespace_tokens(passage.text);
    if (doc_tokens.size() > budgets.document) doc_tokens.resize(budgets.document);

    RenderedInput input;
    input.passage_id = passage.id;
    input.separator = options.separator;
    input.budgets = budgets;
    input.query_segment = join(query_tokens.begin(), query_tokens.end());
    input.context_segment = join(context_tokens.begin(), context_tokens.end());
    input.document_segment = join(doc_tokens.begin(), doc_tokens.end());
    input.text = "Query: " + input.query_segment + " Context: " + input.context_segment +
                 " Document: " + input.document_segment + " Relevant:";
    return input;
}

}  // namespace viewrank
