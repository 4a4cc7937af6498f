#include "viewrank/retrieval.hpp"

namespace viewrank {
namespace {

bool is_word_byte(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

}  // namespace

std::vector<std::string> Analyzer::tokenize(std::string_view text) const {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && !is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
        const auto start = i;
        while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) ++i;
        if (start == i) continue;
        std::string token(text.substr(start, i - start));
        if (lowercase) {
            for (auto& c : token) {
                if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
            }
        }
        if (!stopwords.empty() && stopwords.contains(token)) continue;
        tokens.push_back(std::move(token));
    }
    return tokens;
}

}  // namespace viewrank
