#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "viewrank/datamodel.hpp"

namespace viewrank {

/// Splits text into maximal runs of letters and digits.
///
/// Bytes >= 0x80 count as letters. Only ASCII is case-folded.
struct Analyzer {
    bool lowercase = true;
    std::unordered_set<std::string> stopwords;

    std::vector<std::string> tokenize(std::string_view text) const;
};

struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
};

struct Posting {
    std::uint32_t doc = 0;  // dense document number, ordered like passage ids
    std::uint32_t tf = 0;

    friend bool operator==(const Posting&, const Posting&) = default;
};

/// Immutable BM25 inverted index over a passage collection.
class InvertedIndex {
public:
    /// Throws InputError on an empty collection.
    static InvertedIndex build(const PassageCollection& collection, Analyzer analyzer = {},
                               Bm25Params params = {});

    /// Versioned binary container (magic "CFG1").
    void save(const std::filesystem::path& path) const;
    static InvertedIndex load(const std::filesystem::path& path);

    /// Okapi BM25 summed over `query_terms` (repeated terms count repeatedly).
    /// Throws InputError for an unknown passage.
    double bm25_score(std::span<const std::string> query_terms, std::string_view passage_id) const;

    /// Top-n passages for the analyzed `query_text`; only passages matching at
    /// least one term are returned. An empty analyzed query yields an empty
    /// list and a warning.
    RankedList search(std::string query_id, std::string_view query_text, std::size_t n) const;
    RankedList search_terms(std::string query_id, std::span<const std::string> terms,
                            std::size_t n) const;

    double idf(std::string_view term) const;
    std::size_t document_frequency(std::string_view term) const;
    const std::vector<Posting>* postings(std::string_view term) const;

    std::size_t doc_count() const noexcept { return doc_ids_.size(); }
    double avg_doc_length() const noexcept { return avg_doc_length_; }
    std::size_t doc_length(std::string_view passage_id) const;
    const std::string& doc_id(std::uint32_t doc) const { return doc_ids_.at(doc); }
    bool contains(std::string_view passage_id) const;
    std::size_t term_count() const noexcept { return postings_.size(); }

    /// Mean single-term BM25 contribution over every posting.
    double mean_term_score() const noexcept { return mean_term_score_; }

    const Analyzer& analyzer() const noexcept { return analyzer_; }
    const Bm25Params& params() const noexcept { return params_; }

    /// Visits every (term, postings) pair; order unspecified.
    template <typename Fn>
    void for_each_term(Fn&& fn) const {
        for (const auto& [term, list] : postings_) fn(term, list);
    }

private:
    double term_weight(std::uint32_t tf, std::uint32_t doc_len, double idf) const noexcept;
    std::uint32_t doc_number(std::string_view passage_id) const;
    void finalize();

    Analyzer analyzer_;
    Bm25Params params_;
    std::vector<std::string> doc_ids_;  // sorted ascending
    std::vector<std::uint32_t> doc_lengths_;
    std::unordered_map<std::string, std::uint32_t> doc_numbers_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    double avg_doc_length_ = 0.0;
    double mean_term_score_ = 0.0;
};

}  // namespace viewrank
