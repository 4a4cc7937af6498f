#pragma once

// Readers and writers for corpora, conversational topics, TREC runs and qrels.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "viewrank/datamodel.hpp"

namespace viewrank {

enum class CorpusFormat { tsv, jsonl };

/// Parses "tsv" / "jsonl". Throws InputError otherwise.
CorpusFormat parse_corpus_format(std::string_view name);

/// `id<TAB>text` rows or `{"id":..,"contents":..}` objects, one per line.
/// Errors name the offending line number or duplicate id.
PassageCollection parse_corpus(const std::filesystem::path& path, CorpusFormat format);
PassageCollection parse_corpus(std::istream& in, CorpusFormat format,
                               const std::string& source_name = "<stream>");

struct TopicSet {
    /// Ordered by first appearance of the topic, then by turn.
    std::vector<ConversationalQuery> queries;
    /// One entry per query carrying a non-empty rewrite, same order as `queries`.
    std::vector<LabelingSource> sources;

    const ConversationalQuery* find_query(std::string_view query_id) const;
    const LabelingSource* find_source(std::string_view query_id) const;
};

/// JSONL with fields topic_id, turn, utterance and optional rewrite, answer.
TopicSet parse_topics(const std::filesystem::path& path);
TopicSet parse_topics(std::istream& in, const std::string& source_name = "<stream>");

/// Six-column TREC run format. Lines starting with '#' are ignored.
RunMap read_run(const std::filesystem::path& path);
RunMap read_run(std::istream& in, const std::string& source_name = "<stream>");

struct RunWriteOptions {
    std::string tag = "viewrank";
    /// When set, a `# seed=<n>` header line is written first.
    std::optional<std::uint64_t> seed;
};

/// Scores are printed with exactly six decimals.
void write_run(const RunMap& runs, const RunWriteOptions& options, const std::filesystem::path& path);
void write_run(const RunMap& runs, const RunWriteOptions& options, std::ostream& out);

/// Four-column `qid 0 docid grade`. Duplicate pairs overwrite with a warning.
Qrels parse_qrels(const std::filesystem::path& path);
Qrels parse_qrels(std::istream& in, const std::string& source_name = "<stream>");

void write_qrels(const Qrels& qrels, const std::filesystem::path& path);
void write_qrels(const Qrels& qrels, std::ostream& out);

/// Corpus writers used by the synthetic generator and the CLI.
void write_corpus_tsv(const PassageCollection& collection, std::ostream& out);
void write_topics_jsonl(const TopicSet& topics, std::ostream& out);

}  // namespace viewrank
