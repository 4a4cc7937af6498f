#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "viewrank/formats.hpp"
#include "viewrank/labeling.hpp"
#include "viewrank/retrieval.hpp"
#include "viewrank/scoring.hpp"

namespace viewrank {

struct FirstStage {
    enum class Kind { bm25, import_run };
    Kind kind = Kind::bm25;
    std::filesystem::path run;  // for import_run

    /// "bm25" or "import:<path>".
    static FirstStage parse(std::string_view text);
};

struct ScorerSpec {
    enum class Kind { lexical, remote };
    Kind kind = Kind::lexical;
    std::string url;  // for remote

    /// "lexical" or "remote:<url>".
    static ScorerSpec parse(std::string_view text);
};

/// Environment variables consulted by apply_environment().
inline constexpr const char* kEnvScorerUrl = "VIEWRANK_SCORER_URL";
inline constexpr const char* kEnvSeed = "VIEWRANK_SEED";

struct PipelineConfig {
    std::filesystem::path corpus;
    CorpusFormat corpus_format = CorpusFormat::tsv;
    std::filesystem::path topics;
    std::filesystem::path index;  // optional prebuilt index; built from corpus when empty
    FirstStage first_stage;
    ScorerSpec scorer;
    std::size_t candidates = 1000;   // first-stage depth for the cascade
    std::size_t rerank_depth = 100;
    LabelingConfig labeling;
    Bm25Params bm25;
    double temperature = 0.0;  // lexical scorer; 0 = index default
    RemoteScorerOptions remote;
    std::filesystem::path output_dir = ".";
    std::uint64_t seed = 0;
    std::size_t workers = 1;

    /// Sets one `key = value` setting. Throws InputError on unknown keys or
    /// unparsable values.
    void set(std::string_view key, std::string_view value);

    /// Checks referenced paths exist and depths are sane. Throws InputError.
    void validate() const;
};

/// Reads a TOML-style file of `key = value` lines (`#` comments, optional
/// quotes, optional `[section]` headers which prefix keys as `section.key`).
PipelineConfig load_config(const std::filesystem::path& path);
void apply_config_text(PipelineConfig& config, std::string_view text,
                       const std::string& source_name = "<config>");

/// Applies VIEWRANK_SCORER_URL and VIEWRANK_SEED when set.
void apply_environment(PipelineConfig& config);

}  // namespace viewrank
