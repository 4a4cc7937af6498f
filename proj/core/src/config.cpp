#include "viewrank/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "viewrank/errors.hpp"

namespace viewrank {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw InputError("config: invalid value '" + std::string(value) + "' for " + std::string(key));
    }
    return out;
}

std::size_t parse_positive(std::string_view key, std::string_view value) {
    const auto n = parse_number<std::size_t>(key, value);
    if (n == 0) throw InputError("config: " + std::string(key) + " must be at least 1");
    return n;
}

// Strips an unquoted trailing comment and surrounding quotes.
std::string_view unquote(std::string_view value) {
    value = trim(value);
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'')) {
        const auto close = value.find(value.front(), 1);
        if (close != std::string_view::npos) return value.substr(1, close - 1);
    }
    if (const auto hash = value.find('#'); hash != std::string_view::npos) value = trim(value.substr(0, hash));
    return value;
}

}  // namespace

FirstStage FirstStage::parse(std::string_view text) {
    FirstStage fs;
    if (text == "bm25") return fs;
    if (text.starts_with("import:") && text.size() > 7) {
        fs.kind = Kind::import_run;
        fs.run = std::string(text.substr(7));
        return fs;
    }
    throw InputError("first stage must be 'bm25' or 'import:<run file>', got '" + std::string(text) + "'");
}

ScorerSpec ScorerSpec::parse(std::string_view text) {
    ScorerSpec spec;
    if (text == "lexical") return spec;
    if (text.starts_with("remote:") && text.size() > 7) {
        spec.kind = Kind::remote;
        spec.url = std::string(text.substr(7));
        return spec;
    }
    throw InputError("scorer must be 'lexical' or 'remote:<url>', got '" + std::string(text) + "'");
}

void PipelineConfig::set(std::string_view key, std::string_view value) {
    const std::string v(value);
    if (key == "corpus") {
        corpus = v;
    } else if (key == "corpus_format") {
        corpus_format = parse_corpus_format(value);
    } else if (key == "topics") {
        topics = v;
    } else if (key == "index") {
        index = v;
    } else if (key == "first_stage") {
        first_stage = FirstStage::parse(value);
    } else if (key == "scorer") {
        scorer = ScorerSpec::parse(value);
        if (scorer.kind == ScorerSpec::Kind::remote) remote.endpoint = scorer.url;
    } else if (key == "candidates") {
        candidates = parse_positive(key, value);
    } else if (key == "rerank_depth") {
        rerank_depth = parse_positive(key, value);
    } else if (key == "output_dir") {
        output_dir = v;
    } else if (key == "seed") {
        seed = parse_number<std::uint64_t>(key, value);
        labeling.seed = seed;
    } else if (key == "workers") {
        workers = parse_positive(key, value);
    } else if (key == "bm25.k1") {
        bm25.k1 = parse_number<double>(key, value);
    } else if (key == "bm25.b") {
        bm25.b = parse_number<double>(key, value);
    } else if (key == "temperature") {
        temperature = parse_number<double>(key, value);
    } else if (key == "labeling.first_stage_depth") {
        labeling.first_stage_depth = parse_positive(key, value);
    } else if (key == "labeling.rerank_depth") {
        labeling.rerank_depth = parse_positive(key, value);
    } else if (key == "labeling.label_count") {
        labeling.label_count = parse_positive(key, value);
    } else if (key == "labeling.filter_depth") {
        labeling.filter_depth = parse_positive(key, value);
    } else if (key == "labeling.concat_separator") {
        labeling.concat_separator = v;
    } else if (key == "render.separator") {
        labeling.render.separator = v;
    } else if (key == "render.query_budget") {
        labeling.render.budgets.query = parse_positive(key, value);
    } else if (key == "render.doc_budget") {
        labeling.render.budgets.document = parse_positive(key, value);
    } else if (key == "remote.batch_size") {
        remote.batch_size = parse_positive(key, value);
    } else if (key == "remote.timeout_ms") {
        remote.timeout = std::chrono::milliseconds(parse_positive(key, value));
    } else if (key == "remote.retries") {
        remote.retries = parse_number<int>(key, value);
    } else if (key == "remote.max_in_flight") {
        remote.max_in_flight = parse_positive(key, value);
    } else {
        throw InputError("config: unknown key '" + std::string(key) + "'");
    }
}

void PipelineConfig::validate() const {
    auto require_file = [](const std::filesystem::path& p, const char* what) {
        if (p.empty()) throw InputError(std::string("config: ") + what + " path is not set");
        if (!std::filesystem::exists(p)) {
            throw InputError(std::string("config: ") + what + " '" + p.string() + "' does not exist");
        }
    };
    require_file(corpus, "corpus");
    require_file(topics, "topics");
    if (!index.empty()) require_file(index, "index");
    if (first_stage.kind == FirstStage::Kind::import_run) require_file(first_stage.run, "imported run");
    if (scorer.kind == ScorerSpec::Kind::remote && remote.endpoint.empty()) {
        throw InputError("config: remote scorer needs an endpoint URL");
    }
    if (rerank_depth == 0 || candidates == 0) throw InputError("config: depths must be at least 1");
    if (workers == 0) throw InputError("config: workers must be at least 1");
    labeling.validate();
}

void apply_config_text(PipelineConfig& config, std::string_view text, const std::string& source_name) {
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto here = source_name + ":" + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw InputError(here + "malformed section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw InputError(here + "expected key = value");
        auto key = std::string(trim(line.substr(0, eq)));
        if (!section.empty()) key = section + "." + key;
        try {
            config.set(key, unquote(line.substr(eq + 1)));
        } catch (const InputError& e) {
            throw InputError(here + e.what());
        }
    }
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    PipelineConfig config;
    apply_config_text(config, buffer.str(), path.string());
    return config;
}

void apply_environment(PipelineConfig& config) {
    if (const char* url = std::getenv(kEnvScorerUrl); url && *url) {
        config.set("scorer", std::string("remote:") + url);
    }
    if (const char* seed = std::getenv(kEnvSeed); seed && *seed) config.set("seed", seed);
}

}  // namespace viewrank
