#include "viewrank/formats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "viewrank/diagnostics.hpp"
#include "viewrank/errors.hpp"

namespace viewrank {
namespace {

using json = nlohmann::json;

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

std::string where(const std::string& source, std::size_t line_no) {
    return source + ":" + std::to_string(line_no);
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool is_blank(std::string_view line) {
    return line.find_first_not_of(" \t") == std::string_view::npos;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size()) break;
        const auto start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        fields.push_back(line.substr(start, i - start));
    }
    return fields;
}

template <typename T>
bool parse_int(std::string_view text, T& out) {
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

bool parse_score(std::string_view text, double& out) {
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

std::string json_to_id(const json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number_integer()) return std::to_string(value.get<long long>());
    throw std::invalid_argument("expected a string or integer");
}

}  // namespace

CorpusFormat parse_corpus_format(std::string_view name) {
    if (name == "tsv") return CorpusFormat::tsv;
    if (name == "jsonl") return CorpusFormat::jsonl;
    throw InputError("unknown corpus format '" + std::string(name) + "' (expected tsv or jsonl)");
}

PassageCollection parse_corpus(const std::filesystem::path& path, CorpusFormat format) {
    auto in = open_input(path);
    return parse_corpus(in, format, path.string());
}

PassageCollection parse_corpus(std::istream& in, CorpusFormat format, const std::string& source_name) {
    PassageCollection collection;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (is_blank(line)) continue;

        Passage passage;
        if (format == CorpusFormat::tsv) {
            const auto tab = line.find('\t');
            if (tab == std::string::npos) {
                throw InputError(where(source_name, line_no) + ": malformed row (expected id<TAB>text)");
            }
            passage.id = line.substr(0, tab);
            passage.text = line.substr(tab + 1);
        } else {
            json obj;
            try {
                obj = json::parse(line);
            } catch (const json::parse_error& e) {
                throw InputError(where(source_name, line_no) + ": malformed JSON: " + e.what());
            }
            if (!obj.is_object() || !obj.contains("id") || !obj.contains("contents") ||
                !obj["id"].is_string() || !obj["contents"].is_string()) {
                throw InputError(where(source_name, line_no) +
                                 ": malformed row (expected string fields \"id\" and \"contents\")");
            }
            passage.id = obj["id"].get<std::string>();
            passage.text = obj["contents"].get<std::string>();
        }
        if (!is_valid_passage_id(passage.id)) {
            throw InputError(where(source_name, line_no) + ": malformed row (invalid passage id '" +
                             passage.id + "')");
        }
        if (collection.contains(passage.id)) {
            throw InputError(where(source_name, line_no) + ": duplicate passage id " + passage.id);
        }
        collection.add(std::move(passage));
    }
    return collection;
}

const ConversationalQuery* TopicSet::find_query(std::string_view query_id) const {
    auto it = std::find_if(queries.begin(), queries.end(),
                           [&](const auto& q) { return q.query_id == query_id; });
    return it == queries.end() ? nullptr : &*it;
}

const LabelingSource* TopicSet::find_source(std::string_view query_id) const {
    auto it = std::find_if(sources.begin(), sources.end(),
                           [&](const auto& s) { return s.query_id == query_id; });
    return it == sources.end() ? nullptr : &*it;
}

TopicSet parse_topics(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_topics(in, path.string());
}

TopicSet parse_topics(std::istream& in, const std::string& source_name) {
    struct Turn {
        int turn;
        std::string utterance;
        std::string rewrite;
        std::string answer;
        std::size_t line_no;
    };
    std::vector<std::string> topic_order;
    std::unordered_map<std::string, std::vector<Turn>> turns_by_topic;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (is_blank(line)) continue;
        const auto here = where(source_name, line_no);
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw InputError(here + ": malformed JSON: " + e.what());
        }
        if (!obj.is_object()) throw InputError(here + ": expected a JSON object");

        Turn t{};
        std::string topic_id;
        try {
            topic_id = json_to_id(obj.at("topic_id"));
            const auto& turn = obj.at("turn");
            if (!turn.is_number_integer()) throw std::invalid_argument("turn must be an integer");
            t.turn = turn.get<int>();
            t.utterance = obj.at("utterance").get<std::string>();
            if (auto it = obj.find("rewrite"); it != obj.end() && !it->is_null()) {
                t.rewrite = it->get<std::string>();
            }
            if (auto it = obj.find("answer"); it != obj.end() && !it->is_null()) {
                t.answer = it->get<std::string>();
            }
        } catch (const std::exception& e) {
            throw InputError(here + ": malformed topic row: " + e.what());
        }
        if (topic_id.empty() || !is_valid_passage_id(topic_id)) {
            throw InputError(here + ": invalid topic_id '" + topic_id + "'");
        }
        if (t.turn <= 0) {
            throw InputError(here + ": turn must be positive (got " + std::to_string(t.turn) + ")");
        }
        t.line_no = line_no;
        auto [it, inserted] = turns_by_topic.try_emplace(topic_id);
        if (inserted) topic_order.push_back(topic_id);
        it->second.push_back(std::move(t));
    }

    TopicSet topics;
    for (const auto& topic_id : topic_order) {
        auto& turns = turns_by_topic[topic_id];
        std::stable_sort(turns.begin(), turns.end(),
                         [](const Turn& a, const Turn& b) { return a.turn < b.turn; });
        std::vector<std::string> history;
        for (std::size_t i = 0; i < turns.size(); ++i) {
            const auto expected = static_cast<int>(i) + 1;
            if (turns[i].turn != expected) {
                if (turns[i].turn < expected) {
                    throw InputError(where(source_name, turns[i].line_no) + ": topic " + topic_id +
                                     " repeats turn " + std::to_string(turns[i].turn));
                }
                throw InputError(source_name + ": topic " + topic_id + " is missing turn " +
                                 std::to_string(expected));
            }
            ConversationalQuery q;
            q.topic_id = topic_id;
            q.turn = turns[i].turn;
            q.utterance = turns[i].utterance;
            q.history = history;
            q.query_id = make_query_id(topic_id, q.turn);
            if (!turns[i].rewrite.empty()) {
                topics.sources.push_back({q.query_id, turns[i].rewrite, turns[i].answer});
            }
            history.push_back(turns[i].utterance);
            topics.queries.push_back(std::move(q));
        }
    }

    std::unordered_map<std::string_view, int> ids;
    for (const auto& q : topics.queries) {
        if (++ids[q.query_id] > 1) throw InputError(source_name + ": duplicate query id " + q.query_id);
    }
    return topics;
}

RunMap read_run(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_run(in, path.string());
}

RunMap read_run(std::istream& in, const std::string& source_name) {
    std::map<std::string, std::vector<RankedEntry>> grouped;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (is_blank(line) || line.front() == '#') continue;
        const auto here = where(source_name, line_no);
        const auto fields = split_ws(line);
        if (fields.size() != 6) {
            throw InputError(here + ": expected 6 columns (qid Q0 docid rank score tag), found " +
                             std::to_string(fields.size()));
        }
        RankedEntry entry;
        entry.passage_id = std::string(fields[2]);
        if (!parse_int(fields[3], entry.rank) || entry.rank == 0) {
            throw InputError(here + ": unparsable rank '" + std::string(fields[3]) + "'");
        }
        if (!parse_score(fields[4], entry.score)) {
            throw InputError(here + ": unparsable score '" + std::string(fields[4]) + "'");
        }
        grouped[std::string(fields[0])].push_back(std::move(entry));
    }

    RunMap runs;
    for (auto& [qid, entries] : grouped) {
        std::stable_sort(entries.begin(), entries.end(),
                         [](const RankedEntry& a, const RankedEntry& b) { return a.rank < b.rank; });
        try {
            // Equal printed scores may list their ids in any order.
            runs.emplace(qid, RankedList::from_entries(qid, std::move(entries), /*strict_ties=*/false));
        } catch (const InputError& e) {
            throw InputError(source_name + ": " + e.what());
        }
    }
    return runs;
}

void write_run(const RunMap& runs, const RunWriteOptions& options, const std::filesystem::path& path) {
    auto out = open_output(path);
    write_run(runs, options, out);
    if (!out) throw InputError("failed writing " + path.string());
}

void write_run(const RunMap& runs, const RunWriteOptions& options, std::ostream& out) {
    if (options.tag.empty() || !is_valid_passage_id(options.tag)) {
        throw InputError("run tag must be non-empty and contain no whitespace");
    }
    if (options.seed) out << "# seed=" << *options.seed << '\n';
    char score[64];
    for (const auto& [qid, list] : runs) {
        for (const auto& e : list.entries()) {
            std::snprintf(score, sizeof score, "%.6f", e.score);
            out << qid << " Q0 " << e.passage_id << ' ' << e.rank << ' ' << score << ' '
                << options.tag << '\n';
        }
    }
}

Qrels parse_qrels(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_qrels(in, path.string());
}

Qrels parse_qrels(std::istream& in, const std::string& source_name) {
    Qrels qrels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (is_blank(line) || line.front() == '#') continue;
        const auto here = where(source_name, line_no);
        const auto fields = split_ws(line);
        if (fields.size() != 4) {
            throw InputError(here + ": expected 4 columns (qid iter docid grade), found " +
                             std::to_string(fields.size()));
        }
        int grade = 0;
        if (!parse_int(fields[3], grade)) {
            throw InputError(here + ": unparsable grade '" + std::string(fields[3]) + "'");
        }
        const std::string qid(fields[0]);
        const std::string pid(fields[2]);
        try {
            if (qrels.set(qid, pid, grade)) {
                warn(here + ": duplicate judgment for (" + qid + ", " + pid + "); keeping the later grade");
            }
        } catch (const InputError& e) {
            throw InputError(here + ": " + e.what());
        }
    }
    return qrels;
}

void write_qrels(const Qrels& qrels, const std::filesystem::path& path) {
    auto out = open_output(path);
    write_qrels(qrels, out);
    if (!out) throw InputError("failed writing " + path.string());
}

void write_qrels(const Qrels& qrels, std::ostream& out) {
    for (const auto& [qid, judged] : qrels.data()) {
        for (const auto& [pid, grade] : judged) out << qid << " 0 " << pid << ' ' << grade << '\n';
    }
}

void write_corpus_tsv(const PassageCollection& collection, std::ostream& out) {
    for (const auto& p : collection) {
        std::string text = p.text;
        std::replace_if(text.begin(), text.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
        out << p.id << '\t' << text << '\n';
    }
}

void write_topics_jsonl(const TopicSet& topics, std::ostream& out) {
    for (const auto& q : topics.queries) {
        json row = {{"topic_id", q.topic_id}, {"turn", q.turn}, {"utterance", q.utterance}};
        if (const auto* src = topics.find_source(q.query_id)) {
            row["rewrite"] = src->rewritten_query;
            row["answer"] = src->answer;
        }
        out << row.dump() << '\n';
    }
}

}  // namespace viewrank
