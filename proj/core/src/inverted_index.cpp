#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "viewrank/diagnostics.hpp"
#include "viewrank/errors.hpp"
#include "viewrank/retrieval.hpp"

namespace viewrank {
namespace {

constexpr char kMagic[4] = {'C', 'F', 'G', '1'};
constexpr std::uint32_t kFormatVersion = 1;

class BinaryWriter {
public:
    explicit BinaryWriter(std::ostream& out) : out_(out) {}

    void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }

private:
    std::ostream& out_;
};

class BinaryReader {
public:
    BinaryReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    std::uint8_t u8() {
        char c;
        if (!in_.get(c)) fail();
        return static_cast<std::uint8_t>(c);
    }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const auto n = u32();
        std::string s(n, '\0');
        if (n > 0 && !in_.read(s.data(), n)) fail();
        return s;
    }

    [[noreturn]] void fail() const { throw InputError(source_ + ": truncated or corrupt index file"); }

private:
    std::istream& in_;
    std::string source_;
};

}  // namespace

InvertedIndex InvertedIndex::build(const PassageCollection& collection, Analyzer analyzer,
                                   Bm25Params params) {
    if (collection.empty()) throw InputError("cannot build an index over an empty collection");

    InvertedIndex index;
    index.analyzer_ = std::move(analyzer);
    index.params_ = params;

    std::vector<const Passage*> ordered;
    ordered.reserve(collection.size());
    for (const auto& p : collection) ordered.push_back(&p);
    std::sort(ordered.begin(), ordered.end(),
              [](const Passage* a, const Passage* b) { return a->id < b->id; });

    index.doc_ids_.reserve(ordered.size());
    index.doc_lengths_.reserve(ordered.size());
    std::unordered_map<std::string, std::uint32_t> tf;
    for (std::uint32_t doc = 0; doc < ordered.size(); ++doc) {
        const auto tokens = index.analyzer_.tokenize(ordered[doc]->text);
        tf.clear();
        for (const auto& t : tokens) ++tf[t];
        for (auto& [term, count] : tf) index.postings_[term].push_back({doc, count});
        index.doc_ids_.push_back(ordered[doc]->id);
        index.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));
    }
    index.finalize();
    return index;
}

void InvertedIndex::finalize() {
    doc_numbers_.clear();
    doc_numbers_.reserve(doc_ids_.size());
    for (std::uint32_t doc = 0; doc < doc_ids_.size(); ++doc) doc_numbers_.emplace(doc_ids_[doc], doc);

    const double total = std::accumulate(doc_lengths_.begin(), doc_lengths_.end(), 0.0);
    avg_doc_length_ = doc_ids_.empty() ? 0.0 : total / static_cast<double>(doc_ids_.size());

    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& [term, list] : postings_) {
        const double w_idf = idf(term);
        for (const auto& p : list) {
            sum += term_weight(p.tf, doc_lengths_[p.doc], w_idf);
            ++count;
        }
    }
    mean_term_score_ = count == 0 ? 0.0 : sum / static_cast<double>(count);
}

double InvertedIndex::term_weight(std::uint32_t tf, std::uint32_t doc_len, double w_idf) const noexcept {
    const double f = tf;
    const double norm = avg_doc_length_ > 0.0 ? static_cast<double>(doc_len) / avg_doc_length_ : 0.0;
    return w_idf * f * (params_.k1 + 1.0) / (f + params_.k1 * (1.0 - params_.b + params_.b * norm));
}

std::size_t InvertedIndex::document_frequency(std::string_view term) const {
    const auto* list = postings(term);
    return list ? list->size() : 0;
}

double InvertedIndex::idf(std::string_view term) const {
    const double df = static_cast<double>(document_frequency(term));
    const double n = static_cast<double>(doc_ids_.size());
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

const std::vector<Posting>* InvertedIndex::postings(std::string_view term) const {
    auto it = postings_.find(std::string(term));
    return it == postings_.end() ? nullptr : &it->second;
}

bool InvertedIndex::contains(std::string_view passage_id) const {
    return doc_numbers_.contains(std::string(passage_id));
}

std::uint32_t InvertedIndex::doc_number(std::string_view passage_id) const {
    auto it = doc_numbers_.find(std::string(passage_id));
    if (it == doc_numbers_.end()) {
        throw InputError("passage '" + std::string(passage_id) + "' is not in the index");
    }
    return it->second;
}

std::size_t InvertedIndex::doc_length(std::string_view passage_id) const {
    return doc_lengths_[doc_number(passage_id)];
}

double InvertedIndex::bm25_score(std::span<const std::string> query_terms,
                                 std::string_view passage_id) const {
    const auto doc = doc_number(passage_id);
    double score = 0.0;
    for (const auto& term : query_terms) {
        const auto* list = postings(term);
        if (!list) continue;
        auto it = std::lower_bound(list->begin(), list->end(), doc,
                                   [](const Posting& p, std::uint32_t d) { return p.doc < d; });
        if (it == list->end() || it->doc != doc) continue;
        score += term_weight(it->tf, doc_lengths_[doc], idf(term));
    }
    return score;
}

RankedList InvertedIndex::search(std::string query_id, std::string_view query_text, std::size_t n) const {
    const auto terms = analyzer_.tokenize(query_text);
    return search_terms(std::move(query_id), terms, n);
}

RankedList InvertedIndex::search_terms(std::string query_id, std::span<const std::string> terms,
                                       std::size_t n) const {
    if (n == 0) throw InputError("search depth must be at least 1");
    if (terms.empty()) {
        warn("query " + query_id + " has no indexable terms; returning an empty list");
        return RankedList(std::move(query_id));
    }

    std::vector<double> acc(doc_ids_.size(), 0.0);
    std::vector<std::uint32_t> touched;
    std::vector<bool> seen(doc_ids_.size(), false);
    for (const auto& term : terms) {
        const auto* list = postings(term);
        if (!list) continue;
        const double w_idf = idf(term);
        for (const auto& p : *list) {
            acc[p.doc] += term_weight(p.tf, doc_lengths_[p.doc], w_idf);
            if (!seen[p.doc]) {
                seen[p.doc] = true;
                touched.push_back(p.doc);
            }
        }
    }

    // Doc numbers follow ascending passage id.
    auto better = [&](std::uint32_t a, std::uint32_t b) {
        if (acc[a] != acc[b]) return acc[a] > acc[b];
        return a < b;
    };
    const auto keep = std::min(n, touched.size());
    std::partial_sort(touched.begin(), touched.begin() + static_cast<std::ptrdiff_t>(keep), touched.end(),
                      better);

    std::vector<RankedEntry> entries;
    entries.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        entries.push_back({doc_ids_[touched[i]], i + 1, acc[touched[i]]});
    }
    return RankedList::from_entries(std::move(query_id), std::move(entries));
}

void InvertedIndex::save(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    BinaryWriter w(out);
    out.write(kMagic, sizeof kMagic);
    w.u32(kFormatVersion);
    w.f64(params_.k1);
    w.f64(params_.b);
    w.u8(analyzer_.lowercase ? 1 : 0);

    std::vector<std::string> stopwords(analyzer_.stopwords.begin(), analyzer_.stopwords.end());
    std::sort(stopwords.begin(), stopwords.end());
    w.u32(static_cast<std::uint32_t>(stopwords.size()));
    for (const auto& s : stopwords) w.str(s);

    w.u32(static_cast<std::uint32_t>(doc_ids_.size()));
    for (std::size_t d = 0; d < doc_ids_.size(); ++d) {
        w.str(doc_ids_[d]);
        w.u32(doc_lengths_[d]);
    }

    std::vector<const std::string*> terms;
    terms.reserve(postings_.size());
    for (const auto& [term, _] : postings_) terms.push_back(&term);
    std::sort(terms.begin(), terms.end(), [](const auto* a, const auto* b) { return *a < *b; });
    w.u64(terms.size());
    for (const auto* term : terms) {
        const auto& list = postings_.at(*term);
        w.str(*term);
        w.u32(static_cast<std::uint32_t>(list.size()));
        for (const auto& p : list) {
            w.u32(p.doc);
            w.u32(p.tf);
        }
    }
    if (!out) throw InputError("failed writing " + path.string());
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    char magic[4];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
        throw InputError(path.string() + ": not a viewrank index (bad magic)");
    }
    BinaryReader r(in, path.string());
    const auto version = r.u32();
    if (version != kFormatVersion) {
        throw InputError(path.string() + ": unsupported index version " + std::to_string(version));
    }

    InvertedIndex index;
    index.params_.k1 = r.f64();
    index.params_.b = r.f64();
    index.analyzer_.lowercase = r.u8() != 0;
    const auto stop_count = r.u32();
    for (std::uint32_t i = 0; i < stop_count; ++i) index.analyzer_.stopwords.insert(r.str());

    const auto docs = r.u32();
    index.doc_ids_.reserve(docs);
    index.doc_lengths_.reserve(docs);
    for (std::uint32_t d = 0; d < docs; ++d) {
        index.doc_ids_.push_back(r.str());
        index.doc_lengths_.push_back(r.u32());
    }
    if (!std::is_sorted(index.doc_ids_.begin(), index.doc_ids_.end())) r.fail();

    const auto term_count = r.u64();
    for (std::uint64_t t = 0; t < term_count; ++t) {
        auto term = r.str();
        const auto n = r.u32();
        std::vector<Posting> list;
        list.reserve(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            Posting p;
            p.doc = r.u32();
            p.tf = r.u32();
            if (p.doc >= docs || (!list.empty() && list.back().doc >= p.doc)) r.fail();
            list.push_back(p);
        }
        index.postings_.emplace(std::move(term), std::move(list));
    }
    index.finalize();
    return index;
}

}  // namespace viewrank
