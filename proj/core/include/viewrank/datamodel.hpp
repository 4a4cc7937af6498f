#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace viewrank {

struct Passage {
    std::string id;
    std::string text;
};

/// True when `id` is non-empty and contains no whitespace.
bool is_valid_passage_id(std::string_view id) noexcept;

/// Id-addressable passage set. Iteration follows insertion order.
class PassageCollection {
public:
    /// Throws InputError on an invalid or duplicate id.
    void add(Passage passage);

    const Passage* find(std::string_view id) const;
    /// Throws InputError when the id is unknown.
    const Passage& at(std::string_view id) const;
    bool contains(std::string_view id) const { return find(id) != nullptr; }

    std::size_t size() const noexcept { return passages_.size(); }
    bool empty() const noexcept { return passages_.empty(); }

    auto begin() const { return passages_.begin(); }
    auto end() const { return passages_.end(); }

private:
    std::vector<Passage> passages_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// The i-th turn of a conversation together with every earlier utterance.
struct ConversationalQuery {
    std::string topic_id;
    int turn = 1;
    std::string utterance;
    std::vector<std::string> history;  // u_1 .. u_{turn-1}
    std::string query_id;              // "<topic>_<turn>"

    /// A one-turn query with no history, used when scoring a self-contained rewrite.
    static ConversationalQuery standalone(std::string query_id, std::string text);
};

std::string make_query_id(std::string_view topic_id, int turn);

/// Rewritten query and reference answer used to build labeling views.
struct LabelingSource {
    std::string query_id;
    std::string rewritten_query;
    std::string answer;  // may be empty (unanswerable turn)
};

struct RankedEntry {
    std::string passage_id;
    std::size_t rank = 0;  // 1-based
    double score = 0.0;

    friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

/// Ordered retrieval result for one query.
///
/// Invariants: ranks are exactly 1..size(), scores are non-increasing in rank,
/// ties are ordered by ascending passage id, and ids are unique.
class RankedList {
public:
    RankedList() = default;
    explicit RankedList(std::string query_id) : query_id_(std::move(query_id)) {}

    /// Builds a list from unordered (id, score) pairs: sorted by score
    /// descending then id ascending, ranks assigned 1..n.
    static RankedList from_scores(std::string query_id,
                                  std::vector<std::pair<std::string, double>> scored);

    /// Builds a list whose order is given; scores become positional
    /// (size - rank + 1).
    static RankedList from_order(std::string query_id, const std::vector<std::string>& ids);

    /// Adopts `entries` verbatim and validates them. Throws InputError.
    static RankedList from_entries(std::string query_id, std::vector<RankedEntry> entries,
                                   bool strict_ties = true);

    const std::string& query_id() const noexcept { return query_id_; }
    const std::vector<RankedEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const RankedEntry& operator[](std::size_t i) const { return entries_[i]; }

    std::vector<std::string> ids() const;

    /// First `n` entries (ranks unchanged).
    RankedList truncated(std::size_t n) const;

    /// Throws InputError describing the first violated invariant.
    /// With `strict_ties` false, equal scores may appear in any id order.
    void validate(bool strict_ties = true) const;

    friend bool operator==(const RankedList&, const RankedList&) = default;

private:
    std::string query_id_;
    std::vector<RankedEntry> entries_;
};

/// Run files keyed by query id, in lexicographic order.
using RunMap = std::map<std::string, RankedList>;

/// Graded judgments (0..4) keyed by query then passage.
class Qrels {
public:
    /// Throws InputError when grade is outside 0..4. Returns true when an
    /// existing judgment was overwritten.
    bool set(const std::string& query_id, const std::string& passage_id, int grade);

    /// Missing judgments read as grade 0.
    int grade(std::string_view query_id, std::string_view passage_id) const;

    const std::map<std::string, int, std::less<>>* judgments(std::string_view query_id) const;
    bool has_query(std::string_view query_id) const;

    std::vector<std::string> query_ids() const;
    std::size_t size() const noexcept;
    bool empty() const noexcept { return by_query_.empty(); }

    const auto& data() const noexcept { return by_query_; }

private:
    std::map<std::string, std::map<std::string, int, std::less<>>, std::less<>> by_query_;
};

}  // namespace viewrank
