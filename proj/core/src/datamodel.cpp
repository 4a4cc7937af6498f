#include "viewrank/datamodel.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "viewrank/errors.hpp"

namespace viewrank {

bool is_valid_passage_id(std::string_view id) noexcept {
    if (id.empty()) return false;
    return std::none_of(id.begin(), id.end(),
                        [](unsigned char c) { return std::isspace(c) != 0; });
}

void PassageCollection::add(Passage passage) {
    if (!is_valid_passage_id(passage.id)) {
        throw InputError("invalid passage id '" + passage.id + "'");
    }
    if (by_id_.contains(passage.id)) {
        throw InputError("duplicate passage id '" + passage.id + "'");
    }
    by_id_.emplace(passage.id, passages_.size());
    passages_.push_back(std::move(passage));
}

const Passage* PassageCollection::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &passages_[it->second];
}

const Passage& PassageCollection::at(std::string_view id) const {
    if (const auto* p = find(id)) return *p;
    throw InputError("unknown passage id '" + std::string(id) + "'");
}

ConversationalQuery ConversationalQuery::standalone(std::string query_id, std::string text) {
    ConversationalQuery q;
    q.topic_id = query_id;
    q.turn = 1;
    q.utterance = std::move(text);
    q.query_id = std::move(query_id);
    return q;
}

std::string make_query_id(std::string_view topic_id, int turn) {
    return std::string(topic_id) + "_" + std::to_string(turn);
}

namespace {

bool ranks_before(const RankedEntry& a, const RankedEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.passage_id < b.passage_id;
}

}  // namespace

RankedList RankedList::from_scores(std::string query_id,
                                   std::vector<std::pair<std::string, double>> scored) {
    RankedList list(std::move(query_id));
    list.entries_.reserve(scored.size());
    for (auto& [id, score] : scored) list.entries_.push_back({std::move(id), 0, score});
    std::sort(list.entries_.begin(), list.entries_.end(), ranks_before);
    for (std::size_t i = 0; i < list.entries_.size(); ++i) list.entries_[i].rank = i + 1;
    list.validate();
    return list;
}

RankedList RankedList::from_order(std::string query_id, const std::vector<std::string>& ids) {
    RankedList list(std::move(query_id));
    const auto n = ids.size();
    list.entries_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        list.entries_.push_back({ids[i], i + 1, static_cast<double>(n - i)});
    }
    list.validate();
    return list;
}

RankedList RankedList::from_entries(std::string query_id, std::vector<RankedEntry> entries,
                                    bool strict_ties) {
    RankedList list(std::move(query_id));
    list.entries_ = std::move(entries);
    list.validate(strict_ties);
    return list;
}

std::vector<std::string> RankedList::ids() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.passage_id);
    return out;
}

RankedList RankedList::truncated(std::size_t n) const {
    RankedList list(query_id_);
    list.entries_.assign(entries_.begin(),
                         entries_.begin() + static_cast<std::ptrdiff_t>(std::min(n, entries_.size())));
    return list;
}

void RankedList::validate(bool strict_ties) const {
    std::unordered_set<std::string_view> seen;
    seen.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.rank != i + 1) {
            throw InputError("query " + query_id_ + ": expected rank " + std::to_string(i + 1) +
                             " but found " + std::to_string(e.rank) + " (ranks must be contiguous)");
        }
        if (!is_valid_passage_id(e.passage_id)) {
            throw InputError("query " + query_id_ + ": invalid passage id at rank " +
                             std::to_string(e.rank));
        }
        if (!seen.insert(e.passage_id).second) {
            throw InputError("query " + query_id_ + ": duplicate passage id " + e.passage_id);
        }
        if (i == 0) continue;
        const auto& prev = entries_[i - 1];
        if (e.score > prev.score) {
            throw InputError("query " + query_id_ + ": score increases at rank " +
                             std::to_string(e.rank));
        }
        if (strict_ties && e.score == prev.score && e.passage_id < prev.passage_id) {
            throw InputError("query " + query_id_ + ": tied scores not ordered by passage id at rank " +
                             std::to_string(e.rank));
        }
    }
}

bool Qrels::set(const std::string& query_id, const std::string& passage_id, int grade) {
    if (grade < 0 || grade > 4) {
        throw InputError("relevance grade " + std::to_string(grade) + " for (" + query_id + ", " +
                         passage_id + ") outside 0..4");
    }
    auto& judged = by_query_[query_id];
    auto [it, inserted] = judged.insert_or_assign(passage_id, grade);
    return !inserted;
}

int Qrels::grade(std::string_view query_id, std::string_view passage_id) const {
    const auto* judged = judgments(query_id);
    if (!judged) return 0;
    auto it = judged->find(passage_id);
    return it == judged->end() ? 0 : it->second;
}

const std::map<std::string, int, std::less<>>* Qrels::judgments(std::string_view query_id) const {
    auto it = by_query_.find(query_id);
    return it == by_query_.end() ? nullptr : &it->second;
}

bool Qrels::has_query(std::string_view query_id) const { return by_query_.find(query_id) != by_query_.end(); }

std::vector<std::string> Qrels::query_ids() const {
    std::vector<std::string> out;
    out.reserve(by_query_.size());
    for (const auto& [qid, _] : by_query_) out.push_back(qid);
    return out;
}

std::size_t Qrels::size() const noexcept {
    std::size_t n = 0;
    for (const auto& [_, judged] : by_query_) n += judged.size();
    return n;
}

}  // namespace viewrank
