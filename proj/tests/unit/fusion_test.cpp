#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "test_support.hpp"

using namespace viewrank;

namespace {

using Ids = std::vector<std::string>;

RankedList list_of(const Ids& ids, const std::string& qid = "q") { return RankedList::from_order(qid, ids); }

}  // namespace

TEST(EnsembleFilter, AgreedPassagesMoveAhead) {
    auto out = ensemble_filter(list_of({"A", "B", "C", "D"}), list_of({"E", "D", "B"}));
    EXPECT_EQ(out.list.ids(), (Ids{"B", "D", "A", "C"}));
    EXPECT_EQ(out.boundary, 2u);
    EXPECT_DOUBLE_EQ(out.list[0].score, 4.0);
    EXPECT_DOUBLE_EQ(out.list[3].score, 1.0);
}

TEST(EnsembleFilter, SupersetFilterIsIdentity) {
    auto out = ensemble_filter(list_of({"A", "B", "C"}), list_of({"C", "X", "A", "B"}));
    EXPECT_EQ(out.list.ids(), (Ids{"A", "B", "C"}));
    EXPECT_EQ(out.boundary, 3u);
}

TEST(EnsembleFilter, DisjointFilterIsIdentity) {
    auto out = ensemble_filter(list_of({"A", "B", "C"}), list_of({"X", "Y"}));
    EXPECT_EQ(out.list.ids(), (Ids{"A", "B", "C"}));
    EXPECT_EQ(out.boundary, 0u);
}

TEST(EnsembleFilter, QueryViewTopHitMissingFromAnswerViewIsDemoted) {
    // The query view ranks an album page first; the answer view only knows the film pages.
    Ids query_view{"album", "film_cast", "film_plot", "album_tracks", "film_awards"};
    Ids answer_view{"film_awards", "film_cast", "director_bio", "film_plot"};
    auto out = ensemble_filter(list_of(query_view), list_of(answer_view));
    EXPECT_EQ(out.list.ids(), (Ids{"film_cast", "film_plot", "film_awards", "album", "album_tracks"}));
    EXPECT_EQ(out.boundary, 3u);
}

TEST(EnsembleFilter, EmptyInputs) {
    EXPECT_TRUE(ensemble_filter(RankedList("q"), list_of({"A"})).list.empty());
    auto out = ensemble_filter(list_of({"A", "B"}), RankedList("q"));
    EXPECT_EQ(out.list.ids(), (Ids{"A", "B"}));
    EXPECT_EQ(out.boundary, 0u);
}

TEST(EnsembleFilter, FilterDepthLimitsMembership) {
    auto out = ensemble_filter(list_of({"A", "B", "C"}), list_of({"C", "A"}), 1);
    EXPECT_EQ(out.list.ids(), (Ids{"C", "A", "B"}));
    EXPECT_EQ(out.boundary, 1u);
}

TEST(EnsembleFilter, MismatchedQueryIdsAreRejected) {
    EXPECT_THROW(ensemble_filter(list_of({"A"}, "q1"), list_of({"A"}, "q2")), InputError);
}

TEST(EnsembleFilter, MatchesTwoPassPartitionOracle) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t universe = 1 + rng() % 120;
        auto primary = fixtures::random_list(rng, "q", rng() % 100, universe);
        auto filter = fixtures::random_list(rng, "q", rng() % 100, universe);
        std::size_t agreed = 0;
        const auto expected = oracle::two_pass_partition(primary.ids(), filter.ids(), &agreed);
        auto out = ensemble_filter(primary, filter);
        EXPECT_EQ(out.list.ids(), expected);
        EXPECT_EQ(out.boundary, agreed);

        const auto primary_ids = primary.ids();
        std::set<std::string> a(primary_ids.begin(), primary_ids.end());
        std::size_t intersection = 0;
        for (const auto& id : filter.ids()) intersection += a.count(id);
        EXPECT_EQ(out.boundary, intersection);
        EXPECT_NO_THROW(out.list.validate());
    }
}

TEST(EnsembleFilter, IdempotentInTheFilter) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        auto primary = fixtures::random_list(rng, "q", rng() % 50, 70);
        auto filter = fixtures::random_list(rng, "q", rng() % 50, 70);
        auto once = ensemble_filter(primary, filter);
        auto twice = ensemble_filter(once.list, filter);
        EXPECT_EQ(twice.list, once.list);
        EXPECT_EQ(twice.boundary, once.boundary);
    }
}

TEST(ReverseEnsembleFilter, AnswerViewPrimary) {
    auto out = reverse_ensemble_filter(list_of({"P", "Q"}), list_of({"Q"}));
    EXPECT_EQ(out.list.ids(), (Ids{"Q", "P"}));
    EXPECT_EQ(out.boundary, 1u);
    auto same = reverse_ensemble_filter(list_of({"A", "B", "C"}), list_of({"A", "B", "C"}));
    EXPECT_EQ(same.list.ids(), (Ids{"A", "B", "C"}));
    EXPECT_EQ(same.boundary, 3u);
}

TEST(ReverseEnsembleFilter, EqualsForwardFilterWithRolesSwapped) {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 200; ++trial) {
        auto x = fixtures::random_list(rng, "q", rng() % 40, 60);
        auto y = fixtures::random_list(rng, "q", rng() % 40, 60);
        auto reversed = reverse_ensemble_filter(y, x);
        auto forward = ensemble_filter(y, x);
        EXPECT_EQ(reversed.list, forward.list);
        EXPECT_EQ(reversed.boundary, forward.boundary);
    }
}

TEST(Rrf, IdenticalListsKeepOrder) {
    std::vector<RankedList> lists{list_of({"A", "B"}), list_of({"A", "B"})};
    auto out = rrf(lists);
    EXPECT_EQ(out.ids(), (Ids{"A", "B"}));
    EXPECT_NEAR(out[0].score, 2.0 / 61.0, 1e-12);
}

TEST(Rrf, HandSummedReciprocals) {
    std::vector<RankedList> lists{list_of({"A", "B"}), list_of({"B", "C"})};
    auto out = rrf(lists, 60.0);
    EXPECT_EQ(out.ids(), (Ids{"B", "A", "C"}));
    EXPECT_NEAR(out[0].score, 0.0325224749, 1e-9);
    EXPECT_NEAR(out[1].score, 0.0163934426, 1e-9);
    EXPECT_NEAR(out[2].score, 0.0161290323, 1e-9);
}

TEST(Rrf, RejectsBadArguments) {
    std::vector<RankedList> one{list_of({"A"})};
    EXPECT_THROW(rrf(one), InputError);
    std::vector<RankedList> two{list_of({"A"}), list_of({"A"})};
    EXPECT_THROW(rrf(two, 0.0), InputError);
    std::vector<RankedList> mixed{list_of({"A"}, "q1"), list_of({"A"}, "q2")};
    EXPECT_THROW(rrf(mixed), InputError);
}

TEST(Rrf, InvariantUnderListPermutation) {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<RankedList> lists;
        for (std::size_t i = 0, n = 2 + rng() % 4; i < n; ++i) lists.push_back(fixtures::random_list(rng, "q", rng() % 30, 40));
        auto expected = rrf(lists);
        std::shuffle(lists.begin(), lists.end(), rng);
        EXPECT_EQ(rrf(lists), expected);
    }
}

TEST(Rrf, ImprovingARankNeverLowersTheFusedScore) {
    std::mt19937_64 rng(16);
    auto score_of = [](const RankedList& fused, const std::string& id) {
        for (const auto& e : fused.entries()) {
            if (e.passage_id == id) return e.score;
        }
        return 0.0;
    };
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<RankedList> lists;
        for (std::size_t i = 0, n = 2 + rng() % 3; i < n; ++i) lists.push_back(fixtures::random_list(rng, "q", 2 + rng() % 20, 30));
        const auto which = rng() % lists.size();
        auto ids = lists[which].ids();
        const auto from = 1 + rng() % (ids.size() - 1);
        const auto to = rng() % from;
        const auto target = ids[from];
        const double before = score_of(rrf(lists), target);
        std::rotate(ids.begin() + static_cast<std::ptrdiff_t>(to), ids.begin() + static_cast<std::ptrdiff_t>(from),
                    ids.begin() + static_cast<std::ptrdiff_t>(from) + 1);
        lists[which] = list_of(ids);
        EXPECT_GT(score_of(rrf(lists), target), before);
    }
}
