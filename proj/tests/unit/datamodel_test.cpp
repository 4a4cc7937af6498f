#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace viewrank;

TEST(PassageCollection, LookupReturnsIngestedText) {
    auto c = fixtures::make_collection({{"p1", "alpha"}, {"p2", "beta"}});
    EXPECT_EQ(c.size(), 2u);
    EXPECT_EQ(c.at("p1").text, "alpha");
    EXPECT_EQ(c.at("p2").text, "beta");
    EXPECT_EQ(c.find("p3"), nullptr);
    EXPECT_THROW(c.at("p3"), InputError);
}

TEST(PassageCollection, RejectsDuplicateAndInvalidIds) {
    PassageCollection c;
    c.add({"p1", "a"});
    EXPECT_THROW(c.add({"p1", "b"}), InputError);
    EXPECT_THROW(c.add({"", "b"}), InputError);
    EXPECT_THROW(c.add({"has space", "b"}), InputError);
    EXPECT_EQ(c.size(), 1u);
}

TEST(RankedList, FromScoresBreaksTiesByAscendingId) {
    auto list = RankedList::from_scores("q", {{"c", 1.0}, {"b", 2.0}, {"a", 1.0}});
    ASSERT_EQ(list.size(), 3u);
    EXPECT_EQ(list.ids(), (std::vector<std::string>{"b", "a", "c"}));
    EXPECT_EQ(list[0].rank, 1u);
    EXPECT_EQ(list[2].rank, 3u);
}

TEST(RankedList, FromOrderAssignsPositionalScores) {
    auto list = RankedList::from_order("q", {"x", "y", "z"});
    EXPECT_DOUBLE_EQ(list[0].score, 3.0);
    EXPECT_DOUBLE_EQ(list[2].score, 1.0);
}

TEST(RankedList, ValidationRejectsGapsDuplicatesAndRisingScores) {
    EXPECT_THROW(RankedList::from_entries("q", {{"a", 1, 2.0}, {"b", 3, 1.0}}), InputError);
    EXPECT_THROW(RankedList::from_entries("q", {{"a", 1, 2.0}, {"a", 2, 1.0}}), InputError);
    EXPECT_THROW(RankedList::from_entries("q", {{"a", 1, 1.0}, {"b", 2, 2.0}}), InputError);
    EXPECT_THROW(RankedList::from_entries("q", {{"b", 1, 1.0}, {"a", 2, 1.0}}), InputError);
    EXPECT_NO_THROW(RankedList::from_entries("q", {{"b", 1, 1.0}, {"a", 2, 1.0}}, false));
}

TEST(RankedList, ValidationRejectsRandomCorruptions) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        auto list = fixtures::random_list(rng, "q", 2 + rng() % 30, 60);
        auto entries = list.entries();
        const auto i = rng() % entries.size();
        auto j = rng() % entries.size();
        if (j == i) j = (i + 1) % entries.size();
        if (trial % 2 == 0) {
            entries[j].passage_id = entries[i].passage_id;  // duplicate id
        } else {
            entries.erase(entries.begin() + static_cast<std::ptrdiff_t>(std::min(i, entries.size() - 2)));
            // erasing anything but the last entry leaves a rank gap
        }
        EXPECT_THROW(RankedList::from_entries("q", entries), InputError) << "trial " << trial;
    }
}

TEST(RankedList, TruncatedKeepsPrefix) {
    auto list = RankedList::from_order("q", {"a", "b", "c"});
    EXPECT_EQ(list.truncated(2).ids(), (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(list.truncated(10).size(), 3u);
}

TEST(Qrels, GradesDefaultToZeroAndRangeIsChecked) {
    Qrels q;
    EXPECT_FALSE(q.set("31_1", "p7", 3));
    EXPECT_EQ(q.grade("31_1", "p7"), 3);
    EXPECT_EQ(q.grade("31_1", "p8"), 0);
    EXPECT_EQ(q.grade("x", "p7"), 0);
    EXPECT_TRUE(q.set("31_1", "p7", 1));
    EXPECT_EQ(q.grade("31_1", "p7"), 1);
    EXPECT_THROW(q.set("31_1", "p9", 5), InputError);
    EXPECT_THROW(q.set("31_1", "p9", -1), InputError);
    EXPECT_EQ(q.size(), 1u);
}

TEST(ConversationalQuery, StandaloneHasNoHistory) {
    auto q = ConversationalQuery::standalone("7_3", "imaginarium film cast");
    EXPECT_EQ(q.turn, 1);
    EXPECT_TRUE(q.history.empty());
    EXPECT_EQ(q.query_id, "7_3");
    EXPECT_EQ(make_query_id("31", 4), "31_4");
}
