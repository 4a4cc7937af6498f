#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "test_support.hpp"

using namespace viewrank;

namespace {

using Terms = std::vector<std::string>;

}  // namespace

TEST(Analyzer, LowercasesAlphanumericRuns) {
    Analyzer a;
    EXPECT_EQ(a.tokenize("Imaginarium, the album!"), (Terms{"imaginarium", "the", "album"}));
    EXPECT_EQ(a.tokenize("2012 film... Q&A"), (Terms{"2012", "film", "q", "a"}));
    EXPECT_TRUE(a.tokenize("").empty());
    EXPECT_TRUE(a.tokenize(" ,;! ").empty());
}

TEST(Analyzer, KeepsUtf8WordsWhole) {
    Analyzer a;
    EXPECT_EQ(a.tokenize("Caf\xc3\xa9 Ol\xc3\xa9"), (Terms{"caf\xc3\xa9", "ol\xc3\xa9"}));
}

TEST(Analyzer, RemovesConfiguredStopwords) {
    Analyzer a;
    a.stopwords = {"the"};
    EXPECT_EQ(a.tokenize("The album"), (Terms{"album"}));
}

TEST(Analyzer, TokenizingJoinedTokensIsIdempotent) {
    std::mt19937_64 rng(1);
    const std::string alphabet = "abcXYZ019 ,.!?-_\t\n'\"\xc3\xa9";
    Analyzer a;
    for (int trial = 0; trial < 500; ++trial) {
        std::string text;
        const auto len = rng() % 60;
        for (std::size_t i = 0; i < len; ++i) text += alphabet[rng() % alphabet.size()];
        const auto once = a.tokenize(text);
        std::string joined;
        for (const auto& t : once) joined += t + " ";
        EXPECT_EQ(a.tokenize(joined), once) << text;
    }
}

TEST(InvertedIndex, PostingsAndAverageLength) {
    auto c = fixtures::make_collection({{"d1", "a b"}, {"d2", "a"}});
    auto idx = InvertedIndex::build(c);
    const auto* postings = idx.postings("a");
    ASSERT_NE(postings, nullptr);
    ASSERT_EQ(postings->size(), 2u);
    EXPECT_EQ(idx.doc_id((*postings)[0].doc), "d1");
    EXPECT_EQ((*postings)[0].tf, 1u);
    EXPECT_EQ(idx.doc_id((*postings)[1].doc), "d2");
    EXPECT_EQ((*postings)[1].tf, 1u);
    EXPECT_DOUBLE_EQ(idx.avg_doc_length(), 1.5);
    EXPECT_EQ(idx.doc_count(), 2u);
}

TEST(InvertedIndex, SingleDocumentAverageIsItsLength) {
    auto idx = InvertedIndex::build(fixtures::make_collection({{"only", "one two three four"}}));
    EXPECT_DOUBLE_EQ(idx.avg_doc_length(), 4.0);
}

TEST(InvertedIndex, EmptyCollectionIsRejected) {
    EXPECT_THROW(InvertedIndex::build(PassageCollection{}), InputError);
}

TEST(InvertedIndex, TermFrequenciesSumToDocumentLength) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 30; ++trial) {
        auto c = fixtures::random_collection(rng, 1 + rng() % 60, 1 + rng() % 25, 15);
        auto idx = InvertedIndex::build(c);
        std::map<std::string, std::size_t> sums;
        idx.for_each_term([&](const std::string&, const std::vector<Posting>& list) {
            for (std::size_t i = 0; i < list.size(); ++i) {
                if (i) EXPECT_LT(idx.doc_id(list[i - 1].doc), idx.doc_id(list[i].doc));
                sums[idx.doc_id(list[i].doc)] += list[i].tf;
            }
        });
        double total = 0.0;
        for (const auto& p : c) {
            const auto len = Analyzer{}.tokenize(p.text).size();
            EXPECT_EQ(sums[p.id], len);
            EXPECT_EQ(idx.doc_length(p.id), len);
            total += static_cast<double>(len);
        }
        EXPECT_EQ(idx.doc_count(), c.size());
        EXPECT_NEAR(idx.avg_doc_length(), total / static_cast<double>(c.size()), 1e-12);
    }
}

TEST(Bm25, TwoDocumentHandExample) {
    auto idx = InvertedIndex::build(fixtures::make_collection({{"d1", "cat"}, {"d2", "dog"}}));
    EXPECT_NEAR(idx.bm25_score(Terms{"cat"}, "d1"), 0.693147, 1e-6);
    EXPECT_NEAR(idx.idf("cat"), std::log(2.0), 1e-12);
    EXPECT_EQ(idx.bm25_score(Terms{"cat"}, "d2"), 0.0);
    EXPECT_EQ(idx.bm25_score(Terms{"bird"}, "d1"), 0.0);
    EXPECT_THROW(idx.bm25_score(Terms{"cat"}, "d3"), InputError);
}

TEST(Bm25, MatchesOracleAndIsZeroOnlyWithoutMatches) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        auto c = fixtures::random_collection(rng, 1 + rng() % 30, 2 + rng() % 20, 12);
        Bm25Params params{0.5 + (rng() % 100) / 50.0, (rng() % 101) / 100.0};
        auto idx = InvertedIndex::build(c, {}, params);
        Terms query;
        for (std::size_t i = 0, n = 1 + rng() % 4; i < n; ++i) query.push_back("w" + std::to_string(rng() % 25));
        for (const auto& p : c) {
            const double got = idx.bm25_score(query, p.id);
            EXPECT_NEAR(got, oracle::bm25(c, {}, params, query, p.id), 1e-9);
            const auto toks = Analyzer{}.tokenize(p.text);
            bool any = false;
            for (const auto& t : query) any = any || std::find(toks.begin(), toks.end(), t) != toks.end();
            EXPECT_EQ(got > 0.0, any);
            EXPECT_GE(got, 0.0);
        }
    }
}

TEST(Bm25, DoublingTermFrequencyNeverLowersScore) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        // The target doc grows from "t x..." to "t t x..."; other docs and the
        // remaining target tokens stay fixed apart from the extra copy.
        const auto filler = 1 + rng() % 8;
        std::string base = "t";
        for (std::size_t i = 0; i < filler; ++i) base += " f" + std::to_string(rng() % 5);
        std::string doubled = "t " + base;
        std::vector<std::string> others;
        for (std::size_t i = 0, n = rng() % 6; i < n; ++i) {
            others.push_back(rng() % 2 ? "t f1" : "f2 f3 f4");
        }
        auto build = [&](const std::string& target) {
            PassageCollection c;
            c.add({"target", target});
            for (std::size_t i = 0; i < others.size(); ++i) c.add({"o" + std::to_string(i), others[i]});
            return InvertedIndex::build(c);
        };
        const auto low = build(base).bm25_score(Terms{"t"}, "target");
        const auto high = build(doubled).bm25_score(Terms{"t"}, "target");
        EXPECT_GE(high, low) << base;
    }
}

TEST(Search, SingleMatchAndTieOrder) {
    auto c = fixtures::make_collection({{"b", "apple pie"}, {"a", "apple pie"}, {"c", "banana split"}});
    auto idx = InvertedIndex::build(c);
    auto banana = idx.search("q", "banana", 10);
    ASSERT_EQ(banana.size(), 1u);
    EXPECT_EQ(banana[0].passage_id, "c");
    EXPECT_EQ(banana[0].rank, 1u);
    EXPECT_EQ(idx.search("q", "apple", 10).ids(), (Terms{"a", "b"}));
    EXPECT_EQ(idx.search("q", "apple", 1).ids(), (Terms{"a"}));
}

TEST(Search, EmptyQueryWarnsAndZeroDepthThrows) {
    auto idx = InvertedIndex::build(fixtures::make_collection({{"a", "x"}}));
    fixtures::WarningCapture warnings;
    EXPECT_TRUE(idx.search("q", "?!", 5).empty());
    EXPECT_EQ(warnings.messages().size(), 1u);
    EXPECT_THROW(idx.search("q", "x", 0), InputError);
}

TEST(Search, EqualsExhaustiveScoring) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        auto c = fixtures::random_collection(rng, 1 + rng() % 80, 2 + rng() % 30, 10);
        auto idx = InvertedIndex::build(c);
        std::string query;
        for (std::size_t i = 0, n = 1 + rng() % 3; i < n; ++i) query += "w" + std::to_string(rng() % 30) + " ";
        const std::size_t n = 1 + rng() % 15;
        auto got = idx.search("q", query, n);
        auto expected = oracle::exhaustive_search(c, {}, {}, query, n);
        ASSERT_EQ(got.size(), expected.size()) << query;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            EXPECT_EQ(got[i].passage_id, expected[i].id);
            EXPECT_NEAR(got[i].score, expected[i].score, 1e-9);
        }
    }
}

TEST(InvertedIndex, SaveLoadRoundTrip) {
    std::mt19937_64 rng(6);
    auto c = fixtures::random_collection(rng, 50, 40, 20);
    auto idx = InvertedIndex::build(c, {}, {1.2, 0.75});
    fixtures::TempDir dir;
    idx.save(dir / "index.bin");
    auto back = InvertedIndex::load(dir / "index.bin");
    EXPECT_EQ(back.doc_count(), idx.doc_count());
    EXPECT_EQ(back.term_count(), idx.term_count());
    EXPECT_DOUBLE_EQ(back.params().k1, 1.2);
    EXPECT_DOUBLE_EQ(back.mean_term_score(), idx.mean_term_score());
    for (int q = 0; q < 20; ++q) {
        const auto text = "w" + std::to_string(rng() % 40) + " w" + std::to_string(rng() % 40);
        EXPECT_EQ(back.search("q", text, 10), idx.search("q", text, 10));
    }
}

TEST(InvertedIndex, LoadRejectsForeignFiles) {
    fixtures::TempDir dir;
    fixtures::write_file(dir / "bogus.bin", "NOPE not an index");
    EXPECT_THROW(InvertedIndex::load(dir / "bogus.bin"), InputError);
    EXPECT_THROW(InvertedIndex::load(dir / "missing.bin"), InputError);
}
