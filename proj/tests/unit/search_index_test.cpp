#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "llmwiki/search_index.hpp"
#include "oracles.hpp"
#include "random_wiki.hpp"

namespace llmwiki {
namespace {

TEST(SearchIndex, EmptySnapshot) {
    auto idx = SearchIndex::build(WikiSnapshot{});
    EXPECT_EQ(idx.size(), 0u);
    EXPECT_TRUE(idx.search("anything", 5).empty());
}

TEST(SearchIndex, CoversEveryPageName) {
    auto s = testing::load_fixture("films");
    auto idx = SearchIndex::build(s);
    EXPECT_EQ(idx.size(), 12u);  // 6 pages + 6 digests
    for (const auto& [path, page] : s.pages()) {
        auto hits = idx.search(page.title, 20);
        ASSERT_FALSE(hits.empty());
        auto named = std::find_if(hits.begin(), hits.end(), [&](const SearchHit& h) { return h.path == path; });
        ASSERT_NE(named, hits.end()) << path.str();
        EXPECT_NE(std::find(named->matched_fields.begin(), named->matched_fields.end(), SearchField::name),
                  named->matched_fields.end());
    }
}

TEST(SearchIndex, Case2QueryFindsJohnVFirst) {
    auto idx = SearchIndex::build(testing::load_fixture("anhalt"));
    auto hits = idx.search("John V, Prince of Anhalt-Zerbst", 10);
    ASSERT_FALSE(hits.empty());
    EXPECT_EQ(hits[0].path.str(), "people/John-V-Prince-of-Anhalt-Zerbst");
    EXPECT_EQ(hits[0].title, "John V, Prince of Anhalt-Zerbst");
    EXPECT_EQ(hits[0].aliases.size(), 3u);
}

TEST(SearchIndex, AliasOutranksContentOnlyMatch) {
    auto idx = SearchIndex::build(testing::load_fixture("anhalt"));
    auto hits = idx.search("Johann V von Anhalt-Zerbst", 10);
    ASSERT_GE(hits.size(), 2u);
    EXPECT_EQ(hits[0].path.str(), "people/John-V-Prince-of-Anhalt-Zerbst");
}

TEST(SearchIndex, EmptyQueryAndLimits) {
    auto idx = SearchIndex::build(testing::load_fixture("anhalt"));
    EXPECT_TRUE(idx.search("", 5).empty());
    EXPECT_TRUE(idx.search("!!! ???", 5).empty());
    EXPECT_TRUE(idx.search("xylophonequux", 5).empty());
    EXPECT_LE(idx.search("prince", 1).size(), 1u);
    EXPECT_THROW(idx.search("prince", 0), std::invalid_argument);
}

TEST(SearchIndex, OrderIsTotal) {
    auto idx = SearchIndex::build(testing::load_fixture("anhalt"));
    auto hits = idx.search("prince anhalt house", 50);
    for (std::size_t i = 1; i < hits.size(); ++i) {
        EXPECT_TRUE(hits[i - 1].score > hits[i].score ||
                    (hits[i - 1].score == hits[i].score && hits[i - 1].path < hits[i].path));
    }
}

TEST(SearchIndex, MatchesBruteForceOracle) {
    testing::Rng rng(1234);
    const std::vector<std::string> queries = {"Ada river", "castle", "Group", "src 3", "born in the city",
                                              "Clara Bruno 7", "museum treaty harbor", "people", "Zoe"};
    for (int round = 0; round < 30; ++round) {
        auto s = testing::random_valid_wiki(rng, 5 + round);
        auto idx = SearchIndex::build(s);
        for (const auto& q : queries) {
            for (std::size_t limit : {1u, 3u, 100u}) {
                auto got = idx.search(q, limit);
                auto want = testing::oracle_search(s, q, limit);
                ASSERT_EQ(got.size(), want.size()) << q;
                for (std::size_t i = 0; i < got.size(); ++i) {
                    EXPECT_EQ(got[i].path.str(), want[i].path) << q;
                    EXPECT_EQ(got[i].score, want[i].score) << q;
                }
            }
        }
    }
}

TEST(SearchIndex, AddingAPageNeverLowersOtherScores) {
    testing::Rng rng(5);
    for (int round = 0; round < 20; ++round) {
        auto s = testing::random_valid_wiki(rng, 10);
        UpdateSet u;
        u.page_writes.push_back(testing::random_page(rng, SlugPath("people", "Added-" + std::to_string(round))));
        auto t = apply_updates(s, u);
        auto a = SearchIndex::build(s);
        auto b = SearchIndex::build(t);
        for (const char* q : {"river", "Ada castle", "Zürich born"}) {
            auto before = a.search(q, 1000);
            auto after = b.search(q, 1000);
            for (const auto& h : before) {
                auto it = std::find_if(after.begin(), after.end(), [&](const SearchHit& x) { return x.path == h.path; });
                ASSERT_NE(it, after.end());
                EXPECT_GE(it->score, h.score);
            }
        }
    }
}

}  // namespace
}  // namespace llmwiki
