#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "llmwiki/codec.hpp"
#include "random_wiki.hpp"

namespace llmwiki {
namespace {

TEST(IndexCodec, FixtureIndexHasThreeSections) {
    auto idx = parse_index(testing::read_file(testing::fixture_dir("anhalt") / "people/_index.md"), "people");
    ASSERT_EQ(idx.sections.size(), 3u);
    EXPECT_EQ(idx.sections[0].heading, "German Nobility");
    EXPECT_EQ(idx.page_count(), 5u);
    EXPECT_TRUE(idx.contains(SlugPath("people", "John-V-Prince-of-Anhalt-Zerbst")));
    EXPECT_TRUE(idx.parse_notes.empty());
    const auto& john = idx.sections[0].entries[1];
    EXPECT_EQ(john.link.str(), "people/John-V-Prince-of-Anhalt-Zerbst");
    EXPECT_FALSE(john.aliases.empty());
    EXPECT_FALSE(john.tags.empty());
}

TEST(IndexCodec, EmptyBody) {
    auto idx = parse_index("", "people");
    EXPECT_TRUE(idx.sections.empty());
    EXPECT_EQ(idx.page_count(), 0u);
}

TEST(IndexCodec, DuplicateLinkCountsOnce) {
    auto idx = parse_index("## A\n- [[X]]\n## B\n- [[people/X]]\n- [[Y]]\n", "people");
    EXPECT_EQ(idx.page_count(), 2u);
}

TEST(IndexCodec, UnparsableEntrySkippedWithNote) {
    auto idx = parse_index("## A\n- [[bad slug!]] -- nope\n- [[media/Other]]\n- plain\n- [[Good]] -- ok\n", "people");
    EXPECT_EQ(idx.page_count(), 1u);
    EXPECT_EQ(idx.parse_notes.size(), 3u);
    for (const auto& n : idx.parse_notes) EXPECT_EQ(n.kind, ParseNote::Kind::SkippedEntry);
}

TEST(IndexCodec, EntryGrammar) {
    auto idx = parse_index("- [[Slug.md|shown]] (A, B (x)) -- one #two words #t1 #t2\n", "people");
    ASSERT_EQ(idx.sections.size(), 1u);
    const auto& e = idx.sections[0].entries[0];
    EXPECT_EQ(e.link.str(), "people/Slug");
    EXPECT_EQ(e.aliases, (std::vector<std::string>{"A", "B (x)"}));
    EXPECT_EQ(e.summary, "one #two words");
    EXPECT_EQ(e.tags, (std::vector<std::string>{"t1", "t2"}));
}

TEST(IndexCodec, RenderShowsDerivedPageCount) {
    DirectoryIndex idx{"people", {{"Heading", {IndexEntry{SlugPath("people", "A"), {}, "s", {}}}}}, {}};
    auto text = render_index(idx);
    EXPECT_EQ(text, "# People\n> 1 page\n\n## Heading\n- [[A]] -- s\n");
}

TEST(IndexCodec, RandomizedRoundTrip) {
    testing::Rng rng(99);
    for (int round = 0; round < 300; ++round) {
        DirectoryIndex idx;
        idx.directory = "people";
        int sections = 1 + static_cast<int>(rng() % 3);
        int slug = 0;
        for (int s = 0; s < sections; ++s) {
            IndexSection sec;
            sec.heading = (s == 0 && rng() % 4 == 0) ? "" : "Section " + std::to_string(s);
            int entries = 1 + static_cast<int>(rng() % 4);
            for (int e = 0; e < entries; ++e) {
                auto page = testing::random_page(rng, SlugPath("people", "E-" + std::to_string(slug++)));
                sec.entries.push_back(make_index_entry(page));
            }
            idx.sections.push_back(std::move(sec));
        }
        auto text = render_index(idx);
        ASSERT_EQ(parse_index(text, "people"), idx) << text;
        ASSERT_EQ(render_index(idx), text);
    }
}

TEST(IndexCodec, MakeIndexEntryCleansDisplayCopies) {
    WikiPage p;
    p.path = SlugPath("people", "X");
    p.frontmatter.aliases = {"A, B", "(paren)", "a, b"};
    p.frontmatter.tags = {"two words", "#hash"};
    p.summary = "-- See [[people/Y|Why]] and [[media/Z-Film]] #1";
    auto e = make_index_entry(p);
    EXPECT_EQ(e.aliases, (std::vector<std::string>{"A B", "paren"}));
    EXPECT_EQ(e.tags, (std::vector<std::string>{"twowords", "hash"}));
    EXPECT_EQ(e.summary, "See Why and Z-Film 1");
}

TEST(GlobalIndexCodec, RoundTrip) {
    GlobalIndex g{"Overview line one\nline two", {{"people", "People and families"}, {"media", ""}}};
    auto text = render_global_index(g);
    EXPECT_EQ(parse_global_index(text), g);
    auto fixture = parse_global_index(testing::read_file(testing::fixture_dir("anhalt") / "index.md"));
    ASSERT_EQ(fixture.catalog.size(), 2u);
    EXPECT_EQ(fixture.catalog[0].directory, "people");
}

}  // namespace
}  // namespace llmwiki
