#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "llmwiki/codec.hpp"
#include "llmwiki/errors.hpp"
#include "random_wiki.hpp"

namespace llmwiki {
namespace {

const SlugPath kJohn("people", "John-V-Prince-of-Anhalt-Zerbst");

std::string john_text() {
    return testing::read_file(testing::fixture_dir("anhalt") / "people/John-V-Prince-of-Anhalt-Zerbst.md");
}

TEST(PageCodec, ParsesJohnVPage) {
    auto page = parse_page(john_text(), kJohn);
    EXPECT_EQ(page.frontmatter.page_type, "people");
    EXPECT_EQ(page.frontmatter.created, (Date{2025, 1, 15}));
    EXPECT_EQ(page.frontmatter.aliases.size(), 3u);
    EXPECT_EQ(page.frontmatter.aliases[1], "Johann V von Anhalt-Zerbst");
    EXPECT_EQ(page.frontmatter.tags.size(), 5u);
    EXPECT_EQ(page.title, "John V, Prince of Anhalt-Zerbst");
    EXPECT_EQ(page.summary,
              "German prince of the House of Ascania who ruled Anhalt-Dessau and later the re-created principality "
              "of Anhalt-Zerbst from 1544");
    ASSERT_EQ(page.key_facts.size(), 6u);
    EXPECT_EQ(page.key_facts[0], "John V was born on 4 September 1504 in Dessau and died on 4 February 1551 in Zerbst");
    ASSERT_EQ(page.related_pages.size(), 2u);
    EXPECT_EQ(page.related_pages[0].target, "people/Ernest-I-Prince-of-Anhalt-Dessau");
    EXPECT_EQ(page.related_pages[0].note, "father of John V");
    ASSERT_EQ(page.related_sources.size(), 2u);
    EXPECT_TRUE(page.related_sources[1].is_canonical_source_ref());
    EXPECT_EQ(page.related_sources[1].note, "Wikipedia paragraph about Karl I mentioning John V");
    EXPECT_TRUE(page.parse_notes.empty());
}

TEST(PageCodec, RenderContainsRelatedPageLineAndRoundTrips) {
    auto page = parse_page(john_text(), kJohn);
    auto text = render_page(page);
    EXPECT_NE(text.find("\n- [[people/Ernest-I-Prince-of-Anhalt-Dessau]]\n"), std::string::npos);
    EXPECT_EQ(parse_page(text, kJohn), page);
    EXPECT_EQ(render_page(parse_page(text, kJohn)), text);
}

TEST(PageCodec, RenderOrderIsCanonical) {
    auto text = render_page(parse_page(john_text(), kJohn));
    auto at = [&](const char* s) { return text.find(s); };
    EXPECT_EQ(at("---\n"), 0u);
    EXPECT_LT(at("# John V"), at("> German"));
    EXPECT_LT(at("> German"), at("## Key Facts"));
    EXPECT_LT(at("## Key Facts"), at("## Related Pages"));
    EXPECT_LT(at("## Related Pages"), at("## Related Sources"));
}

TEST(PageCodec, TitleOnlyPageNotesMissingSections) {
    auto page = parse_page("---\ntype: people\ncreated: 2025-01-01\nupdated: 2025-01-01\n---\n# Lonely\n",
                           SlugPath("people", "Lonely"));
    EXPECT_EQ(page.title, "Lonely");
    EXPECT_TRUE(page.key_facts.empty());
    std::vector<std::string> missing;
    for (const auto& n : page.parse_notes) {
        if (n.kind == ParseNote::Kind::MissingSection) missing.push_back(n.detail);
    }
    EXPECT_EQ(missing, (std::vector<std::string>{"Key Facts", "Related Pages", "Related Sources"}));
}

TEST(PageCodec, ZeroFactsStillRendersHeader) {
    WikiPage p;
    p.path = SlugPath("people", "Empty");
    p.frontmatter.page_type = "people";
    p.title = "Empty";
    auto text = render_page(p);
    EXPECT_NE(text.find("## Key Facts\n\n## Related Pages"), std::string::npos);
}

TEST(PageCodec, BrokenFrontmatterIsFatal) {
    SlugPath p("people", "X");
    EXPECT_THROW(parse_page("# No frontmatter\n", p), FrontmatterSyntaxError);
    EXPECT_THROW(parse_page("---\ntype: people\n", p), FrontmatterSyntaxError);
    EXPECT_THROW(parse_page("---\n[unclosed\n---\n", p), FrontmatterSyntaxError);
    EXPECT_THROW(parse_page("---\ntype: people\ncreated: 2025-13-01\nupdated: 2025-01-01\n---\n", p),
                 FrontmatterSyntaxError);
    EXPECT_THROW(parse_page("---\ntype: people\ncreated: 2025-02-01\nupdated: 2025-01-01\n---\n", p),
                 FrontmatterSyntaxError);
}

TEST(PageCodec, LenientOnMessyBodies) {
    auto page = parse_page(
        "---\ncreated: 2025-01-01\nupdated: 2025-01-01\naliases: A\ntags: [x, X]\nextra: 1\n---\n"
        "stray\n# T\n> s\n## Key Facts\n* one\n  continued\n## Trivia\n- ignored\n## Related Pages\n- plain text\n",
        SlugPath("people", "T"));
    EXPECT_EQ(page.frontmatter.page_type, "people");
    EXPECT_EQ(page.frontmatter.aliases, (std::vector<std::string>{"A"}));
    EXPECT_EQ(page.frontmatter.tags, (std::vector<std::string>{"x"}));
    EXPECT_EQ(page.key_facts, (std::vector<std::string>{"one continued"}));
    ASSERT_EQ(page.related_pages.size(), 1u);
    EXPECT_FALSE(page.related_pages[0].bracketed);
    auto has = [&](ParseNote::Kind k) {
        return std::any_of(page.parse_notes.begin(), page.parse_notes.end(), [&](const auto& n) { return n.kind == k; });
    };
    EXPECT_TRUE(has(ParseNote::Kind::UnknownFrontmatterKey));
    EXPECT_TRUE(has(ParseNote::Kind::DuplicateValue));
    EXPECT_TRUE(has(ParseNote::Kind::UnknownSection));
    EXPECT_TRUE(has(ParseNote::Kind::StrayText));
}

TEST(PageCodec, YamlScalarQuotesOnlyWhenNeeded) {
    EXPECT_EQ(yaml_scalar("German nobility"), "German nobility");
    EXPECT_EQ(yaml_scalar("yes"), "\"yes\"");
    EXPECT_EQ(yaml_scalar("a: b"), "\"a: b\"");
    EXPECT_EQ(yaml_scalar("say \"hi\""), "\"say \\\"hi\\\"\"");
    EXPECT_EQ(yaml_scalar(""), "\"\"");
}

TEST(PageCodec, RandomizedRoundTrip) {
    testing::Rng rng(20250115);
    for (int i = 0; i < 1000; ++i) {
        SlugPath path("people", "P-" + std::to_string(i));
        auto page = testing::random_page(rng, path);
        auto text = render_page(page);
        ASSERT_EQ(render_page(page), text);
        auto back = parse_page(text, path);
        ASSERT_EQ(back, page) << text;
    }
}

TEST(SourceCodec, RoundTrip) {
    SourceRecord r{SourceRecord::Kind::digest, SlugPath(kDigestDir, "john-v"), "John V: a prince", "Line one.\nLine two."};
    EXPECT_EQ(parse_source(render_source(r), r.path), r);
    EXPECT_THROW(parse_source(render_source(r), SlugPath("people", "X")), FrontmatterSyntaxError);
}

}  // namespace
}  // namespace llmwiki
