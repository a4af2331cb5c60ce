#include <gtest/gtest.h>

#include "llmwiki/slug_path.hpp"

namespace llmwiki {
namespace {

TEST(SlugPath, ParsesKnowledgeAndArchivePaths) {
    auto p = SlugPath::parse("people/John-V-Prince-of-Anhalt-Zerbst");
    ASSERT_TRUE(p);
    EXPECT_EQ(p->directory(), "people");
    EXPECT_EQ(p->slug(), "John-V-Prince-of-Anhalt-Zerbst");
    EXPECT_FALSE(p->is_source());

    auto d = SlugPath::parse("sources/digests/john-v");
    ASSERT_TRUE(d);
    EXPECT_TRUE(d->is_digest());
    EXPECT_EQ(d->directory(), "sources/digests");
    EXPECT_TRUE(SlugPath::parse("sources/articles/x")->is_article());
}

TEST(SlugPath, RejectsMalformedPaths) {
    for (const char* bad : {"", "John", "People/X", "people/", "/X", "people/-X", "people/a b", "sources/x",
                            "sources/other/x", "people/a/b"}) {
        EXPECT_FALSE(SlugPath::parse(bad)) << bad;
    }
    EXPECT_THROW(SlugPath("people", "bad slug"), std::invalid_argument);
    EXPECT_THROW(SlugPath("Bad", "x"), std::invalid_argument);
}

TEST(SlugPath, OrdersByRenderedForm) {
    SlugPath a("media", "Z"), b("people", "A");
    EXPECT_LT(a, b);
    EXPECT_EQ(SlugPath("people", "A"), b);
}

TEST(Slugify, ReplacesWhitespaceAndDropsForeignCharacters) {
    EXPECT_EQ(slugify("John V, Prince of Anhalt-Zerbst"), "John-V-Prince-of-Anhalt-Zerbst");
    EXPECT_EQ(slugify("  Monster  A Go-Go! "), "Monster-A-Go-Go");
    EXPECT_EQ(slugify("Zürich"), "Zrich");
    EXPECT_EQ(slugify("---"), "");
}

TEST(Slugify, OutputIsAlwaysAValidSlugOrEmpty) {
    for (const char* t : {"a", "Ünïcode only", "x.y_z", "-lead", "trail-", "(1927) film", "北京"}) {
        auto s = slugify(t);
        EXPECT_TRUE(s.empty() || is_valid_slug(s)) << t << " -> " << s;
    }
}

TEST(SourceSlug, LowercasesAndHyphenates) {
    EXPECT_EQ(source_slug("John V, Prince of Anhalt-Zerbst"), "john-v-prince-of-anhalt-zerbst");
    EXPECT_EQ(source_slug("!!!"), "source");
}

}  // namespace
}  // namespace llmwiki
