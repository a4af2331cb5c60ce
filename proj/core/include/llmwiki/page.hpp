#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llmwiki/slug_path.hpp"

namespace llmwiki {

/// Calendar date, rendered `YYYY-MM-DD`.
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    static std::optional<Date> parse(std::string_view s);
    std::string str() const;
    bool valid() const;

    friend auto operator<=>(const Date&, const Date&) = default;
};

struct PageFrontmatter {
    std::string page_type;
    Date created;
    Date updated;
    std::vector<std::string> aliases;
    std::vector<std::string> tags;

    friend bool operator==(const PageFrontmatter&, const PageFrontmatter&) = default;
};

/// Leniency record produced while parsing (or repairing) a document.
struct ParseNote {
    enum class Kind {
        MissingSection,
        MissingTitle,
        MissingSummary,
        UnknownSection,
        UnknownFrontmatterKey,
        DuplicateValue,
        StrayText,
        SkippedEntry,
        RemovedReference,
    };
    Kind kind;
    std::string detail;

    friend bool operator==(const ParseNote&, const ParseNote&) = default;
};

std::string_view to_string(ParseNote::Kind kind);

/// One bullet of the Related Pages / Related Sources sections.
///
/// `target` keeps the raw text between `[[` and `]]` (display label
/// included) so malformed references survive parsing and reach the
/// validators. Unbracketed bullets store the whole bullet text.
struct RelatedLink {
    std::string target;
    std::string note;
    bool bracketed = true;

    static RelatedLink to(const SlugPath& path, std::string note = {});

    /// Target with any `|label` suffix removed.
    std::string_view target_path_text() const;
    /// Parsed target when bracketed and directory-qualified.
    std::optional<SlugPath> path() const;
    /// True for exactly `[[sources/digests/<slug>]]`.
    bool is_canonical_source_ref() const;

    friend bool operator==(const RelatedLink&, const RelatedLink&) = default;
};

struct WikiPage {
    SlugPath path;
    PageFrontmatter frontmatter;
    std::string title;
    std::string summary;
    std::vector<std::string> key_facts;
    std::vector<RelatedLink> related_pages;
    std::vector<RelatedLink> related_sources;
    std::vector<ParseNote> parse_notes;

    friend bool operator==(const WikiPage&, const WikiPage&) = default;
};

struct IndexEntry {
    SlugPath link;
    std::vector<std::string> aliases;
    std::string summary;
    std::vector<std::string> tags;

    friend bool operator==(const IndexEntry&, const IndexEntry&) = default;
};

struct IndexSection {
    std::string heading;
    std::vector<IndexEntry> entries;

    friend bool operator==(const IndexSection&, const IndexSection&) = default;
};

/// Contents of `<directory>/_index.md`.
///
/// Entry aliases may not contain `,`, `(` or `)` and tags may not contain
/// whitespace; both are display copies of page frontmatter.
struct DirectoryIndex {
    std::string directory;
    std::vector<IndexSection> sections;
    std::vector<ParseNote> parse_notes;

    /// Number of distinct entry links across all sections.
    std::size_t page_count() const;
    bool contains(const SlugPath& link) const;
    std::vector<SlugPath> links() const;

    friend bool operator==(const DirectoryIndex&, const DirectoryIndex&) = default;
};

struct CatalogEntry {
    std::string directory;
    std::string description;

    friend bool operator==(const CatalogEntry&, const CatalogEntry&) = default;
};

/// Contents of the root `index.md`.
struct GlobalIndex {
    std::string overview;  // blockquote lines joined by '\n'
    std::vector<CatalogEntry> catalog;

    bool empty() const { return overview.empty() && catalog.empty(); }

    friend bool operator==(const GlobalIndex&, const GlobalIndex&) = default;
};

struct SourceRecord {
    enum class Kind { digest, article };
    Kind kind = Kind::digest;
    SlugPath path;
    std::string source_id;
    std::string text;

    friend bool operator==(const SourceRecord&, const SourceRecord&) = default;
};

std::string_view to_string(SourceRecord::Kind kind);

/// Title-cased directory name used as the `_index.md` heading.
std::string directory_title(std::string_view directory);

}  // namespace llmwiki
