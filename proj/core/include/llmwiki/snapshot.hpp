#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "llmwiki/page.hpp"

namespace llmwiki {

using PageMap = std::map<SlugPath, WikiPage>;
using IndexMap = std::map<std::string, DirectoryIndex>;
using SourceMap = std::map<SlugPath, SourceRecord>;

/// Immutable view of the whole wiki. Every map key equals the stored value's
/// path (or directory); mutation goes through apply_updates().
class WikiSnapshot {
public:
    WikiSnapshot() = default;
    /// Throws InvalidUpdateError when a key disagrees with its value.
    WikiSnapshot(PageMap pages, IndexMap indices, GlobalIndex global, SourceMap sources,
                 std::uint64_t revision = 0);

    const PageMap& pages() const { return pages_; }
    const IndexMap& indices() const { return indices_; }
    const GlobalIndex& global() const { return global_; }
    const SourceMap& sources() const { return sources_; }
    std::uint64_t revision() const { return revision_; }

    const WikiPage* find_page(const SlugPath& path) const;
    const DirectoryIndex* find_index(const std::string& directory) const;
    const SourceRecord* find_source(const SlugPath& path) const;

    bool empty() const { return pages_.empty() && indices_.empty() && sources_.empty() && global_.empty(); }

    /// Knowledge directories that have pages or an index.
    std::set<std::string> directories() const;

private:
    PageMap pages_;
    IndexMap indices_;
    GlobalIndex global_;
    SourceMap sources_;
    std::uint64_t revision_ = 0;
};

/// One compilation step's proposed writes.
struct UpdateSet {
    std::vector<WikiPage> page_writes;
    std::vector<DirectoryIndex> index_edits;
    std::vector<SourceRecord> source_writes;
    std::optional<GlobalIndex> global_edit;
    std::vector<SlugPath> deletions;

    bool empty() const;

    /// File paths touched by this update: `dir/Slug` for pages, sources and
    /// deletions, `dir/_index.md` for index edits, `index.md` for the global
    /// index. Sorted, no duplicates.
    std::vector<std::string> touched() const;

    /// Paths that appear more than once across the update.
    std::vector<std::string> conflicts() const;

    const WikiPage* find_page_write(const SlugPath& path) const;
    WikiPage* find_page_write(const SlugPath& path);
    const DirectoryIndex* find_index_edit(const std::string& directory) const;
    DirectoryIndex* find_index_edit(const std::string& directory);

    friend bool operator==(const UpdateSet&, const UpdateSet&) = default;
};

/// New snapshot with writes applied, deletions removed and revision+1.
/// Throws InvalidUpdateError for conflicting paths, deletion of a missing
/// path, pages under `sources/`, or source records in the wrong archive.
WikiSnapshot apply_updates(const WikiSnapshot& snapshot, const UpdateSet& updates);

/// Merged read-only overlay of a snapshot and an update set. Holds pointers
/// into both; neither may be destroyed while the view is alive.
struct WikiView {
    std::map<SlugPath, const WikiPage*> pages;
    std::map<std::string, const DirectoryIndex*> indices;
    std::map<SlugPath, const SourceRecord*> sources;

    static WikiView of(const WikiSnapshot& snapshot, const UpdateSet* updates = nullptr);

    const WikiPage* page(const SlugPath& path) const;
    const DirectoryIndex* index(const std::string& directory) const;
    bool has_source(const SlugPath& path) const { return sources.contains(path); }
    /// True when `path` names an existing page or source record.
    bool resolves(const SlugPath& path) const;
    std::set<std::string> directories() const;
};

}  // namespace llmwiki
