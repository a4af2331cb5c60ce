#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "llmwiki/snapshot.hpp"

namespace llmwiki {

struct LoadIssue {
    std::string path;     // relative to the wiki root
    std::string message;
};

struct LoadResult {
    WikiSnapshot snapshot;
    std::vector<LoadIssue> report;
};

/// Reads a wiki tree. A missing or empty root yields an empty snapshot.
/// Files that fail to parse are excluded and named in the report.
/// Throws LoadError on I/O failure.
LoadResult load_snapshot(const std::filesystem::path& root);

/// Writes every document of `snapshot` under `root` and removes stale
/// page, index and source files. Other files in the root are left alone.
void write_snapshot(const WikiSnapshot& snapshot, const std::filesystem::path& root);

/// Relative file path (`people/X.md`, `people/_index.md`, ...) for a document.
std::string page_file(const SlugPath& path);
std::string index_file(const std::string& directory);

}  // namespace llmwiki
