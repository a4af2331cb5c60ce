#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "llmwiki/page.hpp"

namespace llmwiki {

/// Lenient page parse. Missing sections become parse notes; a missing or
/// unreadable frontmatter block throws FrontmatterSyntaxError.
WikiPage parse_page(std::string_view text, const SlugPath& path);

/// Canonical rendering: frontmatter, `# Title`, `> summary`, then the
/// Key Facts, Related Pages and Related Sources sections.
std::string render_page(const WikiPage& page);

/// Entries whose wikilink cannot be resolved into `directory` are skipped
/// with a parse note.
DirectoryIndex parse_index(std::string_view text, std::string_view directory);
std::string render_index(const DirectoryIndex& index);

/// Index entry for a page built from its frontmatter and summary, cleaned so
/// that it survives a render/parse round trip.
IndexEntry make_index_entry(const WikiPage& page);

GlobalIndex parse_global_index(std::string_view text);
std::string render_global_index(const GlobalIndex& index);

SourceRecord parse_source(std::string_view text, const SlugPath& path);
std::string render_source(const SourceRecord& record);

/// Quotes a scalar for a YAML flow context when it is not safe as plain text.
std::string yaml_scalar(std::string_view value);

}  // namespace llmwiki
