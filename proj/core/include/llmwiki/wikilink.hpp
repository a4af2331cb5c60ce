#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "llmwiki/slug_path.hpp"

namespace llmwiki {

/// A `[[...]]` occurrence in text.
struct RawLink {
    std::size_t offset = 0;  // position of the opening brackets
    std::size_t length = 0;  // including both bracket pairs
    std::string target;      // text before any '|'
    std::string label;       // text after '|', empty when absent
};

/// Every balanced `[[...]]` occurrence in order, including unqualified ones.
std::vector<RawLink> scan_raw_links(std::string_view text);

/// Directory-qualified wikilink targets in order of appearance; duplicates
/// kept, `[[dir/Slug|label]]` yields `dir/Slug`, malformed pairs ignored.
std::vector<SlugPath> extract_wikilinks(std::string_view text);

}  // namespace llmwiki
