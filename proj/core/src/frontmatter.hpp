#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace llmwiki::detail {

struct FrontmatterSplit {
    std::string block;              // YAML between the delimiters
    std::vector<std::string> body;  // lines after the closing delimiter
};

/// Throws FrontmatterSyntaxError when the text does not open with a
/// delimited `---` block.
FrontmatterSplit split_frontmatter(std::string_view text);

}  // namespace llmwiki::detail
