#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Small string helpers shared by the codecs, prompts, and metrics.
namespace llmwiki::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool iequals(std::string_view a, std::string_view b);
bool contains(std::string_view haystack, std::string_view needle);

std::uint64_t fnv1a64(std::string_view s);
std::string hex64(std::uint64_t v);

// Lowercase ASCII alphanumeric runs; bytes >= 0x80 are kept as word characters.
std::vector<std::string> word_tokens(std::string_view s);

}  // namespace llmwiki::text
