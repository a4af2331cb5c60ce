#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "llmwiki/snapshot.hpp"

namespace llmwiki {

enum class SearchField { name, alias, tag, summary, content };
inline constexpr std::size_t kSearchFieldCount = 5;

std::string_view to_string(SearchField field);

/// Strictly decreasing so structured signals outrank body text.
struct FieldWeights {
    int name = 8;
    int alias = 6;
    int tag = 4;
    int summary = 2;
    int content = 1;

    int of(SearchField field) const;
};

struct SearchHit {
    SlugPath path;
    int score = 0;
    std::vector<SearchField> matched_fields;
    std::string snippet;
    std::string title;
    std::vector<std::string> aliases;
    std::vector<std::string> tags;
    std::string summary;
};

/// Case-folded alphanumeric runs; non-ASCII bytes count as letters.
std::vector<std::string> search_tokens(std::string_view text);

/// Per-field presence postings over knowledge pages and source digests.
///
/// Score of a document is the sum, over distinct query tokens and fields,
/// of the field weight when the token occurs in that field. Hits are ordered
/// by score descending, then path ascending.
class SearchIndex {
public:
    SearchIndex() = default;

    static SearchIndex build(const WikiSnapshot& snapshot, FieldWeights weights = {});

    /// Throws std::invalid_argument when limit is 0.
    std::vector<SearchHit> search(std::string_view query, std::size_t limit) const;

    std::uint64_t revision() const { return revision_; }
    std::size_t size() const { return docs_.size(); }
    const FieldWeights& weights() const { return weights_; }

private:
    struct Document {
        SlugPath path;
        std::string title;
        std::vector<std::string> aliases;
        std::vector<std::string> tags;
        std::string summary;
        std::string snippet;
    };

    std::vector<Document> docs_;
    std::array<std::unordered_map<std::string, std::vector<std::uint32_t>>, kSearchFieldCount> postings_;
    FieldWeights weights_;
    std::uint64_t revision_ = 0;
};

}  // namespace llmwiki
