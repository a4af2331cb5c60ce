#pragma once

#include <compare>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace llmwiki {

inline constexpr std::string_view kDigestDir = "sources/digests";
inline constexpr std::string_view kArticleDir = "sources/articles";

bool is_valid_slug(std::string_view slug);
bool is_valid_directory(std::string_view directory);
bool is_knowledge_directory(std::string_view directory);

/// Location of a page or source record, rendered as `directory/slug`.
///
/// Directories are lowercase knowledge names (`people`, `media`, ...) or one
/// of the two source archives. Ordering is lexicographic on the rendered form.
class SlugPath {
public:
    SlugPath() = default;

    /// Throws std::invalid_argument when either part is invalid.
    SlugPath(std::string_view directory, std::string_view slug);

    static std::optional<SlugPath> parse(std::string_view rendered);

    std::string_view directory() const { return std::string_view(full_).substr(0, split_); }
    std::string_view slug() const { return std::string_view(full_).substr(split_ + 1); }
    const std::string& str() const { return full_; }
    bool empty() const { return full_.empty(); }

    bool is_digest() const { return directory() == kDigestDir; }
    bool is_article() const { return directory() == kArticleDir; }
    bool is_source() const { return is_digest() || is_article(); }

    friend bool operator==(const SlugPath& a, const SlugPath& b) { return a.full_ == b.full_; }
    friend std::strong_ordering operator<=>(const SlugPath& a, const SlugPath& b) {
        return a.full_ <=> b.full_;
    }

private:
    std::string full_;
    std::size_t split_ = 0;
};

/// Title to slug: whitespace becomes `-`, characters outside the slug
/// alphabet are dropped, runs of `-` collapse. Case is preserved.
std::string slugify(std::string_view title);

/// Lowercase slug used for source archive file names.
std::string source_slug(std::string_view source_id);

}  // namespace llmwiki

template <>
struct std::hash<llmwiki::SlugPath> {
    std::size_t operator()(const llmwiki::SlugPath& p) const noexcept {
        return std::hash<std::string>{}(p.str());
    }
};
