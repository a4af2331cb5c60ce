#include "llmwiki/slug_path.hpp"

#include <stdexcept>

#include "llmwiki/text.hpp"

namespace llmwiki {

namespace {
bool is_alnum(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}
bool is_slug_char(char c) { return is_alnum(c) || c == '.' || c == '_' || c == '-'; }
}  // namespace

bool is_valid_slug(std::string_view slug) {
    if (slug.empty() || !is_alnum(slug.front())) return false;
    for (char c : slug) {
        if (!is_slug_char(c)) return false;
    }
    return true;
}

bool is_knowledge_directory(std::string_view directory) {
    if (directory.empty() || directory == "sources") return false;
    if (!(directory.front() >= 'a' && directory.front() <= 'z')) return false;
    for (char c : directory) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

bool is_valid_directory(std::string_view directory) {
    return directory == kDigestDir || directory == kArticleDir || is_knowledge_directory(directory);
}

SlugPath::SlugPath(std::string_view directory, std::string_view slug) {
    if (!is_valid_directory(directory)) throw std::invalid_argument("invalid directory: " + std::string(directory));
    if (!is_valid_slug(slug)) throw std::invalid_argument("invalid slug: " + std::string(slug));
    full_.reserve(directory.size() + slug.size() + 1);
    full_.append(directory).append("/").append(slug);
    split_ = directory.size();
}

std::optional<SlugPath> SlugPath::parse(std::string_view rendered) {
    std::string_view dir;
    std::string_view slug;
    for (auto archive : {kDigestDir, kArticleDir}) {
        if (rendered.size() > archive.size() && rendered.substr(0, archive.size()) == archive &&
            rendered[archive.size()] == '/') {
            dir = archive;
            slug = rendered.substr(archive.size() + 1);
        }
    }
    if (dir.empty()) {
        auto pos = rendered.find('/');
        if (pos == std::string_view::npos) return std::nullopt;
        dir = rendered.substr(0, pos);
        slug = rendered.substr(pos + 1);
        if (!is_knowledge_directory(dir)) return std::nullopt;
    }
    if (!is_valid_slug(slug)) return std::nullopt;
    return SlugPath(dir, slug);
}

std::string slugify(std::string_view title) {
    std::string out;
    for (char c : text::trim(title)) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') c = '-';
        if (!is_slug_char(c)) continue;
        if (c == '-' && !out.empty() && out.back() == '-') continue;
        if (out.empty() && !is_alnum(c)) continue;
        out.push_back(c);
    }
    while (!out.empty() && out.back() == '-') out.pop_back();
    return out;
}

std::string source_slug(std::string_view source_id) {
    std::string out;
    for (char c : text::to_lower(source_id)) {
        if (!is_alnum(c)) c = '-';
        if (c == '-' && (out.empty() || out.back() == '-')) continue;
        out.push_back(c);
    }
    while (!out.empty() && out.back() == '-') out.pop_back();
    if (out.empty()) out = "source";
    return out;
}

}  // namespace llmwiki
