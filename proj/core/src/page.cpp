#include "llmwiki/page.hpp"

#include <charconv>
#include <cstdio>
#include <set>

#include "llmwiki/text.hpp"

namespace llmwiki {

namespace {
bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

int days_in_month(int year, int month) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    return month == 2 && leap ? 29 : kDays[month - 1];
}
}  // namespace

std::optional<Date> Date::parse(std::string_view s) {
    s = text::trim(s);
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    Date d;
    if (!parse_int(s.substr(0, 4), d.year) || !parse_int(s.substr(5, 2), d.month) ||
        !parse_int(s.substr(8, 2), d.day))
        return std::nullopt;
    if (!d.valid()) return std::nullopt;
    return d;
}

bool Date::valid() const {
    return year >= 0 && year <= 9999 && month >= 1 && month <= 12 && day >= 1 && day <= days_in_month(year, month);
}

std::string Date::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
}

std::string_view to_string(ParseNote::Kind kind) {
    switch (kind) {
        case ParseNote::Kind::MissingSection: return "missing_section";
        case ParseNote::Kind::MissingTitle: return "missing_title";
        case ParseNote::Kind::MissingSummary: return "missing_summary";
        case ParseNote::Kind::UnknownSection: return "unknown_section";
        case ParseNote::Kind::UnknownFrontmatterKey: return "unknown_frontmatter_key";
        case ParseNote::Kind::DuplicateValue: return "duplicate_value";
        case ParseNote::Kind::StrayText: return "stray_text";
        case ParseNote::Kind::SkippedEntry: return "skipped_entry";
        case ParseNote::Kind::RemovedReference: return "removed_reference";
    }
    return "unknown";
}

std::string_view to_string(SourceRecord::Kind kind) {
    return kind == SourceRecord::Kind::digest ? "digest" : "article";
}

RelatedLink RelatedLink::to(const SlugPath& path, std::string note) {
    return RelatedLink{path.str(), std::move(note), true};
}

std::string_view RelatedLink::target_path_text() const {
    std::string_view t = target;
    return text::trim(t.substr(0, t.find('|')));
}

std::optional<SlugPath> RelatedLink::path() const {
    if (!bracketed) return std::nullopt;
    return SlugPath::parse(target_path_text());
}

bool RelatedLink::is_canonical_source_ref() const {
    if (!bracketed || target.find('|') != std::string::npos) return false;
    auto p = SlugPath::parse(target);
    return p && p->is_digest() && p->str() == target;
}

std::size_t DirectoryIndex::page_count() const { return links().size(); }

bool DirectoryIndex::contains(const SlugPath& link) const {
    for (const auto& s : sections) {
        for (const auto& e : s.entries) {
            if (e.link == link) return true;
        }
    }
    return false;
}

std::vector<SlugPath> DirectoryIndex::links() const {
    std::vector<SlugPath> out;
    std::set<SlugPath> seen;
    for (const auto& s : sections) {
        for (const auto& e : s.entries) {
            if (seen.insert(e.link).second) out.push_back(e.link);
        }
    }
    return out;
}

std::string directory_title(std::string_view directory) {
    std::string out(directory);
    bool start = true;
    for (auto& c : out) {
        if (c == '-' || c == '_') {
            c = ' ';
            start = true;
        } else if (start) {
            if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
            start = false;
        }
    }
    return out;
}

}  // namespace llmwiki
