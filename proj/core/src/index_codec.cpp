#include <cctype>
#include <set>
#include <sstream>

#include "llmwiki/codec.hpp"
#include "llmwiki/text.hpp"
#include "llmwiki/wikilink.hpp"

namespace llmwiki {

namespace {

bool is_bullet(const std::string& line) { return line.rfind("- ", 0) == 0 || line.rfind("* ", 0) == 0; }
bool is_indented(const std::string& line) { return !line.empty() && (line[0] == ' ' || line[0] == '\t'); }

std::optional<SlugPath> resolve_index_link(std::string_view target, std::string_view directory) {
    target = text::trim(target.substr(0, target.find('|')));
    if (target.size() > 3 && target.substr(target.size() - 3) == ".md") target.remove_suffix(3);
    if (target.find('/') == std::string_view::npos) {
        if (!is_valid_slug(target) || !is_knowledge_directory(directory)) return std::nullopt;
        return SlugPath(directory, target);
    }
    return SlugPath::parse(target);
}

// `[[Slug]] (alias, alias) -- summary #tag #tag`
std::optional<IndexEntry> parse_entry(std::string_view text, std::string_view directory, std::string& problem) {
    text = text::trim(text);
    if (text.substr(0, 2) != "[[") {
        problem = "entry does not start with a wikilink";
        return std::nullopt;
    }
    auto close = text.find("]]");
    if (close == std::string_view::npos) {
        problem = "unterminated wikilink";
        return std::nullopt;
    }
    auto link = resolve_index_link(text.substr(2, close - 2), directory);
    if (!link) {
        problem = "unparsable wikilink [[" + std::string(text.substr(2, close - 2)) + "]]";
        return std::nullopt;
    }
    if (link->directory() != directory) {
        problem = "entry " + link->str() + " belongs to another directory";
        return std::nullopt;
    }
    IndexEntry entry;
    entry.link = *link;
    auto rest = text::trim(text.substr(close + 2));
    if (!rest.empty() && rest.front() == '(') {
        int depth = 0;
        std::size_t end = std::string_view::npos;
        for (std::size_t i = 0; i < rest.size(); ++i) {
            if (rest[i] == '(') ++depth;
            if (rest[i] == ')' && --depth == 0) {
                end = i;
                break;
            }
        }
        if (end != std::string_view::npos) {
            for (auto& a : text::split(rest.substr(1, end - 1), ',')) {
                auto t = text::trim(a);
                if (!t.empty()) entry.aliases.emplace_back(t);
            }
            rest = text::trim(rest.substr(end + 1));
        }
    }
    // Trailing run of #tokens are tags.
    std::vector<std::string> words;
    {
        std::istringstream is{std::string(rest)};
        std::string w;
        while (is >> w) words.push_back(w);
    }
    std::size_t cut = words.size();
    while (cut > 0 && words[cut - 1].size() > 1 && words[cut - 1][0] == '#') --cut;
    for (std::size_t i = cut; i < words.size(); ++i) entry.tags.push_back(words[i].substr(1));
    if (cut < words.size()) {
        // Cut the summary text right before the first tag token.
        std::size_t pos = rest.size();
        std::size_t found = 0;
        for (std::size_t i = rest.size(); i-- > 0;) {
            if (rest[i] == '#' && (i == 0 || rest[i - 1] == ' ' || rest[i - 1] == '\t')) {
                if (++found == words.size() - cut) {
                    pos = i;
                    break;
                }
            }
        }
        rest = text::trim(rest.substr(0, pos));
    }
    if (rest.substr(0, 2) == "--") rest = text::trim(rest.substr(2));
    entry.summary = std::string(rest);
    return entry;
}

}  // namespace

DirectoryIndex parse_index(std::string_view source, std::string_view directory) {
    DirectoryIndex index;
    index.directory = std::string(directory);
    auto lines = text::split_lines(source);
    std::string bullet;
    bool in_bullet = false;
    IndexSection* current = nullptr;

    auto flush = [&] {
        if (!in_bullet) return;
        in_bullet = false;
        std::string problem;
        auto entry = parse_entry(bullet, directory, problem);
        if (!entry) {
            index.parse_notes.push_back({ParseNote::Kind::SkippedEntry, problem});
        } else {
            if (!current) {
                index.sections.push_back({});
                current = &index.sections.back();
            }
            current->entries.push_back(std::move(*entry));
        }
        bullet.clear();
    };

    for (const auto& line : lines) {
        auto trimmed = text::trim(line);
        if (trimmed.empty()) {
            flush();
            continue;
        }
        if (line.rfind("## ", 0) == 0) {
            flush();
            index.sections.push_back({std::string(text::trim(std::string_view(line).substr(3))), {}});
            current = &index.sections.back();
            continue;
        }
        if (line.rfind("# ", 0) == 0 || line[0] == '>') {
            flush();
            continue;  // title and page-count line are derived
        }
        if (is_bullet(line)) {
            flush();
            in_bullet = true;
            bullet = line.substr(2);
        } else if (is_indented(line) && in_bullet) {
            bullet += ' ';
            bullet += trimmed;
        } else {
            flush();
            index.parse_notes.push_back({ParseNote::Kind::StrayText, std::string(trimmed)});
        }
    }
    flush();
    return index;
}

std::string render_index(const DirectoryIndex& index) {
    std::ostringstream os;
    os << "# " << directory_title(index.directory) << "\n";
    auto n = index.page_count();
    os << "> " << n << (n == 1 ? " page" : " pages") << "\n";
    for (std::size_t i = 0; i < index.sections.size(); ++i) {
        const auto& s = index.sections[i];
        if (i == 0) os << "\n";
        if (!(i == 0 && s.heading.empty())) os << "## " << s.heading << "\n";
        for (const auto& e : s.entries) {
            os << "- [[" << e.link.slug() << "]]";
            if (!e.aliases.empty()) os << " (" << text::join(e.aliases, ", ") << ")";
            if (!e.summary.empty()) os << " -- " << e.summary;
            for (const auto& t : e.tags) os << " #" << t;
            os << "\n";
        }
    }
    return os.str();
}

IndexEntry make_index_entry(const WikiPage& page) {
    IndexEntry e;
    e.link = page.path;
    std::set<std::string> seen;
    for (const auto& a : page.frontmatter.aliases) {
        std::string clean;
        for (char c : a) {
            if (c != ',' && c != '(' && c != ')') clean.push_back(c);
        }
        auto t = std::string(text::trim(clean));
        if (!t.empty() && seen.insert(text::to_lower(t)).second) e.aliases.push_back(t);
    }
    for (const auto& t : page.frontmatter.tags) {
        std::string clean;
        for (char c : t) {
            if (!std::isspace(static_cast<unsigned char>(c)) && c != '#') clean.push_back(c);
        }
        if (!clean.empty()) e.tags.push_back(clean);
    }
    // Wikilinks become their display text; word-initial '#' would read as a tag.
    std::string summary;
    std::size_t pos = 0;
    for (const auto& raw : scan_raw_links(page.summary)) {
        summary.append(page.summary, pos, raw.offset - pos);
        auto shown = raw.label.empty() ? raw.target.substr(raw.target.rfind('/') + 1) : raw.label;
        summary += shown;
        pos = raw.offset + raw.length;
    }
    summary.append(page.summary, pos);
    std::string out;
    for (std::size_t i = 0; i < summary.size(); ++i) {
        char c = summary[i];
        if (c == '\n' || c == '\r' || c == '\t') c = ' ';
        if (c == '#' && (out.empty() || out.back() == ' ')) continue;
        out.push_back(c);
    }
    e.summary = std::string(text::trim(out));
    if (e.summary.rfind("--", 0) == 0) e.summary = std::string(text::trim(std::string_view(e.summary).substr(2)));
    return e;
}

GlobalIndex parse_global_index(std::string_view source) {
    GlobalIndex g;
    std::vector<std::string> overview;
    std::string bullet;
    bool in_bullet = false;
    bool in_catalog = false;
    auto flush = [&] {
        if (!in_bullet) return;
        in_bullet = false;
        auto t = text::trim(bullet);
        auto sep = t.find(" -- ");
        CatalogEntry e;
        auto dir = text::trim(t.substr(0, sep));
        while (!dir.empty() && dir.back() == '/') dir.remove_suffix(1);
        e.directory = std::string(dir);
        if (sep != std::string_view::npos) e.description = std::string(text::trim(t.substr(sep + 4)));
        if (!e.directory.empty()) g.catalog.push_back(std::move(e));
        bullet.clear();
    };
    for (const auto& line : text::split_lines(source)) {
        auto trimmed = text::trim(line);
        if (trimmed.empty()) {
            flush();
            continue;
        }
        if (line.rfind("## ", 0) == 0) {
            flush();
            in_catalog = true;
            continue;
        }
        if (line.rfind("# ", 0) == 0) continue;
        if (line[0] == '>' && !in_catalog) {
            overview.emplace_back(text::trim(std::string_view(line).substr(1)));
            continue;
        }
        if (in_catalog && is_bullet(line)) {
            flush();
            in_bullet = true;
            bullet = line.substr(2);
        } else if (in_catalog && is_indented(line) && in_bullet) {
            bullet += ' ';
            bullet += trimmed;
        } else if (!in_catalog) {
            // Overview paragraphs continued without '>' belong to the previous line.
            if (!overview.empty()) overview.back() += " " + std::string(trimmed);
        }
    }
    flush();
    g.overview = text::join(overview, "\n");
    return g;
}

std::string render_global_index(const GlobalIndex& index) {
    std::ostringstream os;
    os << "# Wiki Directory Overview\n";
    if (!index.overview.empty()) {
        os << "\n";
        for (const auto& line : text::split_lines(index.overview)) os << "> " << line << "\n";
    }
    os << "\n## Directory Catalog\n";
    for (const auto& e : index.catalog) {
        os << "- " << e.directory << "/";
        if (!e.description.empty()) os << " -- " << e.description;
        os << "\n";
    }
    return os.str();
}

}  // namespace llmwiki
