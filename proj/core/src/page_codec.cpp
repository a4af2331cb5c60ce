#include <cctype>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "frontmatter.hpp"
#include "llmwiki/codec.hpp"
#include "llmwiki/errors.hpp"
#include "llmwiki/text.hpp"

namespace llmwiki {

namespace detail {

FrontmatterSplit split_frontmatter(std::string_view text) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    auto lines = text::split_lines(text);
    std::size_t i = 0;
    while (i < lines.size() && text::trim(lines[i]).empty()) ++i;
    if (i == lines.size() || text::trim(lines[i]) != "---") {
        throw FrontmatterSyntaxError("document does not start with a '---' frontmatter block");
    }
    std::size_t open = i++;
    for (; i < lines.size(); ++i) {
        auto t = text::trim(lines[i]);
        if (t == "---" || t == "...") break;
    }
    if (i == lines.size()) throw FrontmatterSyntaxError("frontmatter block is not closed");
    FrontmatterSplit out;
    for (std::size_t j = open + 1; j < i; ++j) {
        out.block += lines[j];
        out.block += '\n';
    }
    out.body.assign(lines.begin() + static_cast<std::ptrdiff_t>(i) + 1, lines.end());
    return out;
}

}  // namespace detail

namespace {

using detail::split_frontmatter;

YAML::Node load_yaml_map(const std::string& block) {
    YAML::Node root;
    try {
        root = YAML::Load(block);
    } catch (const YAML::Exception& e) {
        throw FrontmatterSyntaxError(std::string("unreadable frontmatter: ") + e.what());
    }
    if (!root.IsMap()) throw FrontmatterSyntaxError("frontmatter is not a key/value mapping");
    return root;
}

std::string scalar_of(const YAML::Node& node, const std::string& key) {
    if (!node.IsDefined() || node.IsNull()) return {};
    if (!node.IsScalar()) throw FrontmatterSyntaxError("frontmatter key '" + key + "' must be a scalar");
    return node.Scalar();
}

std::vector<std::string> list_of(const YAML::Node& node, const std::string& key, std::vector<ParseNote>& notes) {
    std::vector<std::string> raw;
    if (!node.IsDefined() || node.IsNull()) {
        // empty list
    } else if (node.IsScalar()) {
        auto v = std::string(text::trim(node.Scalar()));
        if (!v.empty()) raw.push_back(v);
    } else if (node.IsSequence()) {
        for (const auto& item : node) {
            if (item.IsNull()) continue;
            if (!item.IsScalar()) throw FrontmatterSyntaxError("frontmatter list '" + key + "' holds a non-scalar item");
            auto v = std::string(text::trim(item.Scalar()));
            if (!v.empty()) raw.push_back(v);
        }
    } else {
        throw FrontmatterSyntaxError("frontmatter key '" + key + "' must be a list");
    }
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (auto& v : raw) {
        if (seen.insert(text::to_lower(v)).second) {
            out.push_back(std::move(v));
        } else {
            notes.push_back({ParseNote::Kind::DuplicateValue, key + ": " + v});
        }
    }
    return out;
}

Date date_of(const YAML::Node& root, const std::string& key) {
    auto node = root[key];
    if (!node) throw FrontmatterSyntaxError("frontmatter key '" + key + "' is missing");
    auto d = Date::parse(scalar_of(node, key));
    if (!d) throw FrontmatterSyntaxError("frontmatter key '" + key + "' is not a YYYY-MM-DD date");
    return *d;
}

PageFrontmatter parse_page_frontmatter(const std::string& block, const SlugPath& path,
                                       std::vector<ParseNote>& notes) {
    auto root = load_yaml_map(block);
    PageFrontmatter fm;
    static const std::set<std::string> kKnown = {"type", "created", "updated", "aliases", "tags"};
    for (const auto& kv : root) {
        auto key = kv.first.as<std::string>();
        if (!kKnown.contains(key)) notes.push_back({ParseNote::Kind::UnknownFrontmatterKey, key});
    }
    if (auto t = root["type"]) {
        fm.page_type = std::string(text::trim(scalar_of(t, "type")));
    }
    if (fm.page_type.empty()) {
        fm.page_type = std::string(path.directory());
        notes.push_back({ParseNote::Kind::MissingSection, "type"});
    }
    fm.created = date_of(root, "created");
    fm.updated = date_of(root, "updated");
    if (fm.updated < fm.created) throw FrontmatterSyntaxError("frontmatter 'updated' precedes 'created'");
    fm.aliases = list_of(root["aliases"], "aliases", notes);
    fm.tags = list_of(root["tags"], "tags", notes);
    return fm;
}

enum class Section { none, facts, related_pages, related_sources, unknown };

RelatedLink parse_related(std::string_view bullet) {
    bullet = text::trim(bullet);
    RelatedLink link;
    if (bullet.substr(0, 2) == "[[") {
        auto close = bullet.find("]]", 2);
        if (close != std::string_view::npos) {
            link.target = std::string(text::trim(bullet.substr(2, close - 2)));
            auto rest = text::trim(bullet.substr(close + 2));
            if (rest.substr(0, 2) == "--") rest = text::trim(rest.substr(2));
            link.note = std::string(rest);
            link.bracketed = true;
            return link;
        }
    }
    link.target = std::string(bullet);
    link.bracketed = false;
    return link;
}

bool is_bullet(const std::string& line) {
    return line.rfind("- ", 0) == 0 || line.rfind("* ", 0) == 0 || line == "-" || line == "*";
}

bool is_indented(const std::string& line) {
    return !line.empty() && (line[0] == ' ' || line[0] == '\t');
}

std::string list_render(const std::vector<std::string>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += yaml_scalar(items[i]);
    }
    out += "]";
    return out;
}

void render_related(std::ostringstream& os, const RelatedLink& link) {
    if (!link.bracketed) {
        os << "- " << link.target << "\n";
        return;
    }
    os << "- [[" << link.target << "]]\n";
    if (!link.note.empty()) os << "  -- " << link.note << "\n";
}

}  // namespace

std::string yaml_scalar(std::string_view value) {
    static const std::set<std::string> kReserved = {"null", "~", "true", "false", "yes", "no", "on", "off", "y", "n"};
    bool plain = !value.empty() && value.front() != ' ' && value.back() != ' ' && !kReserved.contains(text::to_lower(value));
    if (plain) {
        auto first = static_cast<unsigned char>(value.front());
        plain = std::isalnum(first) != 0;
    }
    if (plain) {
        for (char ch : value) {
            auto c = static_cast<unsigned char>(ch);
            bool ok = std::isalnum(c) || c >= 0x80 || c == ' ' || c == '.' || c == '_' || c == '-' || c == '\'' ||
                      c == '(' || c == ')' || c == '/' || c == '&' || c == '+';
            if (!ok) {
                plain = false;
                break;
            }
        }
    }
    if (plain) return std::string(value);
    std::string out = "\"";
    for (char ch : value) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += ch;
        }
    }
    out += "\"";
    return out;
}

WikiPage parse_page(std::string_view source, const SlugPath& path) {
    auto split = split_frontmatter(source);
    WikiPage page;
    page.path = path;
    page.frontmatter = parse_page_frontmatter(split.block, path, page.parse_notes);

    Section section = Section::none;
    bool saw_facts = false;
    bool saw_pages = false;
    bool saw_sources = false;
    bool have_title = false;
    std::vector<std::string> summary_parts;
    std::string bullet;
    bool in_bullet = false;

    auto flush = [&] {
        if (!in_bullet) return;
        in_bullet = false;
        auto t = std::string(text::trim(bullet));
        bullet.clear();
        if (t.empty()) return;
        switch (section) {
            case Section::facts: page.key_facts.push_back(std::move(t)); break;
            case Section::related_pages: page.related_pages.push_back(parse_related(t)); break;
            case Section::related_sources: page.related_sources.push_back(parse_related(t)); break;
            default: break;
        }
    };

    for (const auto& line : split.body) {
        auto trimmed = text::trim(line);
        if (trimmed.empty()) {
            flush();
            continue;
        }
        if (line.rfind("## ", 0) == 0 || line == "##") {
            flush();
            auto name = text::trim(std::string_view(line).substr(2));
            if (text::iequals(name, "Key Facts")) {
                section = Section::facts;
                saw_facts = true;
            } else if (text::iequals(name, "Related Pages")) {
                section = Section::related_pages;
                saw_pages = true;
            } else if (text::iequals(name, "Related Sources")) {
                section = Section::related_sources;
                saw_sources = true;
            } else {
                section = Section::unknown;
                page.parse_notes.push_back({ParseNote::Kind::UnknownSection, std::string(name)});
            }
            continue;
        }
        if (section == Section::none) {
            if ((line.rfind("# ", 0) == 0 || line == "#") && !have_title) {
                page.title = std::string(text::trim(std::string_view(line).substr(1)));
                have_title = true;
            } else if (line[0] == '>') {
                auto part = text::trim(std::string_view(line).substr(1));
                if (!part.empty()) summary_parts.emplace_back(part);
            } else {
                page.parse_notes.push_back({ParseNote::Kind::StrayText, std::string(trimmed)});
            }
            continue;
        }
        if (section == Section::unknown) continue;
        if (is_bullet(line)) {
            flush();
            in_bullet = true;
            bullet = line.size() > 2 ? line.substr(2) : std::string();
        } else if (is_indented(line) && in_bullet) {
            bullet += ' ';
            bullet += trimmed;
        } else {
            flush();
            page.parse_notes.push_back({ParseNote::Kind::StrayText, std::string(trimmed)});
        }
    }
    flush();

    page.summary = text::join(summary_parts, " ");
    if (page.title.empty()) page.parse_notes.push_back({ParseNote::Kind::MissingTitle, "title"});
    if (!saw_facts) page.parse_notes.push_back({ParseNote::Kind::MissingSection, "Key Facts"});
    if (!saw_pages) page.parse_notes.push_back({ParseNote::Kind::MissingSection, "Related Pages"});
    if (!saw_sources) page.parse_notes.push_back({ParseNote::Kind::MissingSection, "Related Sources"});
    return page;
}

std::string render_page(const WikiPage& page) {
    std::ostringstream os;
    const auto& fm = page.frontmatter;
    os << "---\n"
       << "type: " << yaml_scalar(fm.page_type) << "\n"
       << "created: " << fm.created.str() << "\n"
       << "updated: " << fm.updated.str() << "\n"
       << "aliases: " << list_render(fm.aliases) << "\n"
       << "tags: " << list_render(fm.tags) << "\n"
       << "---\n";
    os << "# " << page.title << "\n";
    if (!page.summary.empty()) os << "> " << page.summary << "\n";
    os << "\n## Key Facts\n";
    for (const auto& f : page.key_facts) os << "- " << f << "\n";
    os << "\n## Related Pages\n";
    for (const auto& r : page.related_pages) render_related(os, r);
    os << "\n## Related Sources\n";
    for (const auto& r : page.related_sources) render_related(os, r);
    return os.str();
}

SourceRecord parse_source(std::string_view source, const SlugPath& path) {
    if (!path.is_source()) throw FrontmatterSyntaxError("not a source path: " + path.str());
    auto split = split_frontmatter(source);
    auto root = load_yaml_map(split.block);
    SourceRecord rec;
    rec.path = path;
    rec.kind = path.is_digest() ? SourceRecord::Kind::digest : SourceRecord::Kind::article;
    if (auto id = root["source_id"]) rec.source_id = std::string(text::trim(scalar_of(id, "source_id")));
    if (rec.source_id.empty()) rec.source_id = std::string(path.slug());
    rec.text = std::string(text::trim(text::join(split.body, "\n")));
    return rec;
}

std::string render_source(const SourceRecord& record) {
    std::ostringstream os;
    os << "---\n"
       << "source_id: " << yaml_scalar(record.source_id) << "\n"
       << "kind: " << to_string(record.kind) << "\n"
       << "---\n"
       << record.text << "\n";
    return os.str();
}

}  // namespace llmwiki
