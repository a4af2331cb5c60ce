#include "llmwiki/validation.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

#include "llmwiki/codec.hpp"
#include "llmwiki/llm_port.hpp"
#include "llmwiki/text.hpp"
#include "llmwiki/wikilink.hpp"

namespace llmwiki {

namespace {

struct TypeInfo {
    ErrorType type;
    std::string_view name;
    std::string_view display;
    std::string_view detection;
};

constexpr TypeInfo kTypes[] = {
    {ErrorType::DanglingLink, "DanglingLink", "Dangling Links", "cross-validated with filesystem"},
    {ErrorType::IncompletePage, "IncompletePage", "Incomplete Pages", "template completeness check"},
    {ErrorType::MalformedRef, "MalformedRef", "Malformed Refs", "regex validation"},
    {ErrorType::UnseenOverwrite, "UnseenOverwrite", "Unseen Overwrite", "set comparison"},
    {ErrorType::IndexInconsistency, "IndexInconsistency", "Index Inconsistency", "bidirectional diff"},
    {ErrorType::UnsupportedFact, "UnsupportedFact", "Unsupported Facts", "source-grounded LLM verification"},
    {ErrorType::CrossPageContradiction, "CrossPageContradiction", "Cross-Page Contradictions",
     "sampling-based consistency checks"},
};

const TypeInfo& info(ErrorType t) { return kTypes[static_cast<std::size_t>(t)]; }

ValidationError make_error(ErrorType type, const SlugPath& path, std::string_view section, int item,
                           std::string text, std::string detail) {
    return ValidationError{type, path, Locus{std::string(section), item, std::move(text)}, std::move(detail), 0};
}

bool target_resolves(const WikiView& view, std::string_view target) {
    auto p = SlugPath::parse(target);
    return p && view.resolves(*p);
}

void check_text_links(const WikiView& view, const WikiPage& page, std::string_view section, int item,
                      std::string_view body, std::vector<ValidationError>& out) {
    for (const auto& raw : scan_raw_links(body)) {
        if (target_resolves(view, raw.target)) continue;
        out.push_back(make_error(ErrorType::DanglingLink, page.path, section, item, raw.target,
                                 "link [[" + raw.target + "]] in " + std::string(section) + " has no target page"));
    }
}

void check_page(const WikiView& view, const WikiPage& page, std::vector<ValidationError>& out) {
    const auto& p = page.path;
    if (page.title.empty())
        out.push_back(make_error(ErrorType::IncompletePage, p, section::title, -1, "", "page has no title"));
    if (page.summary.empty())
        out.push_back(make_error(ErrorType::IncompletePage, p, section::summary, -1, "", "page has no summary"));
    if (page.key_facts.empty())
        out.push_back(make_error(ErrorType::IncompletePage, p, section::key_facts, -1, "", "page has no key facts"));
    if (page.related_sources.empty())
        out.push_back(
            make_error(ErrorType::IncompletePage, p, section::related_sources, -1, "", "page cites no sources"));

    check_text_links(view, page, section::summary, -1, page.summary, out);
    for (std::size_t i = 0; i < page.key_facts.size(); ++i) {
        check_text_links(view, page, section::key_facts, static_cast<int>(i), page.key_facts[i], out);
    }
    for (std::size_t i = 0; i < page.related_pages.size(); ++i) {
        const auto& link = page.related_pages[i];
        int item = static_cast<int>(i);
        if (!link.bracketed) {
            out.push_back(make_error(ErrorType::DanglingLink, p, section::related_pages, item, link.target,
                                     "related page '" + link.target + "' is not a wikilink"));
            continue;
        }
        auto target = std::string(link.target_path_text());
        if (!target_resolves(view, target)) {
            out.push_back(make_error(ErrorType::DanglingLink, p, section::related_pages, item, target,
                                     "related page [[" + target + "]] does not exist"));
        }
    }
    for (std::size_t i = 0; i < page.related_sources.size(); ++i) {
        const auto& link = page.related_sources[i];
        int item = static_cast<int>(i);
        if (link.is_canonical_source_ref()) {
            if (!view.has_source(*link.path())) {
                out.push_back(make_error(ErrorType::DanglingLink, p, section::related_sources, item, link.target,
                                         "cited digest [[" + link.target + "]] is not archived"));
            }
        } else {
            auto shown = link.bracketed ? "[[" + link.target + "]]" : link.target;
            out.push_back(make_error(ErrorType::MalformedRef, p, section::related_sources, item, link.target,
                                     "source citation " + shown + " is not of the form [[sources/digests/<slug>]]"));
        }
    }
}

void check_index(const WikiView& view, const std::string& directory, std::vector<ValidationError>& out) {
    const auto* idx = view.index(directory);
    if (idx) {
        for (const auto& link : idx->links()) {
            if (!view.page(link)) {
                out.push_back(make_error(ErrorType::IndexInconsistency, link, section::index, -1, "stale_entry",
                                         directory + "/_index.md lists " + link.str() + " but no such page exists"));
            }
        }
    }
    for (const auto& [path, _] : view.pages) {
        if (path.directory() != directory) continue;
        if (!idx || !idx->contains(path)) {
            out.push_back(make_error(ErrorType::IndexInconsistency, path, section::index, -1, "missing_entry",
                                     path.str() + " is not listed in " + directory + "/_index.md"));
        }
    }
}

std::string first_line_upper(std::string_view reply) {
    for (const auto& line : text::split_lines(reply)) {
        std::string cleaned;
        for (char c : line) {
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ' ')
                cleaned.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        }
        auto t = text::trim(cleaned);
        if (!t.empty()) return std::string(t);
    }
    return {};
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

std::string evidence_for(const WikiView& view, const WikiPage& page) {
    std::string out;
    for (const auto& rs : page.related_sources) {
        if (!rs.is_canonical_source_ref()) continue;
        auto it = view.sources.find(*rs.path());
        if (it == view.sources.end()) continue;
        out += "[[" + rs.target + "]]\n" + it->second->text + "\n\n";
    }
    return out;
}

std::string fact_list(const WikiPage& page) {
    std::string out = page.title + " (" + page.path.str() + ")\n";
    for (const auto& f : page.key_facts) out += "- " + f + "\n";
    return out;
}

}  // namespace

std::string_view to_string(ErrorType type) { return info(type).name; }
std::string_view display_name(ErrorType type) { return info(type).display; }
std::string_view detection_method(ErrorType type) { return info(type).detection; }

std::optional<ErrorType> error_type_from_string(std::string_view name) {
    for (const auto& t : kTypes) {
        if (t.name == name) return t.type;
    }
    return std::nullopt;
}

bool is_structural(ErrorType type) {
    return type != ErrorType::UnsupportedFact && type != ErrorType::CrossPageContradiction;
}

bool error_order(const ValidationError& a, const ValidationError& b) {
    static const Locus kNone{};
    const auto& la = a.locus ? *a.locus : kNone;
    const auto& lb = b.locus ? *b.locus : kNone;
    return std::tie(a.path, a.error_type, la, a.detail) < std::tie(b.path, b.error_type, lb, b.detail);
}

std::vector<ValidationError> validate_structural(const WikiSnapshot& snapshot, const UpdateSet& updates,
                                                 const std::set<SlugPath>& selected) {
    const bool full = updates.empty();
    auto view = WikiView::of(snapshot, &updates);

    std::vector<const WikiPage*> pages;
    std::set<std::string> dirs;
    if (full || !updates.deletions.empty()) {
        for (const auto& [_, p] : view.pages) pages.push_back(p);
    } else {
        std::set<SlugPath> seen;
        for (const auto& w : updates.page_writes) {
            if (seen.insert(w.path).second) {
                if (const auto* p = view.page(w.path)) pages.push_back(p);
            }
        }
    }
    if (full) {
        dirs = view.directories();
    } else {
        for (const auto& w : updates.page_writes) dirs.emplace(w.path.directory());
        for (const auto& d : updates.deletions) {
            if (!d.is_source()) dirs.emplace(d.directory());
        }
        for (const auto& i : updates.index_edits) dirs.insert(i.directory);
    }

    std::vector<ValidationError> out;
    for (const auto* p : pages) check_page(view, *p, out);
    for (const auto& d : dirs) {
        if (is_knowledge_directory(d)) check_index(view, d, out);
    }
    for (const auto& w : updates.page_writes) {
        const auto* existing = snapshot.find_page(w.path);
        if (!existing || selected.contains(w.path)) continue;
        if (render_page(*existing) == render_page(w)) continue;
        out.push_back(make_error(ErrorType::UnseenOverwrite, w.path, section::page, -1, "",
                                 "update rewrites " + w.path.str() + " which was not selected"));
    }
    std::sort(out.begin(), out.end(), error_order);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Verdict parse_entailment_verdict(std::string_view reply) {
    auto l = first_line_upper(reply);
    if (starts_with(l, "NOT_ENTAILED") || starts_with(l, "NOT ENTAILED")) return Verdict::no;
    if (starts_with(l, "ENTAILED")) return Verdict::yes;
    return Verdict::unknown;
}

Verdict parse_consistency_verdict(std::string_view reply) {
    auto l = first_line_upper(reply);
    if (starts_with(l, "CONTRADICTION")) return Verdict::yes;
    if (starts_with(l, "CONSISTENT")) return Verdict::no;
    return Verdict::unknown;
}

std::vector<ValidationError> validate_content(const WikiSnapshot& snapshot, const UpdateSet& updates, LlmPort& llm,
                                              const ContentSamplingConfig& sampling) {
    auto view = WikiView::of(snapshot, &updates);
    std::vector<SlugPath> targets;
    for (const auto& w : updates.page_writes) targets.push_back(w.path);
    return validate_content_paths(view, targets, llm, sampling);
}

std::vector<ValidationError> validate_content_paths(const WikiView& view, const std::vector<SlugPath>& pages,
                                                    LlmPort& llm, const ContentSamplingConfig& sampling) {
    static const std::string kFactSystem =
        "You verify whether a fact is supported by source text. Reply with ENTAILED or NOT_ENTAILED on the first "
        "line, optionally followed by a short justification.";
    static const std::string kPairSystem =
        "You check two encyclopedia pages for conflicting entity attributes, dates, or relations. Reply with "
        "CONSISTENT or CONTRADICTION on the first line, optionally followed by a short justification.";

    std::set<SlugPath> targets(pages.begin(), pages.end());
    std::set<std::pair<SlugPath, SlugPath>> checked_pairs;
    std::vector<ValidationError> out;
    for (const auto& path : targets) {
        const auto* page = view.page(path);
        if (!page) continue;

        auto evidence = evidence_for(view, *page);
        if (!evidence.empty()) {
            auto n = page->key_facts.size();
            if (sampling.max_facts_per_page > 0) n = std::min(n, sampling.max_facts_per_page);
            for (std::size_t i = 0; i < n; ++i) {
                const auto& fact = page->key_facts[i];
                auto reply = llm.complete(LlmRequest::make(
                    Purpose::verify_fact, kFactSystem,
                    "Page: " + path.str() + "\n\nCited source digests:\n" + evidence + "Fact: " + fact +
                        "\n\nIs the fact entailed by the cited digests?"));
                if (parse_entailment_verdict(reply) == Verdict::no) {
                    out.push_back(make_error(ErrorType::UnsupportedFact, path, section::key_facts, static_cast<int>(i),
                                             fact, "fact is not supported by the cited digests: " + fact));
                }
            }
        }

        std::size_t pairs = 0;
        for (const auto& rp : page->related_pages) {
            if (pairs >= sampling.pairs_per_page) break;
            auto other_path = rp.path();
            if (!other_path || *other_path == path) continue;
            const auto* other = view.page(*other_path);
            if (!other) continue;
            auto key = std::minmax(path, *other_path);
            if (!checked_pairs.insert({key.first, key.second}).second) continue;
            ++pairs;
            const auto* a = view.page(key.first);
            const auto* b = view.page(key.second);
            auto reply = llm.complete(LlmRequest::make(Purpose::consistency, kPairSystem,
                                                       "Page A:\n" + fact_list(*a) + "\nPage B:\n" + fact_list(*b) +
                                                           "\nDo these pages contradict each other?"));
            if (parse_consistency_verdict(reply) == Verdict::yes) {
                out.push_back(make_error(ErrorType::CrossPageContradiction, key.first, section::pair, -1,
                                         key.second.str(),
                                         key.first.str() + " contradicts " + key.second.str()));
            }
        }
    }
    std::sort(out.begin(), out.end(), error_order);
    return out;
}

}  // namespace llmwiki
