#include "llmwiki/repair.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "llmwiki/codec.hpp"
#include "llmwiki/compiler.hpp"
#include "llmwiki/errors.hpp"
#include "llmwiki/llm_port.hpp"
#include "llmwiki/text.hpp"
#include "llmwiki/wikilink.hpp"

namespace llmwiki {

namespace {

using nlohmann::json;

std::string_view strip_md(std::string_view s) {
    s = text::trim(s);
    if (s.size() > 3 && s.substr(s.size() - 3) == ".md") s.remove_suffix(3);
    return s;
}

std::string last_segment(std::string_view target) {
    target = strip_md(target.substr(0, target.find('|')));
    auto slash = target.rfind('/');
    return std::string(slash == std::string_view::npos ? target : target.substr(slash + 1));
}

std::string display_text(const RawLink& raw) {
    if (!raw.label.empty()) return raw.label;
    auto s = last_segment(raw.target);
    std::replace(s.begin(), s.end(), '-', ' ');
    return s;
}

// Unique page elsewhere in the wiki carrying the same slug; never guesses
// between two candidates.
std::optional<SlugPath> resolve_by_slug(const WikiView& view, std::string_view target) {
    if (auto exact = SlugPath::parse(strip_md(target.substr(0, target.find('|')))); exact && view.resolves(*exact))
        return exact;
    auto slug = last_segment(target);
    if (!is_valid_slug(slug)) return std::nullopt;
    std::optional<SlugPath> found;
    for (const auto& [path, _] : view.pages) {
        if (path.slug() != slug) continue;
        if (found) return std::nullopt;
        found = path;
    }
    return found;
}

bool resolves(const WikiView& view, std::string_view target) {
    auto p = SlugPath::parse(target);
    return p && view.resolves(*p);
}

class PageFixer {
public:
    PageFixer(const WikiView& view, std::vector<json>& log) : view_(view), log_(log) {}

    bool fix(WikiPage& page) {
        changed_ = false;
        page.summary = fix_text(page, page.summary);
        for (auto& f : page.key_facts) f = fix_text(page, f);
        fix_related_pages(page);
        fix_related_sources(page);
        return changed_;
    }

private:
    void record(const WikiPage& page, std::string action, const std::string& target, const std::string& result = {}) {
        json e{{"layer", 1}, {"action", std::move(action)}, {"path", page.path.str()}, {"target", target}};
        if (!result.empty()) e["result"] = result;
        log_.push_back(std::move(e));
        changed_ = true;
    }

    std::string fix_text(const WikiPage& page, const std::string& body) {
        auto links = scan_raw_links(body);
        if (links.empty()) return body;
        std::string out;
        std::size_t pos = 0;
        for (const auto& raw : links) {
            out.append(body, pos, raw.offset - pos);
            pos = raw.offset + raw.length;
            if (resolves(view_, raw.target)) {
                out.append(body, raw.offset, raw.length);
                continue;
            }
            if (auto to = resolve_by_slug(view_, raw.target)) {
                out += "[[" + to->str() + (raw.label.empty() ? "" : "|" + raw.label) + "]]";
                record(page, "rewrite_link", raw.target, to->str());
            } else {
                auto shown = display_text(raw);
                out += shown;
                record(page, "demote_link", raw.target, shown);
            }
        }
        out.append(body, pos);
        return out;
    }

    void fix_related_pages(WikiPage& page) {
        std::vector<RelatedLink> kept;
        std::set<std::string> seen;
        for (auto link : page.related_pages) {
            auto target = std::string(link.target_path_text());
            if (!link.bracketed || !resolves(view_, target)) {
                if (auto to = resolve_by_slug(view_, target)) {
                    record(page, "rewrite_related", link.target, to->str());
                    link = RelatedLink::to(*to, link.note);
                } else {
                    record(page, "drop_related", link.target);
                    page.parse_notes.push_back({ParseNote::Kind::RemovedReference, "related page " + link.target});
                    continue;
                }
            }
            if (!seen.insert(std::string(link.target_path_text())).second) {
                record(page, "drop_duplicate_related", link.target);
                continue;
            }
            kept.push_back(std::move(link));
        }
        page.related_pages = std::move(kept);
    }

    void fix_related_sources(WikiPage& page) {
        std::vector<RelatedLink> kept;
        std::set<std::string> seen;
        for (auto link : page.related_sources) {
            if (!link.is_canonical_source_ref() || !view_.has_source(*link.path())) {
                auto slug = source_slug(last_segment(link.target));
                std::optional<SlugPath> digest;
                if (is_valid_slug(slug)) {
                    SlugPath candidate(kDigestDir, slug);
                    if (view_.has_source(candidate)) digest = candidate;
                }
                if (digest) {
                    record(page, "canonicalize_ref", link.target, digest->str());
                    link = RelatedLink::to(*digest, link.note);
                } else {
                    record(page, "remove_ref", link.target);
                    page.parse_notes.push_back({ParseNote::Kind::RemovedReference, "source " + link.target});
                    continue;
                }
            }
            if (!seen.insert(link.target).second) {
                record(page, "drop_duplicate_ref", link.target);
                continue;
            }
            kept.push_back(std::move(link));
        }
        page.related_sources = std::move(kept);
    }

    const WikiView& view_;
    std::vector<json>& log_;
    bool changed_ = false;
};

DirectoryIndex reconcile_index(const WikiView& view, const std::string& directory, std::vector<json>& log) {
    DirectoryIndex idx;
    if (const auto* existing = view.index(directory)) {
        idx = *existing;
    } else {
        idx.directory = directory;
    }
    idx.parse_notes.clear();
    std::set<SlugPath> listed;
    for (auto& section : idx.sections) {
        std::vector<IndexEntry> kept;
        for (auto& e : section.entries) {
            if (!view.page(e.link)) {
                log.push_back({{"layer", 1}, {"action", "index_remove"}, {"path", e.link.str()}});
                continue;
            }
            if (!listed.insert(e.link).second) continue;
            kept.push_back(std::move(e));
        }
        section.entries = std::move(kept);
    }
    std::erase_if(idx.sections, [](const IndexSection& s) { return s.entries.empty(); });

    std::vector<IndexEntry> added;
    for (const auto& [path, page] : view.pages) {
        if (path.directory() != directory || listed.contains(path)) continue;
        added.push_back(make_index_entry(*page));
        log.push_back({{"layer", 1}, {"action", "index_add"}, {"path", path.str()}});
    }
    if (!added.empty()) {
        auto it = std::find_if(idx.sections.begin(), idx.sections.end(),
                               [](const IndexSection& s) { return s.heading == "Uncategorized"; });
        if (it == idx.sections.end()) {
            idx.sections.push_back({"Uncategorized", {}});
            it = std::prev(idx.sections.end());
        }
        for (auto& e : added) it->entries.push_back(std::move(e));
    }
    return idx;
}

std::set<SlugPath> written_paths(const UpdateSet& u) {
    std::set<SlugPath> out;
    for (const auto& w : u.page_writes) out.insert(w.path);
    return out;
}

}  // namespace

std::pair<UpdateSet, RepairOutcome> code_auto_fix(const WikiSnapshot& snapshot, const UpdateSet& updates,
                                                  const std::vector<ValidationError>& errors) {
    RepairOutcome outcome;
    UpdateSet out = updates;

    std::set<SlugPath> stripped;
    for (const auto& e : errors) {
        if (e.error_type == ErrorType::UnseenOverwrite) stripped.insert(e.path);
    }
    if (!stripped.empty()) {
        std::erase_if(out.page_writes, [&](const WikiPage& w) { return stripped.contains(w.path); });
        for (const auto& p : stripped) {
            outcome.log.push_back({{"layer", 1}, {"action", "strip_write"}, {"path", p.str()}});
        }
    }

    std::set<SlugPath> link_pages;
    std::set<std::string> index_dirs;
    for (const auto& e : errors) {
        if (e.error_type == ErrorType::DanglingLink || e.error_type == ErrorType::MalformedRef) {
            link_pages.insert(e.path);
        } else if (e.error_type == ErrorType::IndexInconsistency) {
            index_dirs.emplace(e.path.directory());
        }
    }

    std::set<SlugPath> deleted(out.deletions.begin(), out.deletions.end());
    for (const auto& path : link_pages) {
        if (deleted.contains(path)) continue;
        auto view = WikiView::of(snapshot, &out);
        const auto* current = view.page(path);
        if (!current) continue;
        WikiPage page = *current;
        PageFixer fixer(view, outcome.log);
        if (!fixer.fix(page)) continue;
        if (auto* w = out.find_page_write(path)) {
            // A verbatim rewrite of an existing page is not a real edit; once the
            // fix changes it, the page becomes an extra write like any other.
            const auto* existing = snapshot.find_page(path);
            if (existing && render_page(*existing) == render_page(*w)) outcome.extra_writes.push_back(path);
            *w = std::move(page);
        } else {
            out.page_writes.push_back(std::move(page));
            outcome.extra_writes.push_back(path);
        }
    }

    for (const auto& dir : index_dirs) {
        if (!is_knowledge_directory(dir)) continue;
        auto view = WikiView::of(snapshot, &out);
        auto idx = reconcile_index(view, dir, outcome.log);
        const auto* before = view.index(dir);
        if (before && render_index(*before) == render_index(idx)) continue;
        if (auto* edit = out.find_index_edit(dir)) {
            *edit = std::move(idx);
        } else {
            out.index_edits.push_back(std::move(idx));
        }
    }

    for (const auto& e : errors) {
        bool layer1 = e.error_type == ErrorType::DanglingLink || e.error_type == ErrorType::MalformedRef ||
                      e.error_type == ErrorType::IndexInconsistency || e.error_type == ErrorType::UnseenOverwrite;
        (layer1 ? outcome.fixed : outcome.residual).push_back(e);
    }
    outcome.updates_applied = out;
    return {std::move(out), std::move(outcome)};
}

std::pair<WikiSnapshot, RepairOutcome> apply_checked(const WikiSnapshot& snapshot, const UpdateSet& updates) {
    auto errors = validate_structural(snapshot, updates, written_paths(updates));
    auto [fixed, outcome] = code_auto_fix(snapshot, updates, errors);
    if (fixed.empty()) return {snapshot, std::move(outcome)};
    return {apply_updates(snapshot, fixed), std::move(outcome)};
}

std::vector<SlugPath> periodic_fix_targets(const WikiSnapshot& snapshot, const ErrorBook& book) {
    std::set<SlugPath> out;
    for (const auto& e : book.entries) {
        if (e.status != ErrorBookEntry::Status::open) continue;
        if (e.error_type != ErrorType::IncompletePage && e.error_type != ErrorType::UnsupportedFact &&
            e.error_type != ErrorType::CrossPageContradiction)
            continue;
        for (const auto& p : e.affected_paths) {
            if (snapshot.find_page(p)) out.insert(p);
        }
    }
    return {out.begin(), out.end()};
}

PeriodicFixResult llm_periodic_fix(const WikiSnapshot& snapshot, const ErrorBook& book, LlmPort& llm) {
    static const std::string kSystem =
        "You repair one page of a structured wiki. Return the corrected page as a block starting with the line "
        "`=== FILE: <path> ===` followed by the complete page markup (frontmatter, title, summary, Key Facts, "
        "Related Pages, Related Sources). Keep only facts supported by the cited source digests. You may add "
        "blocks for new pages the page needs.";

    PeriodicFixResult result;
    std::set<SlugPath> written;
    for (const auto& target : periodic_fix_targets(snapshot, book)) {
        const auto* page = snapshot.find_page(target);
        std::string problems;
        std::vector<std::string> rules;
        for (const auto& e : book.entries) {
            if (e.status != ErrorBookEntry::Status::open) continue;
            if (std::find(e.affected_paths.begin(), e.affected_paths.end(), target) == e.affected_paths.end()) continue;
            problems += "- [" + std::string(to_string(e.error_type)) + "] " + e.phenomenon + "\n";
            if (std::find(rules.begin(), rules.end(), e.constraint_rule) == rules.end()) rules.push_back(e.constraint_rule);
        }
        std::string digests;
        for (const auto& rs : page->related_sources) {
            if (!rs.is_canonical_source_ref()) continue;
            if (const auto* src = snapshot.find_source(*rs.path())) digests += "[[" + rs.target + "]]\n" + src->text + "\n\n";
        }
        std::string user = "=== FILE: " + target.str() + ".md ===\n" + render_page(*page) + "\nCited source digests:\n" +
                           (digests.empty() ? "(none)\n" : digests) + "\nOpen problems:\n" + problems +
                           "\nConstraint rules:\n";
        for (const auto& r : rules) user += "- " + r + "\n";

        UpdateSet parsed;
        try {
            auto reply = llm.complete(LlmRequest::make(Purpose::periodic_fix, kSystem, user));
            try {
                parsed = parse_file_blocks(reply);
            } catch (const MalformedLlmOutput&) {
                parsed = {};
                parsed.page_writes.push_back(parse_page(reply, target));
                if (parsed.page_writes.back().title.empty()) throw MalformedLlmOutput("reply has no page block");
            }
        } catch (const Error& e) {  // port failures and unusable replies alike
            result.skipped.push_back(target.str() + ": " + e.what());
            result.log.push_back({{"layer", 2}, {"action", "skip"}, {"path", target.str()}, {"reason", e.what()}});
            continue;
        }

        bool got_target = false;
        for (auto& w : parsed.page_writes) {
            if (written.contains(w.path)) continue;
            if (w.path == target) {
                got_target = true;
            } else if (snapshot.find_page(w.path)) {
                result.log.push_back({{"layer", 2}, {"action", "ignore_foreign_page"}, {"path", w.path.str()}});
                continue;
            } else {
                result.log.push_back({{"layer", 2}, {"action", "create_page"}, {"path", w.path.str()}});
            }
            written.insert(w.path);
            result.updates.page_writes.push_back(std::move(w));
        }
        if (got_target) {
            result.log.push_back({{"layer", 2}, {"action", "rewrite_page"}, {"path", target.str()}});
        } else {
            result.skipped.push_back(target.str() + ": reply has no block for this page");
            result.log.push_back({{"layer", 2}, {"action", "skip"}, {"path", target.str()}, {"reason", "no block for page"}});
        }
    }
    return result;
}

FinalizeResult finalize(const WikiSnapshot& snapshot, ErrorBook book, LlmPort& llm, int batch_no) {
    FinalizeResult r{snapshot, std::move(book), 0, {}, {}};
    auto content_scope = periodic_fix_targets(r.snapshot, r.book);

    for (int round = 1; round <= kFinalizeRounds; ++round) {
        r.rounds = round;
        auto structural = validate_structural(r.snapshot, {}, {});
        r.structural_counts.push_back(structural.size());
        std::vector<ValidationError> content;
        if (!content_scope.empty()) content = validate_content_paths(WikiView::of(r.snapshot), content_scope, llm);
        r.log.push_back({{"finalize_round", round},
                         {"structural_errors", structural.size()},
                         {"content_errors", content.size()}});
        if (structural.empty() && content.empty()) break;

        auto all = structural;
        all.insert(all.end(), content.begin(), content.end());
        for (auto& e : all) e.batch_no = batch_no;
        r.book = record_errors(std::move(r.book), all, batch_no, llm);

        std::set<SlugPath> touched;
        auto [code_updates, code_outcome] = code_auto_fix(r.snapshot, {}, structural);
        for (auto& l : code_outcome.log) r.log.push_back(std::move(l));
        if (!code_updates.empty()) {
            for (const auto& w : code_updates.page_writes) touched.insert(w.path);
            r.snapshot = apply_updates(r.snapshot, code_updates);
        }

        // Layer 2 only sees the patterns that recurred in this round.
        ErrorBook focus = r.book;
        std::map<std::string, std::set<SlugPath>> seen;
        for (const auto& e : code_outcome.residual) seen[entry_id(e.error_type, error_signature(e))].insert(e.path);
        for (const auto& e : content) seen[entry_id(e.error_type, error_signature(e))].insert(e.path);
        for (auto& entry : focus.entries) {
            auto it = seen.find(entry.id);
            if (it == seen.end()) {
                entry.status = ErrorBookEntry::Status::closed;
            } else {
                entry.affected_paths.assign(it->second.begin(), it->second.end());
            }
        }
        auto periodic = llm_periodic_fix(r.snapshot, focus, llm);
        for (auto& l : periodic.log) r.log.push_back(std::move(l));
        if (!periodic.updates.empty()) {
            for (const auto& w : periodic.updates.page_writes) touched.insert(w.path);
            auto [next, outcome] = apply_checked(r.snapshot, periodic.updates);
            for (auto& l : outcome.log) r.log.push_back(std::move(l));
            r.snapshot = std::move(next);
        }
        content_scope.clear();
        for (const auto& p : touched) {
            if (r.snapshot.find_page(p)) content_scope.push_back(p);
        }
    }
    r.book = verify_and_close(std::move(r.book), r.snapshot, llm);
    return r;
}

}  // namespace llmwiki
