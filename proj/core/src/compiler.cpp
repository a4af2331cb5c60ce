#include "llmwiki/compiler.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "llmwiki/codec.hpp"
#include "llmwiki/errors.hpp"
#include "llmwiki/llm_port.hpp"
#include "llmwiki/repair.hpp"
#include "llmwiki/text.hpp"
#include "llmwiki/wikilink.hpp"

namespace llmwiki {

namespace {

using nlohmann::json;

const std::string kSelectSystem =
    "You maintain a structured wiki. Given the wiki index and a new passage, list the existing pages that the "
    "passage should update or that new pages should link to. Reply with one page path (directory/Slug) per "
    "line, most relevant first.";

const std::string kCompileSystem =
    "You compile a source passage into structured wiki pages.\n"
    "Return every created or modified file as a block that starts with the line `=== FILE: <path> ===` "
    "followed by the complete file content. Page paths look like `people/Ernest-I-Prince-of-Anhalt-Dessau.md`; "
    "directory indices are `<directory>/_index.md`.\n"
    "Page format: YAML frontmatter (type, created, updated, aliases, tags), `# Title`, a `> ` one-line "
    "summary, then the sections `## Key Facts`, `## Related Pages` and `## Related Sources`.\n"
    "Link pages as [[directory/Slug]]. Cite the passage as [[sources/digests/<slug>]] under Related Sources.\n"
    "Only modify the existing pages shown to you. List every new page in its directory index.";

const std::string kDigestSystem =
    "Summarize the passage as a short source digest: the entities it mentions and the facts it states about "
    "them. Reply with the digest text only.";

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::optional<std::string> file_header(std::string_view line) {
    auto t = text::trim(line);
    if (t.substr(0, 3) != "===" || !ends_with(t, "===") || t.size() < 7) return std::nullopt;
    auto inner = text::trim(t.substr(3, t.size() - 6));
    if (inner.substr(0, 5) != "FILE:") return std::nullopt;
    return std::string(text::trim(inner.substr(5)));
}

std::string strip_fences(const std::vector<std::string>& lines) {
    std::size_t b = 0, e = lines.size();
    while (b < e && text::trim(lines[b]).empty()) ++b;
    while (e > b && text::trim(lines[e - 1]).empty()) --e;
    if (b < e && text::trim(lines[b]).substr(0, 3) == "```") ++b;
    if (e > b && text::trim(lines[e - 1]) == "```") --e;
    std::string out;
    for (std::size_t i = b; i < e; ++i) out += lines[i] + "\n";
    return out;
}

std::optional<SlugPath> parse_selected_line(std::string_view line) {
    auto t = text::trim(line);
    auto links = extract_wikilinks(t);
    if (!links.empty()) return links.front();
    while (!t.empty() && (t.front() == '-' || t.front() == '*' || t.front() == '.' ||
                          std::isdigit(static_cast<unsigned char>(t.front())) || t.front() == ')' || t.front() == ' ')) {
        t.remove_prefix(1);
    }
    t = text::trim(t.substr(0, t.find_first_of(" \t")));
    if (ends_with(t, ".md")) t.remove_suffix(3);
    return SlugPath::parse(t);
}

// Adds catalog lines for knowledge directories the global index lacks.
void ensure_catalog(const WikiSnapshot& snapshot, UpdateSet& u) {
    auto view = WikiView::of(snapshot, &u);
    GlobalIndex g = u.global_edit ? *u.global_edit : snapshot.global();
    bool changed = false;
    for (const auto& dir : view.directories()) {
        if (!is_knowledge_directory(dir)) continue;
        bool listed = std::any_of(g.catalog.begin(), g.catalog.end(), [&](const auto& c) { return c.directory == dir; });
        if (listed) continue;
        g.catalog.push_back({dir, directory_title(dir)});
        changed = true;
    }
    if (changed) u.global_edit = std::move(g);
}

json paths_json(const std::vector<SlugPath>& paths) {
    json a = json::array();
    for (const auto& p : paths) a.push_back(p.str());
    return a;
}

}  // namespace

CompileState make_state(WikiSnapshot snapshot, ErrorBook book) {
    CompileState s;
    s.index = SearchIndex::build(snapshot);
    s.snapshot = std::move(snapshot);
    s.book = std::move(book);
    return s;
}

std::vector<Batch> ingest_corpus(std::string_view jsonl, std::size_t batch_size) {
    if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
    std::vector<Batch> batches;
    std::set<std::string> ids;
    std::size_t line_no = 0;
    std::istringstream in{std::string(jsonl)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw CorpusFormatError(line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!rec.is_object()) throw CorpusFormatError(line_no, "record is not an object");
        for (const char* key : {"id", "title", "text"}) {
            if (!rec.contains(key) || !rec[key].is_string())
                throw CorpusFormatError(line_no, std::string("missing string field '") + key + "'");
        }
        Passage p{rec["id"].get<std::string>(), rec["title"].get<std::string>(), rec["text"].get<std::string>()};
        if (!ids.insert(p.source_id).second) throw CorpusFormatError(line_no, "duplicate id '" + p.source_id + "'");
        if (batches.empty() || batches.back().size() == batch_size) batches.emplace_back();
        batches.back().push_back(std::move(p));
    }
    return batches;
}

std::vector<Batch> ingest_corpus_file(const std::filesystem::path& file, std::size_t batch_size) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open corpus " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ingest_corpus(ss.str(), batch_size);
}

std::string index_digest(const WikiSnapshot& snapshot, std::size_t budget) {
    std::string full = "=== index.md ===\n" + render_global_index(snapshot.global());
    for (const auto& [dir, idx] : snapshot.indices()) full += "\n=== " + dir + "/_index.md ===\n" + render_index(idx);
    if (full.size() <= budget) return full;

    std::string compact = "=== index.md ===\n";
    for (const auto& c : snapshot.global().catalog) compact += "- " + c.directory + "/\n";
    for (const auto& [dir, idx] : snapshot.indices()) {
        compact += "\n=== " + dir + "/_index.md ===\n";
        for (const auto& section : idx.sections) {
            for (const auto& e : section.entries) {
                compact += "- [[" + e.link.str() + "]]";
                if (!e.aliases.empty()) compact += " (" + text::join(e.aliases, ", ") + ")";
                compact += "\n";
            }
        }
    }
    return compact;
}

std::vector<SlugPath> select_pages(const Passage& passage, const CompileState& state, LlmPort& llm,
                                   const CompilerConfig& config) {
    if (state.snapshot.pages().empty()) return {};
    auto user = "Wiki index:\n" + index_digest(state.snapshot, config.index_prompt_budget) + "\nPassage: " +
                passage.title + "\n" + passage.text + "\n\nList at most " + std::to_string(config.k) + " pages.";
    auto reply = llm.complete(LlmRequest::make(Purpose::select, kSelectSystem, user));
    std::vector<SlugPath> out;
    for (const auto& line : text::split_lines(reply)) {
        auto p = parse_selected_line(line);
        if (!p || !state.snapshot.find_page(*p)) continue;
        if (std::find(out.begin(), out.end(), *p) != out.end()) continue;
        out.push_back(*p);
        if (out.size() == config.k) break;
    }
    return out;
}

SlugPath digest_path_for(const Passage& passage) { return SlugPath(kDigestDir, source_slug(passage.source_id)); }
SlugPath article_path_for(const Passage& passage) { return SlugPath(kArticleDir, source_slug(passage.source_id)); }

UpdateSet parse_file_blocks(std::string_view response) {
    struct Block {
        std::string path;
        std::vector<std::string> lines;
    };
    std::vector<Block> blocks;
    for (const auto& line : text::split_lines(response)) {
        if (auto h = file_header(line)) {
            blocks.push_back({*h, {}});
        } else if (!blocks.empty()) {
            blocks.back().lines.push_back(line);
        }
    }
    if (blocks.empty()) throw MalformedLlmOutput("reply contains no '=== FILE: <path> ===' block");

    UpdateSet u;
    for (const auto& b : blocks) {
        auto body = strip_fences(b.lines);
        std::string_view path = b.path;
        if (path.substr(0, 2) == "./") path.remove_prefix(2);
        try {
            if (path == "index.md") {
                u.global_edit = parse_global_index(body);
                continue;
            }
            if (ends_with(path, "/_index.md")) {
                auto dir = path.substr(0, path.size() - 10);
                if (!is_knowledge_directory(dir)) throw MalformedLlmOutput("index block for invalid directory " + b.path);
                std::erase_if(u.index_edits, [&](const DirectoryIndex& i) { return i.directory == dir; });
                u.index_edits.push_back(parse_index(body, dir));
                continue;
            }
            if (ends_with(path, ".md")) path.remove_suffix(3);
            auto p = SlugPath::parse(path);
            if (!p) throw MalformedLlmOutput("invalid file path " + b.path);
            if (p->is_source()) continue;  // archive records are produced by the compiler itself
            std::erase_if(u.page_writes, [&](const WikiPage& w) { return w.path == *p; });
            u.page_writes.push_back(parse_page(body, *p));
        } catch (const FrontmatterSyntaxError& e) {
            throw MalformedLlmOutput("block " + b.path + ": " + e.what());
        }
    }
    return u;
}

std::string fallback_digest(std::string_view passage_text) {
    std::string out;
    int sentences = 0;
    auto t = text::trim(passage_text);
    for (std::size_t i = 0; i < t.size(); ++i) {
        out.push_back(t[i]);
        char c = t[i];
        if ((c == '.' || c == '!' || c == '?') && (i + 1 == t.size() || std::isspace(static_cast<unsigned char>(t[i + 1])))) {
            if (++sentences == 3) break;
        }
    }
    for (auto& c : out) {
        if (c == '\n' || c == '\r' || c == '\t') c = ' ';
    }
    return std::string(text::trim(out));
}

CompileOutput compile_wiki_pages(const Passage& passage, const std::vector<const WikiPage*>& selected,
                                 const std::vector<std::string>& constraints, LlmPort& llm,
                                 const CompilerConfig& config, const WikiSnapshot* snapshot) {
    auto digest_path = digest_path_for(passage);
    std::string user;
    if (snapshot) user += "Wiki index:\n" + index_digest(*snapshot, config.index_prompt_budget) + "\n";
    user += "Selected pages:\n";
    if (selected.empty()) user += "(none)\n";
    for (const auto* p : selected) user += "=== FILE: " + p->path.str() + ".md ===\n" + render_page(*p) + "\n";
    user += "Passage (cite as [[" + digest_path.str() + "]]):\n# " + passage.title + "\n" + passage.text + "\n";
    if (!constraints.empty()) {
        user += "\nConstraints learned from past errors:\n";
        for (const auto& c : constraints) user += "- " + c + "\n";
    }

    UpdateSet updates;
    std::string last_problem;
    bool parsed = false;
    for (std::size_t attempt = 0; attempt <= config.compile_retry && !parsed; ++attempt) {
        auto reply = llm.complete(LlmRequest::make(Purpose::compile, kCompileSystem, user));
        try {
            updates = parse_file_blocks(reply);
            parsed = true;
        } catch (const MalformedLlmOutput& e) {
            last_problem = e.what();
        }
    }
    if (!parsed) throw MalformedLlmOutput("passage " + passage.source_id + ": " + last_problem);

    std::string digest;
    try {
        digest = std::string(text::trim(llm.complete(LlmRequest::make(
            Purpose::digest, kDigestSystem, "Passage: " + passage.title + "\n" + passage.text))));
    } catch (const LlmError&) {
        digest.clear();
    }
    if (digest.empty()) digest = fallback_digest(passage.text);

    updates.source_writes.clear();
    updates.source_writes.push_back({SourceRecord::Kind::digest, digest_path, passage.source_id, digest});
    updates.source_writes.push_back(
        {SourceRecord::Kind::article, article_path_for(passage), passage.source_id, std::string(text::trim(passage.text))});
    return {std::move(updates), std::move(user)};
}

CompileState compile_batch(CompileState state, const Batch& batch, LlmPort& llm, const CompilerConfig& config) {
    const int batch_no = static_cast<int>(state.batches_done) + 1;
    for (const auto& passage : batch) {
        json event{{"event", "passage"}, {"batch", batch_no}, {"source_id", passage.source_id}};
        try {
            auto constraints = active_constraints(state.book, config.constraint_cap);
            auto selected = select_pages(passage, state, llm, config);
            std::vector<const WikiPage*> selected_pages;
            for (const auto& p : selected) selected_pages.push_back(state.snapshot.find_page(p));

            auto out = compile_wiki_pages(passage, selected_pages, constraints, llm, config, &state.snapshot);
            ensure_catalog(state.snapshot, out.updates);

            std::set<SlugPath> selected_set(selected.begin(), selected.end());
            auto structural = validate_structural(state.snapshot, out.updates, selected_set);
            auto content = validate_content(state.snapshot, out.updates, llm, config.sampling);
            auto errors = structural;
            errors.insert(errors.end(), content.begin(), content.end());
            for (auto& e : errors) e.batch_no = batch_no;
            if (!errors.empty()) state.book = record_errors(std::move(state.book), errors, batch_no, llm);

            auto [fixed, outcome] = code_auto_fix(state.snapshot, out.updates, structural);
            state.snapshot = apply_updates(state.snapshot, fixed);
            ++state.articles_since_fix;

            event["selected"] = paths_json(selected);
            event["constraints"] = constraints.size();
            event["structural_errors"] = structural.size();
            event["content_errors"] = content.size();
            event["fixed"] = outcome.fixed.size();
            event["residual"] = outcome.residual.size();
            event["touched"] = fixed.touched();
            event["fixes"] = outcome.log;
        } catch (const Error& e) {
            event["event"] = "skipped";
            event["reason"] = e.what();
        }
        state.log.push_back(std::move(event));
    }

    ++state.batches_done;
    bool periodic = state.articles_since_fix >= config.periodic_fix_every_n_articles ||
                    (config.revalidate_every_batches > 0 && state.batches_done % config.revalidate_every_batches == 0);
    if (periodic) {
        json event{{"event", "maintenance"}, {"batch", batch_no}};
        auto fix = llm_periodic_fix(state.snapshot, state.book, llm);
        event["rewritten"] = fix.updates.page_writes.size();
        event["skipped"] = fix.skipped;
        if (!fix.updates.empty()) {
            try {
                auto [next, outcome] = apply_checked(state.snapshot, fix.updates);
                state.snapshot = std::move(next);
                event["fixes"] = outcome.log;
            } catch (const Error& e) {
                event["apply_error"] = e.what();
            }
        }
        try {
            state.book = verify_and_close(std::move(state.book), state.snapshot, llm);
        } catch (const Error& e) {
            event["verify_error"] = e.what();
        }
        event["open_entries"] = state.book.open_count();
        state.articles_since_fix = 0;
        state.log.push_back(std::move(event));
    }
    state.index = SearchIndex::build(state.snapshot);
    return state;
}

}  // namespace llmwiki
