#include "llmwiki/snapshot.hpp"

#include <algorithm>

#include "llmwiki/codec.hpp"
#include "llmwiki/errors.hpp"

namespace llmwiki {

WikiSnapshot::WikiSnapshot(PageMap pages, IndexMap indices, GlobalIndex global, SourceMap sources,
                           std::uint64_t revision)
    : pages_(std::move(pages)),
      indices_(std::move(indices)),
      global_(std::move(global)),
      sources_(std::move(sources)),
      revision_(revision) {
    for (const auto& [k, v] : pages_) {
        if (k != v.path) throw InvalidUpdateError("page key " + k.str() + " holds " + v.path.str());
        if (k.is_source()) throw InvalidUpdateError("page stored under sources/: " + k.str());
    }
    for (const auto& [k, v] : indices_) {
        if (k != v.directory) throw InvalidUpdateError("index key " + k + " holds " + v.directory);
    }
    for (const auto& [k, v] : sources_) {
        if (k != v.path) throw InvalidUpdateError("source key " + k.str() + " holds " + v.path.str());
    }
}

const WikiPage* WikiSnapshot::find_page(const SlugPath& path) const {
    auto it = pages_.find(path);
    return it == pages_.end() ? nullptr : &it->second;
}

const DirectoryIndex* WikiSnapshot::find_index(const std::string& directory) const {
    auto it = indices_.find(directory);
    return it == indices_.end() ? nullptr : &it->second;
}

const SourceRecord* WikiSnapshot::find_source(const SlugPath& path) const {
    auto it = sources_.find(path);
    return it == sources_.end() ? nullptr : &it->second;
}

std::set<std::string> WikiSnapshot::directories() const {
    std::set<std::string> out;
    for (const auto& [k, _] : pages_) out.emplace(k.directory());
    for (const auto& [k, _] : indices_) out.insert(k);
    return out;
}

bool UpdateSet::empty() const {
    return page_writes.empty() && index_edits.empty() && source_writes.empty() && !global_edit && deletions.empty();
}

namespace {
std::vector<std::string> all_paths(const UpdateSet& u) {
    std::vector<std::string> out;
    for (const auto& p : u.page_writes) out.push_back(p.path.str());
    for (const auto& i : u.index_edits) out.push_back(i.directory + "/_index.md");
    for (const auto& s : u.source_writes) out.push_back(s.path.str());
    if (u.global_edit) out.emplace_back("index.md");
    for (const auto& d : u.deletions) out.push_back(d.str());
    return out;
}
}  // namespace

std::vector<std::string> UpdateSet::touched() const {
    auto out = all_paths(*this);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::string> UpdateSet::conflicts() const {
    auto out = all_paths(*this);
    std::sort(out.begin(), out.end());
    std::vector<std::string> dup;
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i] == out[i - 1] && (dup.empty() || dup.back() != out[i])) dup.push_back(out[i]);
    }
    return dup;
}

const WikiPage* UpdateSet::find_page_write(const SlugPath& path) const {
    for (const auto& p : page_writes) {
        if (p.path == path) return &p;
    }
    return nullptr;
}

WikiPage* UpdateSet::find_page_write(const SlugPath& path) {
    return const_cast<WikiPage*>(std::as_const(*this).find_page_write(path));
}

const DirectoryIndex* UpdateSet::find_index_edit(const std::string& directory) const {
    for (const auto& i : index_edits) {
        if (i.directory == directory) return &i;
    }
    return nullptr;
}

DirectoryIndex* UpdateSet::find_index_edit(const std::string& directory) {
    return const_cast<DirectoryIndex*>(std::as_const(*this).find_index_edit(directory));
}

WikiSnapshot apply_updates(const WikiSnapshot& snapshot, const UpdateSet& updates) {
    if (auto dup = updates.conflicts(); !dup.empty()) {
        throw InvalidUpdateError("update touches " + dup.front() + " more than once");
    }
    PageMap pages = snapshot.pages();
    IndexMap indices = snapshot.indices();
    SourceMap sources = snapshot.sources();
    GlobalIndex global = snapshot.global();

    for (const auto& d : updates.deletions) {
        if (d.is_source()) {
            if (!sources.erase(d)) throw InvalidUpdateError("cannot delete missing source " + d.str());
        } else if (!pages.erase(d)) {
            throw InvalidUpdateError("cannot delete missing page " + d.str());
        }
    }
    for (const auto& p : updates.page_writes) {
        if (p.path.empty() || p.path.is_source()) {
            throw InvalidUpdateError("page write outside a knowledge directory: " + p.path.str());
        }
        pages[p.path] = p;
    }
    for (const auto& i : updates.index_edits) {
        if (!is_knowledge_directory(i.directory)) throw InvalidUpdateError("index for invalid directory " + i.directory);
        indices[i.directory] = i;
    }
    for (const auto& s : updates.source_writes) {
        bool digest = s.kind == SourceRecord::Kind::digest;
        if ((digest && !s.path.is_digest()) || (!digest && !s.path.is_article())) {
            throw InvalidUpdateError("source record kind does not match its archive: " + s.path.str());
        }
        sources[s.path] = s;
    }
    if (updates.global_edit) global = *updates.global_edit;
    return WikiSnapshot(std::move(pages), std::move(indices), std::move(global), std::move(sources),
                        snapshot.revision() + 1);
}

WikiView WikiView::of(const WikiSnapshot& snapshot, const UpdateSet* updates) {
    WikiView v;
    for (const auto& [k, p] : snapshot.pages()) v.pages.emplace(k, &p);
    for (const auto& [k, i] : snapshot.indices()) v.indices.emplace(k, &i);
    for (const auto& [k, s] : snapshot.sources()) v.sources.emplace(k, &s);
    if (updates) {
        for (const auto& d : updates->deletions) {
            v.pages.erase(d);
            v.sources.erase(d);
        }
        for (const auto& p : updates->page_writes) v.pages[p.path] = &p;
        for (const auto& i : updates->index_edits) v.indices[i.directory] = &i;
        for (const auto& s : updates->source_writes) v.sources[s.path] = &s;
    }
    return v;
}

const WikiPage* WikiView::page(const SlugPath& path) const {
    auto it = pages.find(path);
    return it == pages.end() ? nullptr : it->second;
}

const DirectoryIndex* WikiView::index(const std::string& directory) const {
    auto it = indices.find(directory);
    return it == indices.end() ? nullptr : it->second;
}

bool WikiView::resolves(const SlugPath& path) const { return pages.contains(path) || sources.contains(path); }

std::set<std::string> WikiView::directories() const {
    std::set<std::string> out;
    for (const auto& [k, _] : pages) out.emplace(k.directory());
    for (const auto& [k, _] : indices) out.insert(k);
    return out;
}

}  // namespace llmwiki
