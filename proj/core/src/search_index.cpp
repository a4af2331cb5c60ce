#include "llmwiki/search_index.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "llmwiki/text.hpp"

namespace llmwiki {

namespace {

constexpr std::size_t kSnippetBytes = 200;

std::string clip(std::string_view s) {
    if (s.size() <= kSnippetBytes) return std::string(s);
    std::size_t cut = kSnippetBytes;
    while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
    return std::string(s.substr(0, cut)) + "...";
}

void add_tokens(std::set<std::string>& into, std::string_view s) {
    for (auto& t : search_tokens(s)) into.insert(std::move(t));
}

}  // namespace

std::string_view to_string(SearchField field) {
    switch (field) {
        case SearchField::name: return "name";
        case SearchField::alias: return "alias";
        case SearchField::tag: return "tag";
        case SearchField::summary: return "summary";
        case SearchField::content: return "content";
    }
    return "content";
}

int FieldWeights::of(SearchField field) const {
    switch (field) {
        case SearchField::name: return name;
        case SearchField::alias: return alias;
        case SearchField::tag: return tag;
        case SearchField::summary: return summary;
        case SearchField::content: return content;
    }
    return 0;
}

std::vector<std::string> search_tokens(std::string_view s) { return text::word_tokens(s); }

SearchIndex SearchIndex::build(const WikiSnapshot& snapshot, FieldWeights weights) {
    SearchIndex index;
    index.weights_ = weights;
    index.revision_ = snapshot.revision();

    struct Pending {
        Document doc;
        std::array<std::set<std::string>, kSearchFieldCount> fields;
    };
    std::vector<Pending> pending;

    for (const auto& [path, page] : snapshot.pages()) {
        Pending p;
        p.doc.path = path;
        p.doc.title = page.title;
        p.doc.aliases = page.frontmatter.aliases;
        p.doc.tags = page.frontmatter.tags;
        p.doc.summary = page.summary;
        p.doc.snippet = clip(!page.summary.empty() ? page.summary
                                                   : (page.key_facts.empty() ? std::string() : page.key_facts.front()));
        auto& f = p.fields;
        add_tokens(f[0], page.title);
        add_tokens(f[0], path.slug());
        for (const auto& a : page.frontmatter.aliases) add_tokens(f[1], a);
        for (const auto& t : page.frontmatter.tags) add_tokens(f[2], t);
        add_tokens(f[3], page.summary);
        for (const auto& fact : page.key_facts) add_tokens(f[4], fact);
        for (const auto& r : page.related_pages) add_tokens(f[4], r.note);
        for (const auto& r : page.related_sources) add_tokens(f[4], r.note);
        pending.push_back(std::move(p));
    }
    for (const auto& [path, rec] : snapshot.sources()) {
        if (!path.is_digest()) continue;
        Pending p;
        p.doc.path = path;
        p.doc.title = rec.source_id;
        p.doc.snippet = clip(rec.text);
        add_tokens(p.fields[0], path.slug());
        add_tokens(p.fields[0], rec.source_id);
        add_tokens(p.fields[4], rec.text);
        pending.push_back(std::move(p));
    }
    std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) { return a.doc.path < b.doc.path; });

    for (std::uint32_t id = 0; id < pending.size(); ++id) {
        for (std::size_t f = 0; f < kSearchFieldCount; ++f) {
            for (const auto& tok : pending[id].fields[f]) index.postings_[f][tok].push_back(id);
        }
        index.docs_.push_back(std::move(pending[id].doc));
    }
    return index;
}

std::vector<SearchHit> SearchIndex::search(std::string_view query, std::size_t limit) const {
    if (limit == 0) throw std::invalid_argument("search limit must be at least 1");
    auto tokens = search_tokens(query);
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    if (tokens.empty() || docs_.empty()) return {};

    std::vector<int> scores(docs_.size(), 0);
    std::vector<std::uint8_t> masks(docs_.size(), 0);
    for (const auto& tok : tokens) {
        for (std::size_t f = 0; f < kSearchFieldCount; ++f) {
            auto it = postings_[f].find(tok);
            if (it == postings_[f].end()) continue;
            int w = weights_.of(static_cast<SearchField>(f));
            for (auto id : it->second) {
                scores[id] += w;
                masks[id] = static_cast<std::uint8_t>(masks[id] | (1u << f));
            }
        }
    }
    std::vector<std::uint32_t> ids;
    for (std::uint32_t id = 0; id < docs_.size(); ++id) {
        if (scores[id] > 0) ids.push_back(id);
    }
    auto by_rank = [&](std::uint32_t a, std::uint32_t b) { return scores[a] != scores[b] ? scores[a] > scores[b] : a < b; };
    auto n = std::min(limit, ids.size());
    std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(), by_rank);
    ids.resize(n);

    std::vector<SearchHit> hits;
    hits.reserve(n);
    for (auto id : ids) {
        const auto& d = docs_[id];
        SearchHit h;
        h.path = d.path;
        h.score = scores[id];
        for (std::size_t f = 0; f < kSearchFieldCount; ++f) {
            if (masks[id] & (1u << f)) h.matched_fields.push_back(static_cast<SearchField>(f));
        }
        h.snippet = d.snippet;
        h.title = d.title;
        h.aliases = d.aliases;
        h.tags = d.tags;
        h.summary = d.summary;
        hits.push_back(std::move(h));
    }
    return hits;
}

}  // namespace llmwiki
