#include "llmwiki/wiki_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "llmwiki/codec.hpp"
#include "llmwiki/errors.hpp"

namespace llmwiki {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw LoadError("cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw LoadError("cannot read " + file.string());
    return ss.str();
}

void write_file(const fs::path& file, const std::string& content) {
    fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw LoadError("cannot write " + file.string());
    out << content;
    if (!out) throw LoadError("cannot write " + file.string());
}

std::vector<fs::path> sorted_entries(const fs::path& dir) {
    std::vector<fs::path> out;
    std::error_code ec;
    for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) out.push_back(it->path());
    if (ec) throw LoadError("cannot list " + dir.string() + ": " + ec.message());
    std::sort(out.begin(), out.end());
    return out;
}

bool is_md(const fs::path& p) { return p.extension() == ".md"; }

}  // namespace

std::string page_file(const SlugPath& path) { return path.str() + ".md"; }
std::string index_file(const std::string& directory) { return directory + "/_index.md"; }

LoadResult load_snapshot(const fs::path& root) {
    LoadResult result;
    std::error_code ec;
    if (!fs::exists(root, ec)) return result;
    if (!fs::is_directory(root, ec)) throw LoadError(root.string() + " is not a directory");

    PageMap pages;
    IndexMap indices;
    SourceMap sources;
    GlobalIndex global;
    auto report = [&](const fs::path& p, std::string msg) {
        result.report.push_back({fs::relative(p, root).generic_string(), std::move(msg)});
    };

    if (fs::is_regular_file(root / "index.md")) global = parse_global_index(read_file(root / "index.md"));

    for (const auto& entry : sorted_entries(root)) {
        if (!fs::is_directory(entry)) continue;
        auto name = entry.filename().string();
        if (name == "sources") {
            for (auto archive : {kDigestDir, kArticleDir}) {
                auto dir = root / fs::path(std::string(archive));
                if (!fs::is_directory(dir)) continue;
                for (const auto& file : sorted_entries(dir)) {
                    if (!is_md(file) || !fs::is_regular_file(file)) continue;
                    auto slug = file.stem().string();
                    if (!is_valid_slug(slug)) {
                        report(file, "invalid slug");
                        continue;
                    }
                    SlugPath path(archive, slug);
                    try {
                        sources.emplace(path, parse_source(read_file(file), path));
                    } catch (const FrontmatterSyntaxError& e) {
                        report(file, e.what());
                    }
                }
            }
            continue;
        }
        if (!is_knowledge_directory(name)) continue;
        for (const auto& file : sorted_entries(entry)) {
            if (!is_md(file) || !fs::is_regular_file(file)) continue;
            auto stem = file.stem().string();
            if (stem == "_index") {
                auto idx = parse_index(read_file(file), name);
                for (const auto& note : idx.parse_notes) report(file, std::string(to_string(note.kind)) + ": " + note.detail);
                indices.emplace(name, std::move(idx));
                continue;
            }
            if (!is_valid_slug(stem)) {
                report(file, "invalid slug");
                continue;
            }
            SlugPath path(name, stem);
            try {
                pages.emplace(path, parse_page(read_file(file), path));
            } catch (const FrontmatterSyntaxError& e) {
                report(file, e.what());
            }
        }
    }
    result.snapshot = WikiSnapshot(std::move(pages), std::move(indices), std::move(global), std::move(sources), 0);
    return result;
}

void write_snapshot(const WikiSnapshot& snapshot, const fs::path& root) {
    fs::create_directories(root);
    std::set<fs::path> expected;
    auto put = [&](const std::string& rel, const std::string& content) {
        auto file = root / fs::path(rel);
        expected.insert(file);
        write_file(file, content);
    };
    put("index.md", render_global_index(snapshot.global()));
    for (const auto& [dir, idx] : snapshot.indices()) put(index_file(dir), render_index(idx));
    for (const auto& [path, page] : snapshot.pages()) put(page_file(path), render_page(page));
    for (const auto& [path, rec] : snapshot.sources()) put(page_file(path), render_source(rec));

    // Remove documents that no longer exist in the snapshot.
    std::vector<fs::path> dirs;
    for (const auto& entry : sorted_entries(root)) {
        if (fs::is_directory(entry) && is_knowledge_directory(entry.filename().string())) dirs.push_back(entry);
    }
    for (auto archive : {kDigestDir, kArticleDir}) {
        auto dir = root / fs::path(std::string(archive));
        if (fs::is_directory(dir)) dirs.push_back(dir);
    }
    for (const auto& dir : dirs) {
        for (const auto& file : sorted_entries(dir)) {
            if (is_md(file) && fs::is_regular_file(file) && !expected.contains(file)) fs::remove(file);
        }
    }
}

}  // namespace llmwiki
