#include "llmwiki/wikilink.hpp"

#include "llmwiki/text.hpp"

namespace llmwiki {

std::vector<RawLink> scan_raw_links(std::string_view text) {
    std::vector<RawLink> links;
    std::size_t pos = 0;
    while ((pos = text.find("[[", pos)) != std::string_view::npos) {
        auto close = text.find("]]", pos + 2);
        if (close == std::string_view::npos) break;
        auto inner = text.substr(pos + 2, close - pos - 2);
        // A nested opener means this pair is malformed; resume at the inner one.
        auto nested = inner.find("[[");
        if (nested != std::string_view::npos) {
            pos = pos + 2 + nested;
            continue;
        }
        if (inner.find('\n') != std::string_view::npos || text::trim(inner).empty()) {
            pos = close + 2;
            continue;
        }
        RawLink link;
        link.offset = pos;
        link.length = close + 2 - pos;
        auto bar = inner.find('|');
        link.target = std::string(text::trim(inner.substr(0, bar)));
        if (bar != std::string_view::npos) link.label = std::string(text::trim(inner.substr(bar + 1)));
        links.push_back(std::move(link));
        pos = close + 2;
    }
    return links;
}

std::vector<SlugPath> extract_wikilinks(std::string_view text) {
    std::vector<SlugPath> out;
    for (const auto& raw : scan_raw_links(text)) {
        if (auto p = SlugPath::parse(raw.target)) out.push_back(std::move(*p));
    }
    return out;
}

}  // namespace llmwiki
