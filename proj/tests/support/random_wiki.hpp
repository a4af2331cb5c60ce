#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "llmwiki/snapshot.hpp"
#include "llmwiki/validation.hpp"

namespace llmwiki::testing {

using Rng = std::mt19937_64;

/// Page with adversarial but valid text (unicode, YAML-special characters,
/// labels, notes) for codec round trips. Parse notes are always empty.
WikiPage random_page(Rng& rng, const SlugPath& path);

/// Wiki that validates clean: every link resolves, every citation is a
/// canonical archived digest and every directory index matches its pages.
WikiSnapshot random_valid_wiki(Rng& rng, std::size_t page_count);

/// A valid base plus an update carrying seeded structural corruptions of
/// all five structural types.
struct SeededCase {
    WikiSnapshot base;
    UpdateSet update;
    std::set<SlugPath> selected;
    std::set<ErrorType> seeded;
};

SeededCase seeded_case(Rng& rng, std::size_t max_pages = 50);

}  // namespace llmwiki::testing
