#pragma once

#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "llmwiki/snapshot.hpp"
#include "llmwiki/validation.hpp"

namespace llmwiki::testing {

/// (type, path, section, item, locus text)
using ErrorKey = std::tuple<std::string, std::string, std::string, int, std::string>;

std::vector<ErrorKey> error_keys(const std::vector<ValidationError>& errors);

/// Brute-force structural checker written against the rule text rather
/// than the production code: string paths, regex link scans, and a fresh
/// scope computation. Output is sorted and de-duplicated.
std::vector<ErrorKey> oracle_structural(const WikiSnapshot& snapshot, const UpdateSet& updates,
                                        const std::set<SlugPath>& selected);

struct OracleHit {
    std::string path;
    int score = 0;
};

/// Scores every document against every query token by direct string scans.
std::vector<OracleHit> oracle_search(const WikiSnapshot& snapshot, const std::string& query, std::size_t limit);

/// Token-level F1 computed from sorted token lists with a two-pointer merge.
double oracle_f1(std::vector<std::string> prediction, std::vector<std::string> gold);

}  // namespace llmwiki::testing
