#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "llmwiki/error_book.hpp"
#include "llmwiki/snapshot.hpp"
#include "llmwiki/validation.hpp"

namespace llmwiki {

class LlmPort;

struct RepairOutcome {
    std::vector<ValidationError> fixed;
    std::vector<ValidationError> residual;
    UpdateSet updates_applied;
    /// Existing pages rewritten by the fix that the input update did not write
    /// (or wrote back unchanged).
    std::vector<SlugPath> extra_writes;
    /// Line-delimited JSON records describing each fix.
    std::vector<nlohmann::json> log;
};

/// Layer 1: deterministic fixes for DanglingLink, MalformedRef,
/// IndexInconsistency and UnseenOverwrite. Other types pass through as
/// residual. Pure function of its inputs.
std::pair<UpdateSet, RepairOutcome> code_auto_fix(const WikiSnapshot& snapshot, const UpdateSet& updates,
                                                  const std::vector<ValidationError>& errors);

/// Validates `updates` against `snapshot` (pages written by the update count
/// as selected), applies the Layer-1 fix and returns the new snapshot.
std::pair<WikiSnapshot, RepairOutcome> apply_checked(const WikiSnapshot& snapshot, const UpdateSet& updates);

struct PeriodicFixResult {
    UpdateSet updates;
    std::vector<std::string> skipped;  // one line per page that could not be fixed
    std::vector<nlohmann::json> log;
};

/// Pages with open Layer-2 entries (IncompletePage, UnsupportedFact,
/// CrossPageContradiction) that still exist in the snapshot.
std::vector<SlugPath> periodic_fix_targets(const WikiSnapshot& snapshot, const ErrorBook& book);

/// Layer 2: asks the port for a corrected page per affected page, passing
/// the page, its cited digests and the relevant constraint rules.
PeriodicFixResult llm_periodic_fix(const WikiSnapshot& snapshot, const ErrorBook& book, LlmPort& llm);

struct FinalizeResult {
    WikiSnapshot snapshot;
    ErrorBook book;
    int rounds = 0;
    std::vector<std::size_t> structural_counts;  // errors found at the start of each round
    std::vector<nlohmann::json> log;
};

inline constexpr int kFinalizeRounds = 3;

/// Up to three rounds of validate -> code fix -> LLM fix -> apply, stopping
/// early on a clean round, then a verify-and-close pass.
FinalizeResult finalize(const WikiSnapshot& snapshot, ErrorBook book, LlmPort& llm, int batch_no = 0);

}  // namespace llmwiki
