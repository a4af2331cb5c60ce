#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "llmwiki/snapshot.hpp"
#include "llmwiki/validation.hpp"

namespace llmwiki {

class LlmPort;

inline constexpr std::string_view kUnattributed = "unattributed";

struct ErrorBookEntry {
    enum class Status { open, closed };

    std::string id;
    ErrorType error_type = ErrorType::DanglingLink;
    std::string phenomenon;
    std::string root_cause;
    std::string constraint_rule;
    std::string verification_method;
    Status status = Status::open;
    int occurrences = 1;
    int first_seen_batch = 0;
    int last_seen_batch = 0;
    std::vector<SlugPath> affected_paths;

    bool needs_attribution() const { return root_cause == kUnattributed; }

    friend bool operator==(const ErrorBookEntry&, const ErrorBookEntry&) = default;
};

std::string_view to_string(ErrorBookEntry::Status status);

struct ErrorBook {
    std::vector<ErrorBookEntry> entries;
    int batch_counter = 0;

    const ErrorBookEntry* find(const std::string& id) const;
    ErrorBookEntry* find(const std::string& id);
    std::size_t open_count() const;

    friend bool operator==(const ErrorBook&, const ErrorBook&) = default;
};

/// Recurring-pattern key: error type, directory, and section kind.
std::string error_signature(const ValidationError& error);
/// Stable hex id of (error type, signature).
std::string entry_id(ErrorType type, const std::string& signature);

/// Rule injected when the attribution call fails.
std::string default_constraint(ErrorType type);

/// Groups errors by signature. Known patterns gain one occurrence (and are
/// reopened when closed); new patterns are attributed through the port.
ErrorBook record_errors(ErrorBook book, const std::vector<ValidationError>& errors, int batch_no,
                        LlmPort& llm);

/// Open constraint rules ordered by occurrences then recency, at most `cap`.
std::vector<std::string> active_constraints(const ErrorBook& book, std::size_t cap = 30);

/// Re-runs the matching validator on each open entry's affected paths and
/// closes entries that no longer recur.
ErrorBook verify_and_close(ErrorBook book, const WikiSnapshot& snapshot, LlmPort& llm);

std::string book_to_yaml(const ErrorBook& book);
ErrorBook book_from_yaml(std::string_view text);
void save_book(const ErrorBook& book, const std::filesystem::path& file);
/// A missing file loads as an empty book.
ErrorBook load_book(const std::filesystem::path& file);

struct DistributionRow {
    ErrorType error_type;
    int occurrences = 0;
    double percent = 0.0;
};

struct DistributionReport {
    std::array<DistributionRow, 7> rows{};
    int total = 0;
    bool empty = true;

    /// Table with one row per error type; displayed percentages use
    /// largest-remainder rounding so the column adds up to 100.0.
    std::string to_table() const;
};

DistributionReport distribution_report(const ErrorBook& book);

}  // namespace llmwiki
