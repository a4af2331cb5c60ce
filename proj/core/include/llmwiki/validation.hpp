#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "llmwiki/snapshot.hpp"

namespace llmwiki {

class LlmPort;

enum class ErrorType {
    DanglingLink,
    IncompletePage,
    MalformedRef,
    UnseenOverwrite,
    IndexInconsistency,
    UnsupportedFact,
    CrossPageContradiction,
};

inline constexpr std::array<ErrorType, 7> kAllErrorTypes = {
    ErrorType::DanglingLink,       ErrorType::IncompletePage,  ErrorType::MalformedRef,
    ErrorType::UnseenOverwrite,    ErrorType::IndexInconsistency, ErrorType::UnsupportedFact,
    ErrorType::CrossPageContradiction,
};

std::string_view to_string(ErrorType type);
std::optional<ErrorType> error_type_from_string(std::string_view name);
bool is_structural(ErrorType type);
/// Human label as used in distribution reports ("Dangling Links", ...).
std::string_view display_name(ErrorType type);
/// Detection method of the taxonomy, copied into error book entries.
std::string_view detection_method(ErrorType type);

// Locus section names.
namespace section {
inline constexpr std::string_view title = "title";
inline constexpr std::string_view summary = "summary";
inline constexpr std::string_view key_facts = "key_facts";
inline constexpr std::string_view related_pages = "related_pages";
inline constexpr std::string_view related_sources = "related_sources";
inline constexpr std::string_view page = "page";
inline constexpr std::string_view index = "index";
inline constexpr std::string_view pair = "pair";
}  // namespace section

struct Locus {
    std::string section;
    int item = -1;  // -1 when the finding is not tied to a list item
    std::string text;

    friend auto operator<=>(const Locus&, const Locus&) = default;
};

struct ValidationError {
    ErrorType error_type;
    SlugPath path;
    std::optional<Locus> locus;
    std::string detail;
    int batch_no = 0;

    friend bool operator==(const ValidationError&, const ValidationError&) = default;
};

/// Total order used for all validator output: path, type, locus, detail.
bool error_order(const ValidationError& a, const ValidationError& b);

/// Structural checks over the merged view of `snapshot` and `updates`.
///
/// With an empty update set every page and directory is checked. Otherwise
/// the scope is the written pages (all pages when the update deletes
/// something) and the directories touched by the update; UnseenOverwrite
/// flags page writes that change an existing page outside `selected`.
std::vector<ValidationError> validate_structural(const WikiSnapshot& snapshot, const UpdateSet& updates,
                                                 const std::set<SlugPath>& selected);

struct ContentSamplingConfig {
    std::size_t max_facts_per_page = 0;  // 0 = every fact
    std::size_t pairs_per_page = 1;      // linked pairs checked per page
};

/// Verdict tokens expected on the first line of a content-check reply.
enum class Verdict { yes, no, unknown };
Verdict parse_entailment_verdict(std::string_view reply);
Verdict parse_consistency_verdict(std::string_view reply);  // yes = contradiction

/// Content checks on the pages written by `updates`.
std::vector<ValidationError> validate_content(const WikiSnapshot& snapshot, const UpdateSet& updates,
                                              LlmPort& llm, const ContentSamplingConfig& sampling = {});

/// Content checks on an explicit page set of the merged view.
std::vector<ValidationError> validate_content_paths(const WikiView& view, const std::vector<SlugPath>& pages,
                                                    LlmPort& llm, const ContentSamplingConfig& sampling = {});

}  // namespace llmwiki
