#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "llmwiki/llm_port.hpp"
#include "llmwiki/snapshot.hpp"

namespace llmwiki::testing {

std::filesystem::path fixture_dir(std::string_view name);

/// Loads a fixture wiki and fails the current test on any load issue.
WikiSnapshot load_fixture(std::string_view name);

std::string read_file(const std::filesystem::path& file);
void write_file(const std::filesystem::path& file, std::string_view content);

/// Every regular file under `root` with its bytes, keyed by relative path.
std::string tree_digest(const std::filesystem::path& root);

class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(std::string_view child) const { return path_ / child; }

private:
    std::filesystem::path path_;
};

inline constexpr std::string_view kJohnV = "people/John-V-Prince-of-Anhalt-Zerbst";
inline constexpr std::string_view kErnestI = "people/Ernest-I-Prince-of-Anhalt-Dessau";

/// Agent policy for the father-of-John-V question on the anhalt fixture.
/// Rules are keyed on what the trace already contains.
ScriptedLlm case2_agent_script();

/// Agent policy for the older-director comparison on the films fixture.
ScriptedLlm case1_agent_script();

}  // namespace llmwiki::testing
