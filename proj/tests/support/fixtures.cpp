#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "llmwiki/wiki_io.hpp"

namespace llmwiki::testing {

namespace fs = std::filesystem;

fs::path fixture_dir(std::string_view name) { return fs::path(LLMWIKI_FIXTURE_DIR) / name; }

WikiSnapshot load_fixture(std::string_view name) {
    auto loaded = load_snapshot(fixture_dir(name));
    for (const auto& issue : loaded.report) ADD_FAILURE() << issue.path << ": " << issue.message;
    return std::move(loaded.snapshot);
}

std::string read_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& file, std::string_view content) {
    fs::create_directories(file.parent_path());
    std::ofstream(file, std::ios::binary | std::ios::trunc) << content;
}

std::string tree_digest(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
    }
    std::string out;
    for (const auto& [p, bytes] : files) out += "== " + p + " (" + std::to_string(bytes.size()) + ")\n" + bytes;
    return out;
}

TempDir::TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("llmwiki-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

ScriptedLlm case2_agent_script() {
    ScriptedLlm llm;
    llm.on(Purpose::agent_step, {"Ernest I died on 12 June 1516"}, "ANSWER 12 June 1516");
    llm.on(Purpose::agent_step, {"father of John V"}, "READ people/Ernest-I-Prince-of-Anhalt-Dessau");
    llm.on(Purpose::agent_step, {"SEARCH \"John V, Prince of Anhalt-Zerbst\" ->"},
           "Direct access first.\nREAD people/John-V-Prince-of-Anhalt-Zerbst");
    llm.on(Purpose::agent_step, {}, "SEARCH \"John V, Prince of Anhalt-Zerbst\"");
    llm.on(Purpose::sufficiency, {"died on 12 June 1516"}, "SUFFICIENT");
    llm.on(Purpose::sufficiency, {}, "INSUFFICIENT\nThe father's death date is not on this page.");
    return llm;
}

ScriptedLlm case1_agent_script() {
    ScriptedLlm llm;
    llm.on(Purpose::agent_step, {"born on 15 June 1926", "born on 28 July 1927"}, "ANSWER Monster A Go-Go");
    llm.on(Purpose::agent_step, {"[[people/Herschell-Gordon-Lewis]]", "[[people/Pasquale-Festa-Campanile]]"},
           "READ people/Pasquale-Festa-Campanile, people/Herschell-Gordon-Lewis");
    llm.on(Purpose::agent_step, {"SEARCH \"Monster A Go-Go\" ->"}, "READ media/The-Gamecock, media/Monster-A-Go-Go");
    llm.on(Purpose::agent_step, {"SEARCH \"The Gamecock\" ->"}, "SEARCH \"Monster A Go-Go\"");
    llm.on(Purpose::agent_step, {}, "SEARCH \"The Gamecock\"");
    llm.on(Purpose::sufficiency, {"born on 15 June 1926", "born on 28 July 1927"}, "SUFFICIENT");
    llm.on(Purpose::sufficiency, {}, "INSUFFICIENT");
    return llm;
}

}  // namespace llmwiki::testing
