#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"
#include "llmwiki/codec.hpp"
#include "llmwiki/wiki_io.hpp"

namespace llmwiki {
namespace {

namespace fs = std::filesystem;

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args, const std::string& input = {}) {
    std::istringstream in(input);
    std::ostringstream out, err;
    int code = cli::run(args, in, out, err);
    return {code, out.str(), err.str()};
}

fs::path copy_fixture(const testing::TempDir& dir, const char* name) {
    auto dst = dir / name;
    fs::copy(testing::fixture_dir(name), dst, fs::copy_options::recursive);
    return dst;
}

std::string rule(const char* purpose, std::vector<std::string> contains, const std::string& response) {
    return nlohmann::json{{"purpose", purpose}, {"contains", contains}, {"response", response}}.dump();
}

void write_script(const fs::path& file, const std::vector<std::string>& rules) {
    std::string doc = "{\"rules\": [";
    for (std::size_t i = 0; i < rules.size(); ++i) doc += (i ? ",\n" : "\n") + rules[i];
    testing::write_file(file, doc + "\n]}\n");
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"repair", "--layer", "magic"}).code, 2);
    testing::TempDir dir;
    auto wiki = copy_fixture(dir, "anhalt");
    auto r = run({"--wiki", wiki.string(), "ask", "Who?"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--llm-script"), std::string::npos);
    EXPECT_EQ(run({"--wiki", wiki.string(), "serve"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, ValidateReportsErrors) {
    testing::TempDir dir;
    auto wiki = copy_fixture(dir, "anhalt");
    auto clean = run({"--wiki", wiki.string(), "validate"});
    EXPECT_EQ(clean.code, 0);
    EXPECT_EQ(clean.out, "0 errors\n");

    auto page = wiki / "people" / "Zhang-Yimou.md";
    auto text = testing::read_file(page);
    text.replace(text.find("## Related Pages\n"), 17, "## Related Pages\n- [[people/Ghost]] -- nobody\n");
    testing::write_file(page, text);
    auto broken = run({"--wiki", wiki.string(), "validate", "--strict"});
    EXPECT_EQ(broken.code, 1);
    EXPECT_NE(broken.out.find("people/Zhang-Yimou: DanglingLink [related_pages#"), std::string::npos);
    EXPECT_NE(broken.out.find("1 error\n"), std::string::npos);

    EXPECT_EQ(run({"--wiki", wiki.string(), "repair", "--layer", "code"}).code, 0);
    EXPECT_EQ(run({"--wiki", wiki.string(), "validate", "--strict"}).code, 0);
    EXPECT_TRUE(fs::exists(wiki / "repair.log.jsonl"));
}

TEST(Cli, AskAnswersWithScriptedModel) {
    testing::TempDir dir;
    auto wiki = copy_fixture(dir, "anhalt");
    write_script(dir / "s.json",
                 {rule("agent_step", {"Ernest I died on 12 June 1516"}, "ANSWER 12 June 1516"),
                  rule("agent_step", {"father of John V"}, "READ people/Ernest-I-Prince-of-Anhalt-Dessau"),
                  rule("agent_step", {}, "READ people/John-V-Prince-of-Anhalt-Zerbst"),
                  rule("sufficiency", {"died on 12 June 1516"}, "SUFFICIENT"), rule("sufficiency", {}, "INSUFFICIENT")});
    auto r = run({"--wiki", wiki.string(), "--llm-script", (dir / "s.json").string(), "ask",
                  "When did John V's father die?", "--trace", (dir / "t.jsonl").string()});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "12 June 1516\n");
    EXPECT_NE(testing::read_file(dir / "t.jsonl").find("\"termination\":\"sufficient\""), std::string::npos);
}

TEST(Cli, EvalWritesScores) {
    testing::TempDir dir;
    auto wiki = copy_fixture(dir, "anhalt");
    write_script(dir / "s.json", {rule("agent_step", {"Evidence judged: SUFFICIENT"}, "ANSWER Karl I"),
                                  rule("agent_step", {}, "READ people/Karl-I-Prince-of-Anhalt-Zerbst"),
                                  rule("sufficiency", {}, "SUFFICIENT")});
    testing::write_file(dir / "qa.jsonl", R"({"id": "k", "question": "Who succeeded John V?", "answer": "Karl I", "hop": 2})"
                                          "\n");
    auto r = run({"--wiki", wiki.string(), "--llm-script", (dir / "s.json").string(), "eval", "--qa",
                  (dir / "qa.jsonl").string(), "--out", (dir / "out.jsonl").string(), "--jobs", "2"});
    EXPECT_EQ(r.code, 0) << r.err;
    auto summary = nlohmann::json::parse(r.out);
    EXPECT_DOUBLE_EQ(summary["mean_f1"].get<double>(), 1.0);
    EXPECT_TRUE(fs::exists(dir / "out.jsonl"));
}

TEST(Cli, ServeStdio) {
    testing::TempDir dir;
    auto wiki = copy_fixture(dir, "anhalt");
    auto r = run({"--wiki", wiki.string(), "serve", "--stdio"}, R"({"tool": "wiki_read", "args": {"paths": ["index.md"]}})"
                                                                "\n");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(nlohmann::json::parse(r.out)["results"][0]["kind"], "index");
}

TEST(Cli, CompileRecordThenReplayIsByteIdentical) {
    testing::TempDir dir;
    WikiPage page;
    page.path = SlugPath("people", "John-V-Prince-of-Anhalt-Zerbst");
    page.frontmatter.page_type = "people";
    page.frontmatter.created = page.frontmatter.updated = Date{2025, 1, 15};
    page.title = "John V, Prince of Anhalt-Zerbst";
    page.summary = "German prince";
    page.key_facts = {"John V was born on 4 September 1504"};
    page.related_sources = {RelatedLink::to(SlugPath("sources/digests", "john-v"))};
    DirectoryIndex idx;
    idx.directory = "people";
    idx.sections.push_back({"Nobility", {make_index_entry(page)}});
    auto reply = "=== FILE: people/John-V-Prince-of-Anhalt-Zerbst.md ===\n" + render_page(page) +
                 "=== FILE: people/_index.md ===\n" + render_index(idx);
    write_script(dir / "s.json", {rule("compile", {}, reply), rule("digest", {}, "John V digest."),
                                  rule("verify_fact", {}, "ENTAILED")});
    testing::write_file(dir / "corpus.jsonl",
                        R"({"id": "john-v", "title": "John V", "text": "John V was born on 4 September 1504."})"
                        "\n");

    auto a = dir / "a";
    auto r = run({"--wiki", a.string(), "--llm-script", (dir / "s.json").string(), "--transcript-out",
                  (dir / "t.jsonl").string(), "compile", "--corpus", (dir / "corpus.jsonl").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("compiled 1 passages in 1 batches (0 skipped); 1 pages"), std::string::npos);
    EXPECT_TRUE(fs::exists(a / "people" / "John-V-Prince-of-Anhalt-Zerbst.md"));
    EXPECT_TRUE(fs::exists(a / "error_book.yaml"));
    EXPECT_TRUE(fs::exists(a / "compile.log.jsonl"));

    auto b = dir / "b";
    auto replay = run({"--wiki", b.string(), "--llm-replay", (dir / "t.jsonl").string(), "compile", "--corpus",
                       (dir / "corpus.jsonl").string()});
    ASSERT_EQ(replay.code, 0) << replay.err;
    EXPECT_EQ(testing::tree_digest(a), testing::tree_digest(b));

    auto report = run({"--wiki", a.string(), "errorbook", "report"});
    EXPECT_EQ(report.code, 0);
    EXPECT_NE(report.out.find("Total"), std::string::npos);
    EXPECT_NE(report.out.find("(empty error book)\n"), std::string::npos);

    auto as_json = run({"--wiki", a.string(), "errorbook", "report", "--json"});
    ASSERT_EQ(as_json.code, 0);
    auto j = nlohmann::json::parse(as_json.out);
    EXPECT_EQ(j["empty"], true);
    EXPECT_EQ(j["total"], 0);
    EXPECT_EQ(j["rows"].size(), 7u);
}

TEST(Cli, MissingCorpusIsAnOperationalError) {
    testing::TempDir dir;
    write_script(dir / "s.json", {rule("compile", {}, "x")});
    auto r = run({"--wiki", (dir / "w").string(), "--llm-script", (dir / "s.json").string(), "compile", "--corpus",
                  (dir / "none.jsonl").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("error:"), std::string::npos);
}

}  // namespace
}  // namespace llmwiki
