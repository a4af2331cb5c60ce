#include <gtest/gtest.h>

#include <atomic>
#include <random>

#include "fixtures.hpp"
#include "llmwiki/errors.hpp"
#include "llmwiki/eval.hpp"
#include "oracles.hpp"

namespace llmwiki {
namespace {

using Tokens = std::vector<std::string>;

TEST(NormalizeAnswer, Examples) {
    EXPECT_EQ(normalize_answer("the Monster a Go-Go"), (Tokens{"monster", "go-go"}));
    EXPECT_EQ(normalize_answer("12 June 1516."), (Tokens{"12", "june", "1516"}));
    EXPECT_EQ(normalize_answer("  An  apple -- pie- -x "), (Tokens{"apple", "pie", "x"}));
    EXPECT_EQ(normalize_answer("São Paulo, Brazil!"), (Tokens{"são", "paulo", "brazil"}));
    EXPECT_TRUE(normalize_answer("The. A, an!").empty());
}

TEST(AnswerScore, KnownValues) {
    auto s = answer_f1_em("12 June 1516", "June 1516");
    EXPECT_NEAR(s.f1, 0.8, 1e-12);
    EXPECT_EQ(s.em, 0);
    auto exact = answer_f1_em("The Monster A Go-Go", "monster a go-go.");
    EXPECT_DOUBLE_EQ(exact.f1, 1.0);
    EXPECT_EQ(exact.em, 1);
    auto empty = answer_f1_em("", "the");
    EXPECT_DOUBLE_EQ(empty.f1, 1.0);
    EXPECT_EQ(empty.em, 1);
    EXPECT_DOUBLE_EQ(answer_f1_em("", "1516").f1, 0.0);
    EXPECT_DOUBLE_EQ(answer_f1_em("1551", "1516").f1, 0.0);
}

TEST(AnswerScore, MatchesMultisetOracleAndIsSymmetric) {
    std::mt19937_64 rng(99);
    const Tokens vocab = {"june", "1516", "the", "prince", "go-go", "a", "zerbst", "x"};
    auto random_answer = [&] {
        std::string s;
        std::size_t n = rng() % 6;
        for (std::size_t i = 0; i < n; ++i) s += vocab[rng() % vocab.size()] + (rng() % 3 ? " " : ", ");
        return s;
    };
    for (int i = 0; i < 2000; ++i) {
        auto p = random_answer();
        auto g = random_answer();
        auto s = answer_f1_em(p, g);
        EXPECT_NEAR(s.f1, testing::oracle_f1(normalize_answer(p), normalize_answer(g)), 1e-12) << p << " | " << g;
        EXPECT_NEAR(s.f1, answer_f1_em(g, p).f1, 1e-12);
        EXPECT_GE(s.f1, 0.0);
        EXPECT_LE(s.f1, 1.0);
        if (s.em) EXPECT_DOUBLE_EQ(s.f1, 1.0);
    }
}

TEST(LoadQa, ParsesLabelsAndRejectsBadLines) {
    auto qa = load_qa(R"({"id": "q1", "question": "Q?", "answer": "A", "hop": 2, "type": "bridge"})"
                      "\n\n"
                      R"({"id": 7, "question": "Q2?", "answer": "B"})"
                      "\n");
    ASSERT_EQ(qa.size(), 2u);
    EXPECT_EQ(qa[0].hop_label, 2);
    EXPECT_EQ(qa[0].type_label, "bridge");
    EXPECT_EQ(qa[1].id, "7");
    EXPECT_FALSE(qa[1].hop_label);
    try {
        load_qa(R"({"id": "a", "question": "q", "answer": "x"})"
                "\n"
                R"({"id": "a", "question": "q", "answer": "x"})");
        ADD_FAILURE();
    } catch (const CorpusFormatError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(load_qa(R"({"id": "a", "question": "q"})"), CorpusFormatError);
    EXPECT_THROW(load_qa(R"({"id": "a", "question": "q", "answer": "x", "hop": "two"})"), CorpusFormatError);
}

AgentResult fixed_answer(const std::string& answer) {
    AgentResult r;
    r.answer = answer;
    r.trace.answer = answer;
    r.trace.tool_calls_used = 2;
    return r;
}

std::vector<QAExample> dataset() {
    return {{"q1", "When?", "12 June 1516", 2, "bridge"},
            {"q2", "Which?", "Monster A Go-Go", 2, "comparison"},
            {"q3", "Who?", "Karl I", 4, "bridge"},
            {"q4", "Where?", "Dessau", std::nullopt, std::nullopt}};
}

AgentResult scripted_agent(const QAExample& ex) {
    if (ex.id == "q1") return fixed_answer("12 June 1516");
    if (ex.id == "q2") return fixed_answer("Monster");
    if (ex.id == "q3") throw LlmError("model unavailable");
    return fixed_answer("Zerbst");
}

TEST(RunEval, AggregatesPerHopAndType) {
    auto s = run_eval(dataset(), scripted_agent);
    EXPECT_EQ(s.n, 4u);
    // F1: 1, 2/3 (monster vs monster go-go), 0 (failure), 0.
    EXPECT_NEAR(s.mean_f1, (1.0 + 2.0 / 3.0) / 4.0, 1e-12);
    EXPECT_NEAR(s.mean_em, 0.25, 1e-12);
    ASSERT_EQ(s.per_hop.size(), 2u);
    EXPECT_EQ(s.per_hop.at(2).n, 2u);
    EXPECT_NEAR(s.per_hop.at(2).mean_f1, (1.0 + 2.0 / 3.0) / 2.0, 1e-12);
    EXPECT_EQ(s.per_hop.at(4).n, 1u);
    EXPECT_DOUBLE_EQ(s.per_hop.at(4).mean_f1, 0.0);
    EXPECT_EQ(s.per_type.at("bridge").n, 2u);
    EXPECT_TRUE(s.records[2].failed);
    EXPECT_NE(s.records[2].failure.find("model unavailable"), std::string::npos);
    EXPECT_EQ(s.records[0].tool_calls, 2u);
    auto j = s.summary_json();
    EXPECT_EQ(j["failed"], 1);
    EXPECT_EQ(j["n"], 4);
}

TEST(RunEval, EmptyDatasetThrows) { EXPECT_THROW(run_eval({}, scripted_agent), EmptyDataset); }

TEST(RunEval, WritesRecordsSummaryAndTraces) {
    testing::TempDir dir;
    EvalOptions opts;
    opts.output = dir / "out.jsonl";
    opts.traces_dir = dir / "traces";
    run_eval(dataset(), scripted_agent, opts);
    auto text = testing::read_file(*opts.output);
    std::vector<nlohmann::json> lines;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) lines.push_back(nlohmann::json::parse(l));
    ASSERT_EQ(lines.size(), 5u);
    EXPECT_EQ(lines[0]["id"], "q1");
    EXPECT_EQ(lines[0]["hop"], 2);
    EXPECT_TRUE(lines[4].contains("summary"));
    EXPECT_TRUE(std::filesystem::exists(dir / "traces" / "q1.jsonl"));
}

TEST(RunEval, ParallelJobsGiveTheSameScores) {
    std::vector<QAExample> many;
    for (int i = 0; i < 40; ++i) {
        auto ex = dataset()[static_cast<std::size_t>(i % 4)];
        ex.id = "q" + std::to_string(i % 4 + 1) + "-" + std::to_string(i);
        many.push_back(ex);
    }
    auto agent = [](const QAExample& ex) { return scripted_agent(QAExample{ex.id.substr(0, 2), "", "", {}, {}}); };
    EvalOptions par;
    par.jobs = 8;
    auto a = run_eval(many, agent);
    auto b = run_eval(many, agent, par);
    EXPECT_DOUBLE_EQ(a.mean_f1, b.mean_f1);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].id, b.records[i].id);
        EXPECT_EQ(a.records[i].f1, b.records[i].f1);
    }
}

}  // namespace
}  // namespace llmwiki
