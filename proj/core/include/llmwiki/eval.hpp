#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llmwiki/agent.hpp"

namespace llmwiki {

struct QAExample {
    std::string id;
    std::string question;
    std::string gold_answer;
    std::optional<int> hop_label;
    std::optional<std::string> type_label;
};

/// Lowercase, drop punctuation except token-internal hyphens, drop the
/// articles a/an/the, split on whitespace.
std::vector<std::string> normalize_answer(std::string_view text);

struct AnswerScore {
    double f1 = 0.0;
    int em = 0;
};

AnswerScore answer_f1_em(std::string_view prediction, std::string_view gold);

std::vector<QAExample> load_qa(std::string_view jsonl);
std::vector<QAExample> load_qa_file(const std::filesystem::path& file);

struct ExampleRecord {
    std::string id;
    std::string question;
    std::string gold;
    std::string prediction;
    double f1 = 0.0;
    int em = 0;
    double latency_seconds = 0.0;
    std::size_t tool_calls = 0;
    std::string termination;
    std::optional<int> hop_label;
    std::optional<std::string> type_label;
    std::string trace_path;
    bool failed = false;
    std::string failure;
};

struct GroupStats {
    std::size_t n = 0;
    double mean_f1 = 0.0;
    double mean_em = 0.0;
};

struct EvalSummary {
    std::size_t n = 0;
    double mean_f1 = 0.0;
    double mean_em = 0.0;
    double mean_latency_seconds = 0.0;
    std::map<int, GroupStats> per_hop;
    std::map<std::string, GroupStats> per_type;
    std::vector<ExampleRecord> records;

    nlohmann::ordered_json summary_json() const;
};

using AgentFactory = std::function<AgentResult(const QAExample&)>;

struct EvalOptions {
    std::optional<std::filesystem::path> output;
    std::optional<std::filesystem::path> traces_dir;
    std::size_t jobs = 1;
};

/// Runs the agent per example and aggregates F1/EM, latency, and hop/type
/// breakdowns. Throws EmptyDataset. A failing example scores zero.
EvalSummary run_eval(const std::vector<QAExample>& dataset, const AgentFactory& agent,
                     const EvalOptions& options = {});

}  // namespace llmwiki
