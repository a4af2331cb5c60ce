#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "llmwiki/tool_server.hpp"

namespace llmwiki {

class LlmPort;

struct AgentConfig {
    std::size_t t_max = 15;
    std::size_t patience = 3;
    std::size_t search_limit = kDefaultSearchLimit;
};

struct SearchDirective {
    std::string query;
};
struct ReadDirective {
    std::vector<std::string> paths;
};
struct AnswerDirective {
    std::string text;
};

using AgentDirective = std::variant<SearchDirective, ReadDirective, AnswerDirective>;

/// First line starting with SEARCH, READ or ANSWER wins. Throws ParseFailure.
AgentDirective parse_agent_reply(std::string_view text);

enum class Termination {
    sufficient,
    budget_exhausted,
    patience_exhausted,
    unparsable_replies,
};

std::string_view to_string(Termination termination);

struct AgentStep {
    std::size_t step_no = 0;
    std::string kind;  // wiki_search | wiki_read | answer | rejected_answer | forced_answer | parse_failure
    std::optional<ToolRequest> request;
    std::string answer;
    std::string observation;  // short summary of what came back
    std::size_t consecutive_empty_searches = 0;
    std::optional<bool> sufficient;  // verdict after a wiki_read
};

struct AgentTrace {
    std::string question;
    std::vector<AgentStep> steps;
    std::string answer;
    Termination termination = Termination::sufficient;
    std::size_t tool_calls_used = 0;
    double wall_time_seconds = 0.0;

    std::vector<std::string> tool_sequence() const;
    /// One JSON line per step followed by a summary record.
    std::string to_jsonl() const;
};

struct AgentResult {
    std::string answer;
    AgentTrace trace;
};

/// Runs the search/read/sufficiency loop for one question.
AgentResult answer_question(const std::string& question, ToolClient& tools, LlmPort& llm,
                            const AgentConfig& config = {});

}  // namespace llmwiki
