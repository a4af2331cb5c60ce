#include "llmwiki/agent.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "llmwiki/errors.hpp"
#include "llmwiki/llm_port.hpp"
#include "llmwiki/text.hpp"

namespace llmwiki {

namespace {

using ojson = nlohmann::ordered_json;

const std::string kAgentSystem =
    "You answer questions by navigating a structured wiki with two tools.\n"
    "wiki_search finds pages by name, alias, tag and content. wiki_read returns full pages or directory indices "
    "(index.md, <directory>/_index.md).\n"
    "Strategies:\n"
    "- Direct access: when the question names an entity, search for it and read its page.\n"
    "- Bridge queries: when the answer sits on a page linked from the first one, follow the Related Pages links "
    "and read the linked page.\n"
    "- Exploratory browsing: when nothing matches, read index.md and the directory indices to find candidates.\n"
    "Reply with exactly one directive per turn:\n"
    "SEARCH \"<query>\"\n"
    "READ <path>, <path>, ...\n"
    "ANSWER <short answer>\n"
    "Read at least one page before answering.";

const std::string kSufficiencySystem =
    "Decide whether the evidence read so far is sufficient to answer the question. Reply SUFFICIENT or "
    "INSUFFICIENT on the first line.";

std::string upper_word(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (!std::isalpha(static_cast<unsigned char>(c))) break;
        out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
    return out;
}

std::string_view strip_wrapping(std::string_view s) {
    s = text::trim(s);
    if (!s.empty() && s.front() == ':') s = text::trim(s.substr(1));
    if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = text::trim(s.substr(1, s.size() - 2));
    return s;
}

std::string_view unquote(std::string_view s) {
    s = text::trim(s);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
    return text::trim(s);
}

bool parse_sufficiency(std::string_view reply) {
    for (const auto& line : text::split_lines(reply)) {
        auto t = text::trim(line);
        while (!t.empty() && !std::isalpha(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
        if (t.empty()) continue;
        return upper_word(t) == "SUFFICIENT";
    }
    return false;
}

class AgentRun {
public:
    AgentRun(const std::string& question, ToolClient& tools, LlmPort& llm, const AgentConfig& config)
        : tools_(tools), llm_(llm), config_(config) {
        trace_.question = question;
    }

    AgentTrace run() {
        const std::size_t max_turns = 3 * config_.t_max;
        std::size_t turns = 0;
        std::size_t parse_failures = 0;
        while (true) {
            if ((trace_.tool_calls_used >= config_.t_max && !last_sufficient_) || turns >= max_turns) {
                return finish_forced(Termination::budget_exhausted);
            }
            ++turns;
            auto reply = llm_.complete(LlmRequest::make(Purpose::agent_step, kAgentSystem, step_prompt()));
            AgentDirective directive;
            try {
                directive = parse_agent_reply(reply);
            } catch (const ParseFailure& e) {
                add_step("parse_failure", std::nullopt, {}, e.what());
                if (++parse_failures >= 2) return finish_forced(Termination::unparsable_replies);
                note_ = "Your last reply contained no directive. Reply with SEARCH, READ or ANSWER.";
                continue;
            }
            parse_failures = 0;

            if (const auto* a = std::get_if<AnswerDirective>(&directive)) {
                if (reads_ == 0) {
                    add_step("rejected_answer", std::nullopt, a->text, "no page has been read yet");
                    note_ = "You must READ at least one page before answering.";
                    continue;
                }
                if (!last_sufficient_) {
                    add_step("rejected_answer", std::nullopt, a->text, "evidence not yet judged sufficient");
                    note_ = "The evidence read so far was judged insufficient. Continue searching or reading.";
                    continue;
                }
                add_step("answer", std::nullopt, a->text, {});
                trace_.answer = a->text;
                trace_.termination = Termination::sufficient;
                return std::move(trace_);
            }

            if (trace_.tool_calls_used >= config_.t_max) return finish_forced(Termination::budget_exhausted);
            note_.clear();
            if (const auto* s = std::get_if<SearchDirective>(&directive)) {
                if (do_search(*s)) return finish_forced(Termination::patience_exhausted);
            } else {
                do_read(std::get<ReadDirective>(directive));
            }
        }
    }

private:
    ojson call(const ToolRequest& request) {
        try {
            return tools_.call(request);
        } catch (const ToolTransportError&) {
            return tools_.call(request);  // one retry, then surface
        }
    }

    // Returns true when patience is exhausted.
    bool do_search(const SearchDirective& s) {
        auto request = ToolRequest::search(s.query, config_.search_limit);
        auto response = call(request);
        ++trace_.tool_calls_used;
        std::string observation;
        std::string context = "[" + std::to_string(steps_no_ + 1) + "] SEARCH \"" + s.query + "\" -> ";
        if (response.contains("error")) {
            observation = "error: " + response["error"].value("message", std::string("unknown"));
            context += observation + "\n";
        } else {
            const auto& hits = response["hits"];
            if (hits.empty()) {
                ++empty_streak_;
            } else {
                empty_streak_ = 0;
            }
            observation = std::to_string(hits.size()) + " hits";
            context += std::to_string(hits.size()) + " hits\n";
            for (const auto& h : hits) {
                observation += " " + h["path"].get<std::string>();
                context += "  - " + h["path"].get<std::string>() + " | " + h["title"].get<std::string>() + " | " +
                           h["summary"].get<std::string>() + "\n";
            }
        }
        context_.push_back(std::move(context));
        add_step("wiki_search", request, {}, observation);
        return empty_streak_ >= config_.patience;
    }

    void do_read(const ReadDirective& r) {
        auto request = ToolRequest::read(r.paths);
        auto response = call(request);
        ++trace_.tool_calls_used;
        std::string observation;
        std::string context = "[" + std::to_string(steps_no_ + 1) + "] READ " + text::join(r.paths, ", ") + "\n";
        bool any = false;
        if (response.contains("error")) {
            observation = "error: " + response["error"].value("message", std::string("unknown"));
            context += observation + "\n";
        } else {
            for (const auto& res : response["results"]) {
                auto path = res["path"].get<std::string>();
                if (res.contains("error")) {
                    observation += path + ": " + res["error"].get<std::string>() + "; ";
                    context += "--- " + path + ": " + res["error"].get<std::string>() + "\n";
                } else {
                    any = true;
                    observation += path + ": " + res["kind"].get<std::string>() + "; ";
                    context += "--- " + path + "\n" + res["text"].get<std::string>() + "\n";
                    evidence_ += "--- " + path + "\n" + res["text"].get<std::string>() + "\n";
                }
            }
        }
        if (any) empty_streak_ = 0;
        ++reads_;
        context_.push_back(std::move(context));

        auto verdict = llm_.complete(LlmRequest::make(
            Purpose::sufficiency, kSufficiencySystem,
            "Question: " + trace_.question + "\n\nEvidence:\n" + (evidence_.empty() ? "(none)\n" : evidence_)));
        last_sufficient_ = parse_sufficiency(verdict);
        add_step("wiki_read", request, {}, observation);
        trace_.steps.back().sufficient = last_sufficient_;
    }

    AgentTrace finish_forced(Termination why) {
        trace_.termination = why;
        if (reads_ == 0) {
            add_step("forced_answer", std::nullopt, {}, "no page read; empty answer");
            trace_.answer.clear();
            return std::move(trace_);
        }
        note_ = "The tool budget is spent. Reply now with ANSWER <short answer> using the evidence above.";
        auto reply = llm_.complete(LlmRequest::make(Purpose::agent_step, kAgentSystem, step_prompt()));
        std::string answer;
        try {
            auto d = parse_agent_reply(reply);
            if (const auto* a = std::get_if<AnswerDirective>(&d)) answer = a->text;
        } catch (const ParseFailure&) {
            answer = std::string(text::trim(reply));
        }
        add_step("forced_answer", std::nullopt, answer, {});
        trace_.answer = answer;
        return std::move(trace_);
    }

    std::string step_prompt() const {
        std::string p = "Question: " + trace_.question + "\n\nTool calls used: " +
                        std::to_string(trace_.tool_calls_used) + " of " + std::to_string(config_.t_max) + "\n";
        if (context_.empty()) {
            p += "\nNo tool calls yet.\n";
        } else {
            p += "\nTrace so far:\n";
            for (const auto& c : context_) p += c;
        }
        if (reads_ > 0) p += last_sufficient_ ? "\nEvidence judged: SUFFICIENT\n" : "\nEvidence judged: INSUFFICIENT\n";
        if (!note_.empty()) p += "\nNote: " + note_ + "\n";
        return p;
    }

    void add_step(std::string kind, std::optional<ToolRequest> request, std::string answer, std::string observation) {
        AgentStep s;
        s.step_no = ++steps_no_;
        s.kind = std::move(kind);
        s.request = std::move(request);
        s.answer = std::move(answer);
        s.observation = std::move(observation);
        s.consecutive_empty_searches = empty_streak_;
        trace_.steps.push_back(std::move(s));
    }

    ToolClient& tools_;
    LlmPort& llm_;
    const AgentConfig& config_;
    AgentTrace trace_;
    std::vector<std::string> context_;
    std::string evidence_;
    std::string note_;
    std::size_t steps_no_ = 0;
    std::size_t reads_ = 0;
    std::size_t empty_streak_ = 0;
    bool last_sufficient_ = false;
};

}  // namespace

AgentDirective parse_agent_reply(std::string_view reply) {
    auto lines = text::split_lines(reply);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto t = text::trim(lines[i]);
        while (!t.empty() && (t.front() == '*' || t.front() == '#' || t.front() == '-' || t.front() == '`' ||
                              t.front() == '>' || t.front() == ' '))
            t.remove_prefix(1);
        auto word = upper_word(t);
        if (word != "SEARCH" && word != "READ" && word != "ANSWER") continue;
        auto rest = t.substr(word.size());
        while (!rest.empty() && (rest.front() == '*' || rest.front() == '`')) rest.remove_prefix(1);
        if (!rest.empty() && rest.front() != ' ' && rest.front() != ':' && rest.front() != '(' && rest.front() != '\t')
            continue;
        while (!rest.empty() && (rest.back() == '*' || rest.back() == '`')) rest.remove_suffix(1);

        if (word == "SEARCH") {
            auto q = std::string(unquote(strip_wrapping(rest)));
            if (q.empty()) throw ParseFailure("SEARCH without a query");
            return SearchDirective{q};
        }
        if (word == "READ") {
            ReadDirective r;
            for (const auto& part : text::split(strip_wrapping(rest), ',')) {
                auto p = unquote(part);
                if (p.substr(0, 2) == "[[" && p.size() > 4 && p.substr(p.size() - 2) == "]]")
                    p = text::trim(p.substr(2, p.size() - 4));
                if (!p.empty()) r.paths.emplace_back(p);
            }
            if (r.paths.empty()) throw ParseFailure("READ without paths");
            if (r.paths.size() > kMaxReadPaths) throw ParseFailure("READ with more than 20 paths");
            return r;
        }
        std::string answer(strip_wrapping(rest));
        for (std::size_t j = i + 1; j < lines.size(); ++j) answer += "\n" + lines[j];
        return AnswerDirective{std::string(unquote(text::trim(answer)))};
    }
    throw ParseFailure("reply has no SEARCH, READ or ANSWER directive");
}

std::string_view to_string(Termination termination) {
    switch (termination) {
        case Termination::sufficient: return "sufficient";
        case Termination::budget_exhausted: return "budget_exhausted";
        case Termination::patience_exhausted: return "patience_exhausted";
        case Termination::unparsable_replies: return "unparsable_replies";
    }
    return "unknown";
}

std::vector<std::string> AgentTrace::tool_sequence() const {
    std::vector<std::string> out;
    for (const auto& s : steps) {
        if (s.request) out.push_back(s.kind);
    }
    return out;
}

std::string AgentTrace::to_jsonl() const {
    std::string out;
    for (const auto& s : steps) {
        ojson j;
        j["step"] = s.step_no;
        j["kind"] = s.kind;
        if (s.request) j["request"] = s.request->to_json();
        if (!s.answer.empty()) j["answer"] = s.answer;
        j["observation"] = s.observation;
        j["consecutive_empty_searches"] = s.consecutive_empty_searches;
        if (s.sufficient) j["sufficient"] = *s.sufficient;
        out += j.dump() + "\n";
    }
    ojson summary;
    summary["question"] = question;
    summary["answer"] = answer;
    summary["termination"] = to_string(termination);
    summary["tool_calls_used"] = tool_calls_used;
    summary["tool_sequence"] = tool_sequence();
    summary["wall_time_seconds"] = wall_time_seconds;
    out += summary.dump() + "\n";
    return out;
}

AgentResult answer_question(const std::string& question, ToolClient& tools, LlmPort& llm, const AgentConfig& config) {
    if (config.t_max == 0 || config.patience == 0 || config.search_limit == 0)
        throw std::invalid_argument("agent budget, patience and search limit must be positive");
    auto start = std::chrono::steady_clock::now();
    auto trace = AgentRun(question, tools, llm, config).run();
    trace.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    auto answer = trace.answer;
    return {std::move(answer), std::move(trace)};
}

}  // namespace llmwiki
