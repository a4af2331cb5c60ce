#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace llmwiki {

enum class Purpose {
    select,
    compile,
    digest,
    attribute,
    verify_fact,
    consistency,
    periodic_fix,
    agent_step,
    sufficiency,
};

std::string_view to_string(Purpose purpose);
std::optional<Purpose> purpose_from_string(std::string_view name);

enum class Role { system, user, assistant };

std::string_view to_string(Role role);

struct Message {
    Role role = Role::user;
    std::string text;

    friend bool operator==(const Message&, const Message&) = default;
};

struct LlmRequest {
    Purpose purpose = Purpose::agent_step;
    std::vector<Message> messages;

    static LlmRequest make(Purpose purpose, std::string system, std::string user);

    /// All message texts joined with newlines; scripted rules match on this.
    std::string joined() const;
};

struct TranscriptRecord {
    std::uint64_t seq = 0;
    Purpose purpose = Purpose::agent_step;
    std::vector<Message> request;
    std::string response;
};

/// Append-ordered log of completed calls with a total order by seq.
class Transcript {
public:
    Transcript() = default;
    Transcript(const Transcript& other);
    Transcript& operator=(const Transcript& other);

    std::uint64_t append(Purpose purpose, std::vector<Message> request, std::string response);
    std::vector<TranscriptRecord> records() const;
    std::size_t size() const;

    std::string to_jsonl() const;
    void save(const std::filesystem::path& file) const;
    static Transcript from_jsonl(std::string_view text);
    static Transcript load(const std::filesystem::path& file);

private:
    mutable std::mutex mu_;
    std::vector<TranscriptRecord> records_;
};

/// Every model call in the system goes through this port.
class LlmPort {
public:
    virtual ~LlmPort() = default;

    /// Checks the request, runs the backend and appends the exchange to the
    /// transcript. Failed calls are not recorded.
    std::string complete(const LlmRequest& request);

    const Transcript& transcript() const { return transcript_; }

protected:
    virtual std::string do_complete(const LlmRequest& request) = 0;

private:
    Transcript transcript_;
};

struct ScriptedRule {
    std::optional<Purpose> purpose;     // unset matches every purpose
    std::vector<std::string> contains;  // all must occur in the joined prompt
    std::string response;
    std::optional<std::size_t> max_uses;
    std::size_t uses = 0;

    bool exhausted() const { return max_uses && uses >= *max_uses; }
};

/// Deterministic mock: the first unexhausted rule (in registration order)
/// whose purpose and substrings match supplies the response.
class ScriptedLlm : public LlmPort {
public:
    ScriptedLlm() = default;
    explicit ScriptedLlm(std::vector<ScriptedRule> rules) : rules_(std::move(rules)) {}
    ScriptedLlm(ScriptedLlm&& other) noexcept : LlmPort(other), rules_(std::move(other.rules_)) {}

    ScriptedLlm& add(ScriptedRule rule);
    ScriptedLlm& on(Purpose purpose, std::vector<std::string> contains, std::string response,
                    std::optional<std::size_t> max_uses = std::nullopt);

    /// `{"rules": [{"purpose": "...", "contains": [...], "response": "...", "max_uses": n}]}`
    static ScriptedLlm from_json(const nlohmann::json& doc);
    static ScriptedLlm load(const std::filesystem::path& file);

protected:
    std::string do_complete(const LlmRequest& request) override;

private:
    std::mutex mu_;
    std::vector<ScriptedRule> rules_;
};

/// Serves responses from a recorded transcript in order. A purpose mismatch
/// or running past the end throws ReplayMismatch.
class ReplayLlm : public LlmPort {
public:
    explicit ReplayLlm(const Transcript& recorded);

protected:
    std::string do_complete(const LlmRequest& request) override;

private:
    std::mutex mu_;
    std::vector<TranscriptRecord> records_;
    std::size_t next_ = 0;
};

struct HttpLlmConfig {
    std::string endpoint = "http://127.0.0.1:8000";  // scheme://host[:port]
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string token_env = "LLMWIKI_API_TOKEN";
    double temperature = 0.0;
    int timeout_seconds = 120;
};

/// OpenAI-compatible chat-completions client.
class HttpLlm : public LlmPort {
public:
    explicit HttpLlm(HttpLlmConfig config) : config_(std::move(config)) {}

protected:
    std::string do_complete(const LlmRequest& request) override;

private:
    HttpLlmConfig config_;
};

}  // namespace llmwiki
