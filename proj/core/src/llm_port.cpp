#include "llmwiki/llm_port.hpp"

#include <fstream>
#include <sstream>

#include "llmwiki/errors.hpp"
#include "llmwiki/text.hpp"

namespace llmwiki {

namespace {

constexpr std::pair<Purpose, std::string_view> kPurposes[] = {
    {Purpose::select, "select"},
    {Purpose::compile, "compile"},
    {Purpose::digest, "digest"},
    {Purpose::attribute, "attribute"},
    {Purpose::verify_fact, "verify_fact"},
    {Purpose::consistency, "consistency"},
    {Purpose::periodic_fix, "periodic_fix"},
    {Purpose::agent_step, "agent_step"},
    {Purpose::sufficiency, "sufficiency"},
};

std::string read_all(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Role role_from_string(std::string_view s) {
    if (s == "system") return Role::system;
    if (s == "assistant") return Role::assistant;
    if (s == "user") return Role::user;
    throw Error("unknown message role: " + std::string(s));
}

std::string prompt_digest(const LlmRequest& request) {
    auto joined = request.joined();
    auto head = joined.substr(0, 80);
    for (auto& c : head) {
        if (c == '\n') c = ' ';
    }
    return text::hex64(text::fnv1a64(joined)) + " \"" + head + (joined.size() > 80 ? "...\"" : "\"");
}

}  // namespace

std::string_view to_string(Purpose purpose) {
    for (const auto& [p, name] : kPurposes) {
        if (p == purpose) return name;
    }
    return "unknown";
}

std::optional<Purpose> purpose_from_string(std::string_view name) {
    for (const auto& [p, n] : kPurposes) {
        if (n == name) return p;
    }
    return std::nullopt;
}

std::string_view to_string(Role role) {
    switch (role) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
    }
    return "user";
}

LlmRequest LlmRequest::make(Purpose purpose, std::string system, std::string user) {
    LlmRequest r;
    r.purpose = purpose;
    if (!system.empty()) r.messages.push_back({Role::system, std::move(system)});
    r.messages.push_back({Role::user, std::move(user)});
    return r;
}

std::string LlmRequest::joined() const {
    std::string out;
    for (const auto& m : messages) {
        if (!out.empty()) out += '\n';
        out += m.text;
    }
    return out;
}

Transcript::Transcript(const Transcript& other) {
    std::lock_guard lock(other.mu_);
    records_ = other.records_;
}

Transcript& Transcript::operator=(const Transcript& other) {
    if (this == &other) return *this;
    std::scoped_lock lock(mu_, other.mu_);
    records_ = other.records_;
    return *this;
}

std::uint64_t Transcript::append(Purpose purpose, std::vector<Message> request, std::string response) {
    std::lock_guard lock(mu_);
    auto seq = static_cast<std::uint64_t>(records_.size()) + 1;
    records_.push_back({seq, purpose, std::move(request), std::move(response)});
    return seq;
}

std::vector<TranscriptRecord> Transcript::records() const {
    std::lock_guard lock(mu_);
    return records_;
}

std::size_t Transcript::size() const {
    std::lock_guard lock(mu_);
    return records_.size();
}

std::string Transcript::to_jsonl() const {
    std::string out;
    for (const auto& r : records()) {
        nlohmann::ordered_json j;
        j["seq"] = r.seq;
        j["purpose"] = to_string(r.purpose);
        auto msgs = nlohmann::ordered_json::array();
        for (const auto& m : r.request) msgs.push_back({{"role", to_string(m.role)}, {"text", m.text}});
        j["request"] = std::move(msgs);
        j["response"] = r.response;
        out += j.dump();
        out += '\n';
    }
    return out;
}

void Transcript::save(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write transcript " + file.string());
    out << to_jsonl();
}

Transcript Transcript::from_jsonl(std::string_view jsonl) {
    Transcript t;
    std::size_t line_no = 0;
    for (const auto& line : text::split_lines(jsonl)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            auto j = nlohmann::json::parse(line);
            auto purpose = purpose_from_string(j.at("purpose").get<std::string>());
            if (!purpose) throw Error("unknown purpose");
            std::vector<Message> msgs;
            for (const auto& m : j.at("request")) {
                msgs.push_back({role_from_string(m.at("role").get<std::string>()), m.at("text").get<std::string>()});
            }
            t.append(*purpose, std::move(msgs), j.at("response").get<std::string>());
        } catch (const std::exception& e) {
            throw Error("transcript line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return t;
}

Transcript Transcript::load(const std::filesystem::path& file) { return from_jsonl(read_all(file)); }

std::string LlmPort::complete(const LlmRequest& request) {
    bool has_user = false;
    for (const auto& m : request.messages) has_user = has_user || m.role == Role::user;
    if (!has_user) throw LlmError("request for " + std::string(to_string(request.purpose)) + " has no user message");
    auto response = do_complete(request);
    transcript_.append(request.purpose, request.messages, response);
    return response;
}

ScriptedLlm& ScriptedLlm::add(ScriptedRule rule) {
    std::lock_guard lock(mu_);
    rules_.push_back(std::move(rule));
    return *this;
}

ScriptedLlm& ScriptedLlm::on(Purpose purpose, std::vector<std::string> contains, std::string response,
                             std::optional<std::size_t> max_uses) {
    return add(ScriptedRule{purpose, std::move(contains), std::move(response), max_uses, 0});
}

ScriptedLlm ScriptedLlm::from_json(const nlohmann::json& doc) {
    ScriptedLlm llm;
    const auto& rules = doc.is_array() ? doc : doc.at("rules");
    std::size_t i = 0;
    for (const auto& r : rules) {
        try {
            ScriptedRule rule;
            if (r.contains("purpose") && !r.at("purpose").is_null()) {
                auto p = purpose_from_string(r.at("purpose").get<std::string>());
                if (!p) throw Error("unknown purpose " + r.at("purpose").get<std::string>());
                rule.purpose = p;
            }
            if (r.contains("contains")) {
                const auto& c = r.at("contains");
                if (c.is_string()) {
                    rule.contains.push_back(c.get<std::string>());
                } else {
                    for (const auto& s : c) rule.contains.push_back(s.get<std::string>());
                }
            }
            rule.response = r.at("response").get<std::string>();
            if (r.contains("max_uses") && !r.at("max_uses").is_null()) rule.max_uses = r.at("max_uses").get<std::size_t>();
            llm.rules_.push_back(std::move(rule));
        } catch (const nlohmann::json::exception& e) {
            throw Error("script rule " + std::to_string(i) + ": " + e.what());
        }
        ++i;
    }
    return llm;
}

ScriptedLlm ScriptedLlm::load(const std::filesystem::path& file) {
    try {
        return from_json(nlohmann::json::parse(read_all(file)));
    } catch (const nlohmann::json::exception& e) {
        throw Error("script " + file.string() + ": " + e.what());
    }
}

std::string ScriptedLlm::do_complete(const LlmRequest& request) {
    auto joined = request.joined();
    std::lock_guard lock(mu_);
    for (auto& rule : rules_) {
        if (rule.exhausted()) continue;
        if (rule.purpose && *rule.purpose != request.purpose) continue;
        bool all = true;
        for (const auto& needle : rule.contains) {
            if (joined.find(needle) == std::string::npos) {
                all = false;
                break;
            }
        }
        if (!all) continue;
        ++rule.uses;
        return rule.response;
    }
    throw UnscriptedRequest("no scripted rule for purpose " + std::string(to_string(request.purpose)) + ", prompt " +
                            prompt_digest(request));
}

ReplayLlm::ReplayLlm(const Transcript& recorded) : records_(recorded.records()) {}

std::string ReplayLlm::do_complete(const LlmRequest& request) {
    std::lock_guard lock(mu_);
    if (next_ >= records_.size()) {
        throw ReplayMismatch("transcript exhausted at call " + std::to_string(next_ + 1) + " (" +
                             std::string(to_string(request.purpose)) + ")");
    }
    const auto& rec = records_[next_];
    if (rec.purpose != request.purpose) {
        throw ReplayMismatch("call " + std::to_string(next_ + 1) + " expected purpose " +
                             std::string(to_string(rec.purpose)) + " but got " +
                             std::string(to_string(request.purpose)));
    }
    ++next_;
    return rec.response;
}

}  // namespace llmwiki
