#include <cstdlib>

#include <httplib.h>

#include "llmwiki/errors.hpp"
#include "llmwiki/llm_port.hpp"

namespace llmwiki {

std::string HttpLlm::do_complete(const LlmRequest& request) {
    nlohmann::json body;
    body["model"] = config_.model;
    body["temperature"] = config_.temperature;
    auto msgs = nlohmann::json::array();
    for (const auto& m : request.messages) msgs.push_back({{"role", to_string(m.role)}, {"content", m.text}});
    body["messages"] = std::move(msgs);

    httplib::Client client(config_.endpoint);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);
    httplib::Headers headers;
    if (const char* token = std::getenv(config_.token_env.c_str()); token && *token) {
        headers.emplace("Authorization", std::string("Bearer ") + token);
    }
    auto res = client.Post(config_.path, headers, body.dump(), "application/json");
    if (!res) {
        throw PortUnavailable("transport failure talking to " + config_.endpoint + ": " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw PortUnavailable("model endpoint returned HTTP " + std::to_string(res->status));
    }
    try {
        auto j = nlohmann::json::parse(res->body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw PortUnavailable(std::string("unexpected completion payload: ") + e.what());
    }
}

}  // namespace llmwiki
