#pragma once

#include <atomic>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "llmwiki/search_index.hpp"
#include "llmwiki/snapshot.hpp"

namespace llmwiki {

inline constexpr std::size_t kMaxReadPaths = 20;
inline constexpr std::size_t kDefaultSearchLimit = 10;

struct SearchArgs {
    std::string query;
    std::size_t limit = kDefaultSearchLimit;
};

struct ReadArgs {
    std::vector<std::string> paths;
};

struct ToolRequest {
    std::variant<SearchArgs, ReadArgs> args;

    bool is_search() const { return std::holds_alternative<SearchArgs>(args); }
    std::string_view tool() const { return is_search() ? "wiki_search" : "wiki_read"; }
    nlohmann::ordered_json to_json() const;

    static ToolRequest search(std::string query, std::size_t limit = kDefaultSearchLimit);
    static ToolRequest read(std::vector<std::string> paths);
};

/// Throws ProtocolError (code `unknown_tool` or `bad_args`).
ToolRequest parse_tool_request(const nlohmann::json& body);

nlohmann::ordered_json protocol_error(std::string_view code, std::string_view message);

nlohmann::ordered_json handle_wiki_search(const SearchArgs& args, const SearchIndex& index);
nlohmann::ordered_json handle_wiki_read(const ReadArgs& args, const WikiSnapshot& snapshot);

/// Serves tool requests against an immutable (snapshot, index) pair that can
/// be swapped atomically between requests.
class ToolService {
public:
    ToolService(std::shared_ptr<const WikiSnapshot> snapshot, std::shared_ptr<const SearchIndex> index);
    ToolService(WikiSnapshot snapshot, SearchIndex index);

    nlohmann::ordered_json handle(const nlohmann::json& body) const;
    nlohmann::ordered_json handle(const ToolRequest& request) const;
    /// Body in, body out; malformed JSON yields a protocol error body.
    std::string handle_text(std::string_view body) const;

    void swap(std::shared_ptr<const WikiSnapshot> snapshot, std::shared_ptr<const SearchIndex> index);
    std::uint64_t revision() const;

private:
    struct Served {
        std::shared_ptr<const WikiSnapshot> snapshot;
        std::shared_ptr<const SearchIndex> index;
    };
    Served current() const;

    mutable std::mutex mu_;
    Served served_;
};

/// One JSON request per input line, one JSON response per output line.
void serve_stdio(const ToolService& service, std::istream& in, std::ostream& out);

/// HTTP transport: POST /tool with the same bodies as the stdio transport.
class HttpToolServer {
public:
    explicit HttpToolServer(const ToolService& service);
    ~HttpToolServer();
    HttpToolServer(const HttpToolServer&) = delete;
    HttpToolServer& operator=(const HttpToolServer&) = delete;

    /// Binds and serves on a background thread. Port 0 picks a free port.
    /// Returns the bound port; throws ToolTransportError when binding fails.
    int start(const std::string& host, int port);
    /// Blocks serving on the calling thread.
    void listen_blocking(const std::string& host, int port);
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
};

/// How the agent reaches the tools.
class ToolClient {
public:
    virtual ~ToolClient() = default;
    /// Throws ToolTransportError when the transport fails.
    virtual nlohmann::ordered_json call(const ToolRequest& request) = 0;
};

class LocalToolClient : public ToolClient {
public:
    explicit LocalToolClient(const ToolService& service) : service_(service) {}
    nlohmann::ordered_json call(const ToolRequest& request) override;

private:
    const ToolService& service_;
};

class HttpToolClient : public ToolClient {
public:
    HttpToolClient(std::string host, int port) : host_(std::move(host)), port_(port) {}
    nlohmann::ordered_json call(const ToolRequest& request) override;
    /// Raw body round trip, used by transport-equivalence checks.
    std::string post(std::string_view body);

private:
    std::string host_;
    int port_;
};

}  // namespace llmwiki
