#include "llmwiki/tool_server.hpp"

#include <istream>
#include <ostream>

#include <httplib.h>

#include "llmwiki/codec.hpp"
#include "llmwiki/errors.hpp"

namespace llmwiki {

namespace {

using ojson = nlohmann::ordered_json;

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

ojson read_one(const std::string& raw, const WikiSnapshot& snapshot) {
    ojson r;
    r["path"] = raw;
    std::string_view path = raw;
    auto fail = [&](const char* code) {
        r["error"] = code;
        return r;
    };
    auto ok = [&](const char* kind, std::string text) {
        r["kind"] = kind;
        r["text"] = std::move(text);
        return r;
    };

    if (path == "index.md" || path == "index") return ok("index", render_global_index(snapshot.global()));
    if (ends_with(path, "/_index.md") || ends_with(path, "/_index")) {
        auto dir = path.substr(0, path.rfind('/'));
        if (!is_knowledge_directory(dir)) return fail("invalid_path");
        const auto* idx = snapshot.find_index(std::string(dir));
        return idx ? ok("index", render_index(*idx)) : fail("not_found");
    }
    if (ends_with(path, ".md")) path.remove_suffix(3);
    auto p = SlugPath::parse(path);
    if (!p) return fail("invalid_path");
    if (p->is_source()) {
        const auto* src = snapshot.find_source(*p);
        return src ? ok("source", src->text) : fail("not_found");
    }
    const auto* page = snapshot.find_page(*p);
    return page ? ok("page", render_page(*page)) : fail("not_found");
}

}  // namespace

nlohmann::ordered_json ToolRequest::to_json() const {
    ojson j;
    j["tool"] = tool();
    if (const auto* s = std::get_if<SearchArgs>(&args)) {
        j["args"] = {{"query", s->query}, {"limit", s->limit}};
    } else {
        j["args"] = {{"paths", std::get<ReadArgs>(args).paths}};
    }
    return j;
}

ToolRequest ToolRequest::search(std::string query, std::size_t limit) { return {SearchArgs{std::move(query), limit}}; }
ToolRequest ToolRequest::read(std::vector<std::string> paths) { return {ReadArgs{std::move(paths)}}; }

ToolRequest parse_tool_request(const nlohmann::json& body) {
    if (!body.is_object()) throw ProtocolError("bad_request", "request must be a JSON object");
    if (!body.contains("tool") || !body["tool"].is_string()) throw ProtocolError("bad_request", "missing 'tool'");
    auto tool = body["tool"].get<std::string>();
    nlohmann::json args = body.contains("args") ? body["args"] : nlohmann::json::object();
    if (!args.is_object()) throw ProtocolError("bad_args", "'args' must be an object");

    if (tool == "wiki_search") {
        if (!args.contains("query") || !args["query"].is_string())
            throw ProtocolError("bad_args", "wiki_search requires a string 'query'");
        SearchArgs s{args["query"].get<std::string>(), kDefaultSearchLimit};
        if (args.contains("limit")) {
            const auto& l = args["limit"];
            if (!l.is_number_integer() || l.get<long long>() < 1)
                throw ProtocolError("bad_args", "'limit' must be a positive integer");
            s.limit = l.get<std::size_t>();
        }
        return {s};
    }
    if (tool == "wiki_read") {
        if (!args.contains("paths") || !args["paths"].is_array())
            throw ProtocolError("bad_args", "wiki_read requires a 'paths' list");
        const auto& paths = args["paths"];
        if (paths.empty()) throw ProtocolError("bad_args", "'paths' must not be empty");
        if (paths.size() > kMaxReadPaths)
            throw ProtocolError("bad_args", "at most " + std::to_string(kMaxReadPaths) + " paths per read");
        ReadArgs r;
        for (const auto& p : paths) {
            if (!p.is_string()) throw ProtocolError("bad_args", "'paths' entries must be strings");
            r.paths.push_back(p.get<std::string>());
        }
        return {r};
    }
    throw ProtocolError("unknown_tool", "unknown tool '" + tool + "'");
}

nlohmann::ordered_json protocol_error(std::string_view code, std::string_view message) {
    ojson j;
    j["error"] = {{"code", code}, {"message", message}};
    return j;
}

nlohmann::ordered_json handle_wiki_search(const SearchArgs& args, const SearchIndex& index) {
    ojson hits = ojson::array();
    for (const auto& h : index.search(args.query, args.limit)) {
        ojson hit;
        hit["path"] = h.path.str();
        hit["score"] = h.score;
        hit["title"] = h.title;
        hit["aliases"] = h.aliases;
        hit["tags"] = h.tags;
        hit["summary"] = h.summary;
        hits.push_back(std::move(hit));
    }
    ojson j;
    j["hits"] = std::move(hits);
    return j;
}

nlohmann::ordered_json handle_wiki_read(const ReadArgs& args, const WikiSnapshot& snapshot) {
    ojson results = ojson::array();
    for (const auto& p : args.paths) results.push_back(read_one(p, snapshot));
    ojson j;
    j["results"] = std::move(results);
    return j;
}

ToolService::ToolService(std::shared_ptr<const WikiSnapshot> snapshot, std::shared_ptr<const SearchIndex> index)
    : served_{std::move(snapshot), std::move(index)} {}

ToolService::ToolService(WikiSnapshot snapshot, SearchIndex index)
    : served_{std::make_shared<const WikiSnapshot>(std::move(snapshot)),
              std::make_shared<const SearchIndex>(std::move(index))} {}

ToolService::Served ToolService::current() const {
    std::lock_guard lock(mu_);
    return served_;
}

void ToolService::swap(std::shared_ptr<const WikiSnapshot> snapshot, std::shared_ptr<const SearchIndex> index) {
    std::lock_guard lock(mu_);
    served_ = {std::move(snapshot), std::move(index)};
}

std::uint64_t ToolService::revision() const { return current().snapshot->revision(); }

nlohmann::ordered_json ToolService::handle(const ToolRequest& request) const {
    auto served = current();
    if (const auto* s = std::get_if<SearchArgs>(&request.args)) return handle_wiki_search(*s, *served.index);
    return handle_wiki_read(std::get<ReadArgs>(request.args), *served.snapshot);
}

nlohmann::ordered_json ToolService::handle(const nlohmann::json& body) const {
    try {
        return handle(parse_tool_request(body));
    } catch (const ProtocolError& e) {
        return protocol_error(e.code(), e.what());
    }
}

std::string ToolService::handle_text(std::string_view body) const {
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception&) {
        return protocol_error("malformed_json", "request body is not valid JSON").dump();
    }
    return handle(parsed).dump();
}

void serve_stdio(const ToolService& service, std::istream& in, std::ostream& out) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out << service.handle_text(line) << "\n";
        out.flush();
    }
}

struct HttpToolServer::Impl {
    explicit Impl(const ToolService& s) : service(s) {
        server.Post("/tool", [this](const httplib::Request& req, httplib::Response& res) {
            res.set_content(service.handle_text(req.body), "application/json");
        });
    }
    const ToolService& service;
    httplib::Server server;
};

HttpToolServer::HttpToolServer(const ToolService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpToolServer::~HttpToolServer() { stop(); }

int HttpToolServer::start(const std::string& host, int port) {
    int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound <= 0) throw ToolTransportError("cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void HttpToolServer::listen_blocking(const std::string& host, int port) {
    if (!impl_->server.listen(host, port)) throw ToolTransportError("cannot listen on " + host + ":" + std::to_string(port));
}

void HttpToolServer::stop() {
    if (impl_) impl_->server.stop();
    if (thread_.joinable()) thread_.join();
}

nlohmann::ordered_json LocalToolClient::call(const ToolRequest& request) { return service_.handle(request); }

std::string HttpToolClient::post(std::string_view body) {
    httplib::Client client(host_, port_);
    auto res = client.Post("/tool", std::string(body), "application/json");
    if (!res) throw ToolTransportError("tool server unreachable: " + httplib::to_string(res.error()));
    if (res->status != 200) throw ToolTransportError("tool server returned HTTP " + std::to_string(res->status));
    return res->body;
}

nlohmann::ordered_json HttpToolClient::call(const ToolRequest& request) {
    auto body = post(request.to_json().dump());
    try {
        return nlohmann::ordered_json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw ToolTransportError(std::string("tool server sent invalid JSON: ") + e.what());
    }
}

}  // namespace llmwiki
