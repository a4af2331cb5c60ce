#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "llmwiki/agent.hpp"
#include "llmwiki/compiler.hpp"
#include "llmwiki/error_book.hpp"
#include "llmwiki/errors.hpp"
#include "llmwiki/eval.hpp"
#include "llmwiki/llm_port.hpp"
#include "llmwiki/repair.hpp"
#include "llmwiki/tool_server.hpp"
#include "llmwiki/validation.hpp"
#include "llmwiki/wiki_io.hpp"

namespace llmwiki::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kBookFile = "error_book.yaml";
constexpr const char* kCompileLog = "compile.log.jsonl";
constexpr const char* kRepairLog = "repair.log.jsonl";

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LlmOptions {
    std::string script;
    std::string replay;
    std::string endpoint;
    std::string model;
    std::string token_env = "LLMWIKI_API_TOKEN";
    std::string transcript_out;

    int modes() const { return !script.empty() + !replay.empty() + !endpoint.empty(); }
};

std::unique_ptr<LlmPort> make_port(const LlmOptions& o) {
    if (o.modes() == 0) throw UsageError("this command needs one of --llm-script, --llm-replay or --llm-endpoint");
    if (o.modes() > 1) throw UsageError("choose exactly one of --llm-script, --llm-replay and --llm-endpoint");
    if (!o.script.empty()) return std::make_unique<ScriptedLlm>(ScriptedLlm::load(o.script));
    if (!o.replay.empty()) return std::make_unique<ReplayLlm>(Transcript::load(o.replay));
    HttpLlmConfig cfg;
    cfg.endpoint = o.endpoint;
    cfg.model = o.model;
    cfg.token_env = o.token_env;
    return std::make_unique<HttpLlm>(cfg);
}

void save_transcript(const LlmOptions& o, const LlmPort* port) {
    if (port && !o.transcript_out.empty()) port->transcript().save(o.transcript_out);
}

WikiSnapshot load_wiki(const fs::path& root, std::ostream& err) {
    auto loaded = load_snapshot(root);
    for (const auto& issue : loaded.report) err << "warning: " << issue.path << ": " << issue.message << "\n";
    return std::move(loaded.snapshot);
}

void write_log(const fs::path& file, const std::vector<nlohmann::json>& log) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + file.string());
    for (const auto& l : log) out << l.dump() << "\n";
}

std::string describe(const ValidationError& e) {
    std::string s = e.path.str() + ": " + std::string(to_string(e.error_type));
    if (e.locus) {
        s += " [" + e.locus->section;
        if (e.locus->item >= 0) s += "#" + std::to_string(e.locus->item);
        s += "]";
    }
    return s + " " + e.detail;
}

std::pair<std::string, int> parse_address(const std::string& addr) {
    auto colon = addr.rfind(':');
    if (colon == std::string::npos) throw UsageError("address must be host:port");
    try {
        return {addr.substr(0, colon), std::stoi(addr.substr(colon + 1))};
    } catch (const std::exception&) {
        throw UsageError("invalid port in " + addr);
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compile passages into a validated wiki and answer questions over it.", "llmwiki"};
    app.require_subcommand(1);

    std::string root = ".";
    LlmOptions llm_opts;
    app.add_option("--wiki", root, "Wiki root directory")->capture_default_str();
    app.add_option("--llm-script,--llm", llm_opts.script, "Scripted LLM rules (JSON)");
    app.add_option("--llm-replay", llm_opts.replay, "Recorded transcript to replay (JSONL)");
    app.add_option("--llm-endpoint", llm_opts.endpoint, "OpenAI-compatible endpoint, e.g. http://host:8000");
    app.add_option("--model", llm_opts.model, "Model name for the live endpoint");
    app.add_option("--token-env", llm_opts.token_env, "Environment variable holding the API token")
        ->capture_default_str();
    app.add_option("--transcript-out", llm_opts.transcript_out, "Save every LLM exchange to this JSONL file");

    CompilerConfig ccfg;
    std::string corpus;
    bool no_finalize = false;
    auto* compile = app.add_subcommand("compile", "Compile a corpus into the wiki");
    compile->add_option("--corpus", corpus, "Line-delimited JSON passages {id, title, text}")->required();
    compile->add_option("--batch-size", ccfg.batch_size)->check(CLI::PositiveNumber)->capture_default_str();
    compile->add_option("--k", ccfg.k, "Pages selected per passage")->check(CLI::PositiveNumber)->capture_default_str();
    compile->add_option("--fix-every", ccfg.periodic_fix_every_n_articles, "Articles between LLM periodic fixes")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    compile->add_option("--revalidate-every", ccfg.revalidate_every_batches, "Batches between re-validation passes")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    compile->add_flag("--no-finalize", no_finalize, "Skip the final three-round repair loop");

    bool strict = false;
    bool with_content = false;
    auto* validate = app.add_subcommand("validate", "Report validation errors without modifying the wiki");
    validate->add_flag("--strict", strict, "Exit 1 when errors are found");
    validate->add_flag("--content", with_content, "Also run the LLM content checks");

    std::string layer;
    auto* repair = app.add_subcommand("repair", "Run one repair layer");
    repair->add_option("--layer", layer)->required()->check(CLI::IsMember({"code", "llm", "finalize"}));

    bool report_json = false;
    auto* errorbook = app.add_subcommand("errorbook", "Inspect the error book");
    errorbook->require_subcommand(1);
    auto* report = errorbook->add_subcommand("report", "Error-type distribution");
    report->add_flag("--json", report_json);

    bool serve_stdio_flag = false;
    std::string http_addr;
    auto* serve = app.add_subcommand("serve", "Serve wiki_search and wiki_read");
    auto* stdio_opt = serve->add_flag("--stdio", serve_stdio_flag, "Line-delimited JSON over stdin/stdout");
    auto* http_opt = serve->add_option("--http", http_addr, "Listen for POST /tool on host:port");
    stdio_opt->excludes(http_opt);

    AgentConfig acfg;
    std::string question;
    std::string trace_out;
    auto* ask = app.add_subcommand("ask", "Answer one question");
    ask->add_option("question", question)->required();
    ask->add_option("--trace", trace_out, "Write the agent trace (JSONL)");
    ask->add_option("--t-max", acfg.t_max)->check(CLI::PositiveNumber)->capture_default_str();
    ask->add_option("--patience", acfg.patience)->check(CLI::PositiveNumber)->capture_default_str();

    std::string qa_file;
    std::string eval_out;
    std::string traces_dir;
    std::size_t jobs = 1;
    auto* eval = app.add_subcommand("eval", "Run the agent over a QA file and score it");
    eval->add_option("--qa", qa_file)->required();
    eval->add_option("--out", eval_out)->required();
    eval->add_option("--traces", traces_dir, "Directory for per-question traces");
    eval->add_option("--jobs", jobs)->check(CLI::PositiveNumber)->capture_default_str();
    eval->add_option("--t-max", acfg.t_max)->check(CLI::PositiveNumber);
    eval->add_option("--patience", acfg.patience)->check(CLI::PositiveNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    std::unique_ptr<LlmPort> port;
    try {
        const fs::path wiki = root;

        if (compile->parsed()) {
            port = make_port(llm_opts);
            auto batches = ingest_corpus_file(corpus, ccfg.batch_size);
            auto state = make_state(load_wiki(wiki, err), load_book(wiki / kBookFile));
            std::size_t passages = 0;
            for (const auto& b : batches) {
                state = compile_batch(std::move(state), b, *port, ccfg);
                passages += b.size();
            }
            std::vector<nlohmann::json> repair_log;
            if (!no_finalize) {
                auto fin = finalize(state.snapshot, std::move(state.book), *port, static_cast<int>(state.batches_done));
                state.snapshot = std::move(fin.snapshot);
                state.book = std::move(fin.book);
                repair_log = std::move(fin.log);
            }
            write_snapshot(state.snapshot, wiki);
            save_book(state.book, wiki / kBookFile);
            write_log(wiki / kCompileLog, state.log);
            write_log(wiki / kRepairLog, repair_log);
            std::size_t skipped = std::count_if(state.log.begin(), state.log.end(),
                                                [](const auto& e) { return e.value("event", "") == "skipped"; });
            out << "compiled " << passages << " passages in " << batches.size() << " batches (" << skipped
                << " skipped); " << state.snapshot.pages().size() << " pages, " << state.book.open_count()
                << " open error book entries\n";
        } else if (validate->parsed()) {
            auto snapshot = load_wiki(wiki, err);
            auto errors = validate_structural(snapshot, {}, {});
            if (with_content) {
                port = make_port(llm_opts);
                std::vector<SlugPath> all;
                for (const auto& [p, _] : snapshot.pages()) all.push_back(p);
                auto content = validate_content_paths(WikiView::of(snapshot), all, *port);
                errors.insert(errors.end(), content.begin(), content.end());
            }
            for (const auto& e : errors) out << describe(e) << "\n";
            out << errors.size() << (errors.size() == 1 ? " error" : " errors") << "\n";
            save_transcript(llm_opts, port.get());
            return strict && !errors.empty() ? 1 : 0;
        } else if (repair->parsed()) {
            auto snapshot = load_wiki(wiki, err);
            auto book = load_book(wiki / kBookFile);
            std::vector<nlohmann::json> log;
            if (layer == "code") {
                auto errors = validate_structural(snapshot, {}, {});
                auto [updates, outcome] = code_auto_fix(snapshot, {}, errors);
                if (!updates.empty()) snapshot = apply_updates(snapshot, updates);
                log = std::move(outcome.log);
                out << outcome.fixed.size() << " fixed, " << outcome.residual.size() << " residual\n";
            } else if (layer == "llm") {
                port = make_port(llm_opts);
                auto fix = llm_periodic_fix(snapshot, book, *port);
                log = fix.log;
                if (!fix.updates.empty()) {
                    auto [next, outcome] = apply_checked(snapshot, fix.updates);
                    snapshot = std::move(next);
                    log.insert(log.end(), outcome.log.begin(), outcome.log.end());
                }
                for (const auto& s : fix.skipped) err << "skipped: " << s << "\n";
                out << fix.updates.page_writes.size() << " pages rewritten, " << fix.skipped.size() << " skipped\n";
            } else {
                port = make_port(llm_opts);
                auto fin = finalize(snapshot, std::move(book), *port, 0);
                snapshot = std::move(fin.snapshot);
                book = std::move(fin.book);
                log = std::move(fin.log);
                out << fin.rounds << " rounds; open entries: " << book.open_count() << "\n";
            }
            write_snapshot(snapshot, wiki);
            save_book(book, wiki / kBookFile);
            write_log(wiki / kRepairLog, log);
        } else if (errorbook->parsed()) {
            auto r = distribution_report(load_book(wiki / kBookFile));
            if (report_json) {
                nlohmann::ordered_json j;
                j["total"] = r.total;
                j["empty"] = r.empty;
                for (const auto& row : r.rows) j["rows"].push_back({{"error_type", to_string(row.error_type)},
                                                                   {"occurrences", row.occurrences},
                                                                   {"percent", row.percent}});
                out << j.dump(2) << "\n";
            } else {
                out << r.to_table();
            }
        } else if (serve->parsed()) {
            if (!serve_stdio_flag && http_addr.empty()) throw UsageError("serve needs --stdio or --http host:port");
            auto snapshot = load_wiki(wiki, err);
            auto index = SearchIndex::build(snapshot);
            ToolService service(std::move(snapshot), std::move(index));
            if (serve_stdio_flag) {
                serve_stdio(service, in, out);
            } else {
                auto [host, p] = parse_address(http_addr);
                HttpToolServer server(service);
                err << "serving POST /tool on " << host << ":" << p << "\n";
                server.listen_blocking(host, p);
            }
        } else if (ask->parsed()) {
            port = make_port(llm_opts);
            auto snapshot = load_wiki(wiki, err);
            auto index = SearchIndex::build(snapshot);
            ToolService service(std::move(snapshot), std::move(index));
            LocalToolClient tools(service);
            auto result = answer_question(question, tools, *port, acfg);
            if (!trace_out.empty()) {
                std::ofstream t(trace_out, std::ios::binary | std::ios::trunc);
                t << result.trace.to_jsonl();
            }
            out << result.answer << "\n";
        } else if (eval->parsed()) {
            port = make_port(llm_opts);
            auto dataset = load_qa_file(qa_file);
            auto snapshot = load_wiki(wiki, err);
            auto index = SearchIndex::build(snapshot);
            ToolService service(std::move(snapshot), std::move(index));
            LlmPort& llm = *port;
            EvalOptions opts;
            opts.output = eval_out;
            if (!traces_dir.empty()) opts.traces_dir = traces_dir;
            opts.jobs = jobs;
            auto summary = run_eval(
                dataset,
                [&](const QAExample& ex) {
                    LocalToolClient tools(service);
                    return answer_question(ex.question, tools, llm, acfg);
                },
                opts);
            out << summary.summary_json().dump(2) << "\n";
        }
        save_transcript(llm_opts, port.get());
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        save_transcript(llm_opts, port.get());
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace llmwiki::cli
