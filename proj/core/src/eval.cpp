#include "llmwiki/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "llmwiki/errors.hpp"
#include "llmwiki/text.hpp"

namespace llmwiki {

namespace {

using ojson = nlohmann::ordered_json;

bool word_byte(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u >= 0x80;
}

std::string file_safe(std::string_view id) {
    std::string out;
    for (char c : id) out.push_back(word_byte(c) || c == '-' || c == '_' ? c : '_');
    return out.empty() ? "example" : out;
}

ojson group_json(const GroupStats& g) {
    ojson j;
    j["n"] = g.n;
    j["mean_f1"] = g.mean_f1;
    j["mean_em"] = g.mean_em;
    return j;
}

template <typename Key>
void accumulate(std::map<Key, GroupStats>& groups, const Key& key, const ExampleRecord& r) {
    auto& g = groups[key];
    ++g.n;
    g.mean_f1 += r.f1;
    g.mean_em += r.em;
}

template <typename Key>
void finish(std::map<Key, GroupStats>& groups) {
    for (auto& [_, g] : groups) {
        g.mean_f1 /= static_cast<double>(g.n);
        g.mean_em /= static_cast<double>(g.n);
    }
}

ojson record_json(const ExampleRecord& r) {
    ojson j;
    j["id"] = r.id;
    j["question"] = r.question;
    j["gold"] = r.gold;
    j["prediction"] = r.prediction;
    j["f1"] = r.f1;
    j["em"] = r.em;
    j["latency_seconds"] = r.latency_seconds;
    j["tool_calls"] = r.tool_calls;
    j["termination"] = r.termination;
    if (r.hop_label) j["hop"] = *r.hop_label;
    if (r.type_label) j["type"] = *r.type_label;
    if (!r.trace_path.empty()) j["trace"] = r.trace_path;
    if (r.failed) j["failure"] = r.failure;
    return j;
}

}  // namespace

std::vector<std::string> normalize_answer(std::string_view answer) {
    std::string cleaned;
    for (char c : answer) {
        if (word_byte(c)) {
            cleaned.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (c == '-' || std::isspace(static_cast<unsigned char>(c))) {
            cleaned.push_back(c == '-' ? '-' : ' ');
        }
    }
    std::vector<std::string> tokens;
    std::istringstream is(cleaned);
    std::string w;
    while (is >> w) {
        // Hyphens survive only between word characters.
        std::string t;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (w[i] != '-') {
                t.push_back(w[i]);
            } else if (!t.empty() && t.back() != '-' && i + 1 < w.size() && word_byte(w[i + 1])) {
                t.push_back('-');
            }
        }
        if (t.empty() || t == "a" || t == "an" || t == "the") continue;
        tokens.push_back(t);
    }
    return tokens;
}

AnswerScore answer_f1_em(std::string_view prediction, std::string_view gold) {
    auto p = normalize_answer(prediction);
    auto g = normalize_answer(gold);
    AnswerScore s;
    s.em = p == g ? 1 : 0;
    if (p.empty() && g.empty()) {
        s.f1 = 1.0;
        return s;
    }
    if (p.empty() || g.empty()) return s;
    std::map<std::string, int> counts;
    for (const auto& t : g) ++counts[t];
    int common = 0;
    for (const auto& t : p) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++common;
        }
    }
    if (common == 0) return s;
    double precision = static_cast<double>(common) / p.size();
    double recall = static_cast<double>(common) / g.size();
    s.f1 = 2 * precision * recall / (precision + recall);
    return s;
}

std::vector<QAExample> load_qa(std::string_view jsonl) {
    std::vector<QAExample> out;
    std::set<std::string> ids;
    std::istringstream in{std::string(jsonl)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw CorpusFormatError(line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!rec.is_object()) throw CorpusFormatError(line_no, "record is not an object");
        QAExample ex;
        for (const char* key : {"question", "answer"}) {
            if (!rec.contains(key) || !rec[key].is_string())
                throw CorpusFormatError(line_no, std::string("missing string field '") + key + "'");
        }
        if (!rec.contains("id")) throw CorpusFormatError(line_no, "missing field 'id'");
        ex.id = rec["id"].is_string() ? rec["id"].get<std::string>() : rec["id"].dump();
        ex.question = rec["question"].get<std::string>();
        ex.gold_answer = rec["answer"].get<std::string>();
        if (rec.contains("hop") && !rec["hop"].is_null()) {
            if (!rec["hop"].is_number_integer()) throw CorpusFormatError(line_no, "'hop' must be an integer");
            ex.hop_label = rec["hop"].get<int>();
        }
        if (rec.contains("type") && !rec["type"].is_null()) {
            if (!rec["type"].is_string()) throw CorpusFormatError(line_no, "'type' must be a string");
            ex.type_label = rec["type"].get<std::string>();
        }
        if (!ids.insert(ex.id).second) throw CorpusFormatError(line_no, "duplicate id '" + ex.id + "'");
        out.push_back(std::move(ex));
    }
    return out;
}

std::vector<QAExample> load_qa_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open QA file " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_qa(ss.str());
}

nlohmann::ordered_json EvalSummary::summary_json() const {
    ojson j;
    j["n"] = n;
    j["mean_f1"] = mean_f1;
    j["mean_em"] = mean_em;
    j["mean_latency_seconds"] = mean_latency_seconds;
    ojson hops = ojson::object();
    for (const auto& [k, g] : per_hop) hops[std::to_string(k)] = group_json(g);
    j["per_hop"] = std::move(hops);
    ojson types = ojson::object();
    for (const auto& [k, g] : per_type) types[k] = group_json(g);
    j["per_type"] = std::move(types);
    j["failed"] = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.failed; });
    return j;
}

EvalSummary run_eval(const std::vector<QAExample>& dataset, const AgentFactory& agent, const EvalOptions& options) {
    if (dataset.empty()) throw EmptyDataset("evaluation dataset is empty");
    if (options.traces_dir) std::filesystem::create_directories(*options.traces_dir);

    std::vector<ExampleRecord> records(dataset.size());
    auto run_one = [&](std::size_t i) {
        const auto& ex = dataset[i];
        auto& r = records[i];
        r.id = ex.id;
        r.question = ex.question;
        r.gold = ex.gold_answer;
        r.hop_label = ex.hop_label;
        r.type_label = ex.type_label;
        auto start = std::chrono::steady_clock::now();
        try {
            auto result = agent(ex);
            r.latency_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            r.prediction = result.answer;
            r.tool_calls = result.trace.tool_calls_used;
            r.termination = std::string(to_string(result.trace.termination));
            auto score = answer_f1_em(r.prediction, r.gold);
            r.f1 = score.f1;
            r.em = score.em;
            if (options.traces_dir) {
                auto file = *options.traces_dir / (file_safe(ex.id) + ".jsonl");
                std::ofstream(file, std::ios::binary | std::ios::trunc) << result.trace.to_jsonl();
                r.trace_path = file.string();
            }
        } catch (const std::exception& e) {
            r.latency_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            r.failed = true;
            r.failure = e.what();
            r.f1 = 0.0;
            r.em = 0;
        }
    };

    std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, dataset.size());
    if (jobs == 1) {
        for (std::size_t i = 0; i < dataset.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (std::size_t w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < dataset.size(); i = next++) run_one(i);
            });
        }
        for (auto& t : workers) t.join();
    }

    EvalSummary s;
    s.n = records.size();
    for (const auto& r : records) {
        s.mean_f1 += r.f1;
        s.mean_em += r.em;
        s.mean_latency_seconds += r.latency_seconds;
        if (r.hop_label) accumulate(s.per_hop, *r.hop_label, r);
        if (r.type_label) accumulate(s.per_type, *r.type_label, r);
    }
    s.mean_f1 /= static_cast<double>(s.n);
    s.mean_em /= static_cast<double>(s.n);
    s.mean_latency_seconds /= static_cast<double>(s.n);
    finish(s.per_hop);
    finish(s.per_type);
    s.records = std::move(records);

    if (options.output) {
        std::ofstream out(*options.output, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + options.output->string());
        for (const auto& r : s.records) out << record_json(r).dump() << "\n";
        ojson summary;
        summary["summary"] = s.summary_json();
        out << summary.dump() << "\n";
    }
    return s;
}

}  // namespace llmwiki
