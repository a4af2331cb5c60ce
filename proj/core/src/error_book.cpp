#include "llmwiki/error_book.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <utility>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "llmwiki/errors.hpp"
#include "llmwiki/llm_port.hpp"
#include "llmwiki/text.hpp"

namespace llmwiki {

namespace {

constexpr std::size_t kAttributionExamples = 5;

struct Attribution {
    std::string root_cause;
    std::string constraint;
};

std::optional<Attribution> parse_attribution(std::string_view reply) {
    Attribution a;
    for (const auto& line : text::split_lines(reply)) {
        auto t = text::trim(line);
        auto colon = t.find(':');
        if (colon == std::string_view::npos) continue;
        auto key = text::to_lower(text::trim(t.substr(0, colon)));
        auto value = std::string(text::trim(t.substr(colon + 1)));
        if (key == "root_cause" || key == "root cause") a.root_cause = value;
        if (key == "constraint" || key == "constraint_rule" || key == "constraint rule") a.constraint = value;
    }
    if (a.root_cause.empty() || a.constraint.empty()) return std::nullopt;
    return a;
}

void attribute(ErrorBookEntry& entry, const std::vector<const ValidationError*>& group, const std::string& signature,
               LlmPort& llm) {
    static const std::string kSystem =
        "You analyse recurring errors made while compiling passages into wiki pages. Identify the root cause and "
        "formalize it as one natural-language constraint rule for future compilation prompts. Reply with exactly "
        "two lines:\nROOT_CAUSE: <one sentence>\nCONSTRAINT: <one imperative rule>";
    std::string user = "Error type: " + std::string(to_string(entry.error_type)) + " (" +
                       std::string(display_name(entry.error_type)) + ")\nPattern: " + signature +
                       "\nDetection: " + entry.verification_method + "\nExamples:\n";
    for (std::size_t i = 0; i < group.size() && i < kAttributionExamples; ++i) {
        user += "- " + group[i]->path.str() + ": " + group[i]->detail + "\n";
    }
    std::optional<Attribution> a;
    try {
        a = parse_attribution(llm.complete(LlmRequest::make(Purpose::attribute, kSystem, user)));
    } catch (const LlmError&) {
        a.reset();
    }
    if (a) {
        entry.root_cause = a->root_cause;
        entry.constraint_rule = a->constraint;
    } else {
        entry.root_cause = std::string(kUnattributed);
        if (entry.constraint_rule.empty()) entry.constraint_rule = default_constraint(entry.error_type);
    }
}

void merge_paths(std::vector<SlugPath>& into, const std::vector<const ValidationError*>& group) {
    std::set<SlugPath> all(into.begin(), into.end());
    for (const auto* e : group) all.insert(e->path);
    into.assign(all.begin(), all.end());
}

std::string yaml_text(const YAML::Node& entry, const char* key, std::size_t index) {
    auto n = entry[key];
    if (!n || !n.IsScalar()) throw BookFormatError(index, std::string("missing or non-scalar key '") + key + "'");
    return n.Scalar();
}

int yaml_int(const YAML::Node& entry, const char* key, std::size_t index) {
    try {
        auto n = entry[key];
        if (!n) throw BookFormatError(index, std::string("missing key '") + key + "'");
        return n.as<int>();
    } catch (const YAML::Exception&) {
        throw BookFormatError(index, std::string("key '") + key + "' is not an integer");
    }
}

}  // namespace

std::string_view to_string(ErrorBookEntry::Status status) {
    return status == ErrorBookEntry::Status::open ? "open" : "closed";
}

const ErrorBookEntry* ErrorBook::find(const std::string& id) const {
    for (const auto& e : entries) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

ErrorBookEntry* ErrorBook::find(const std::string& id) {
    return const_cast<ErrorBookEntry*>(std::as_const(*this).find(id));
}

std::size_t ErrorBook::open_count() const {
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& e) {
        return e.status == ErrorBookEntry::Status::open;
    }));
}

std::string error_signature(const ValidationError& error) {
    auto section = error.locus ? error.locus->section : std::string(section::page);
    return std::string(to_string(error.error_type)) + "|" + std::string(error.path.directory()) + "|" + section;
}

std::string entry_id(ErrorType type, const std::string& signature) {
    return text::hex64(text::fnv1a64(std::string(to_string(type)) + "#" + signature));
}

std::string default_constraint(ErrorType type) {
    switch (type) {
        case ErrorType::DanglingLink: return "NEVER create a link to a page not present in _index.md.";
        case ErrorType::IncompletePage:
            return "Every page MUST have a title, a one-line summary, at least one key fact and at least one related source.";
        case ErrorType::MalformedRef: return "Cite sources ONLY in the form [[sources/digests/<slug>]].";
        case ErrorType::UnseenOverwrite: return "NEVER modify an existing page that was not selected for this passage.";
        case ErrorType::IndexInconsistency:
            return "Add every new page to its directory _index.md and never list pages that do not exist.";
        case ErrorType::UnsupportedFact:
            return "Do not add entity attributes unless they are supported by the cited source digest.";
        case ErrorType::CrossPageContradiction:
            return "Check linked pages before stating dates or relations; do not contradict them.";
    }
    return {};
}

ErrorBook record_errors(ErrorBook book, const std::vector<ValidationError>& errors, int batch_no, LlmPort& llm) {
    book.batch_counter = std::max(book.batch_counter, batch_no);
    std::map<std::string, std::vector<const ValidationError*>> groups;
    for (const auto& e : errors) groups[error_signature(e)].push_back(&e);

    for (const auto& [signature, group] : groups) {
        auto type = group.front()->error_type;
        auto id = entry_id(type, signature);
        if (auto* existing = book.find(id)) {
            existing->occurrences += 1;
            existing->last_seen_batch = std::max(existing->last_seen_batch, batch_no);
            existing->status = ErrorBookEntry::Status::open;
            merge_paths(existing->affected_paths, group);
            if (existing->needs_attribution()) attribute(*existing, group, signature, llm);
            continue;
        }
        ErrorBookEntry entry;
        entry.id = id;
        entry.error_type = type;
        auto parts = text::split(signature, '|');
        entry.phenomenon = std::string(display_name(type)) + " in " + parts[1] + "/ pages (" + parts[2] +
                           "), e.g. " + group.front()->path.str() + ": " + group.front()->detail;
        entry.verification_method = std::string(detection_method(type));
        entry.occurrences = 1;
        entry.first_seen_batch = batch_no;
        entry.last_seen_batch = batch_no;
        merge_paths(entry.affected_paths, group);
        attribute(entry, group, signature, llm);
        book.entries.push_back(std::move(entry));
    }
    return book;
}

std::vector<std::string> active_constraints(const ErrorBook& book, std::size_t cap) {
    std::vector<const ErrorBookEntry*> open;
    for (const auto& e : book.entries) {
        if (e.status == ErrorBookEntry::Status::open) open.push_back(&e);
    }
    std::sort(open.begin(), open.end(), [](const auto* a, const auto* b) {
        if (a->occurrences != b->occurrences) return a->occurrences > b->occurrences;
        if (a->last_seen_batch != b->last_seen_batch) return a->last_seen_batch > b->last_seen_batch;
        return a->id < b->id;
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < open.size() && i < cap; ++i) out.push_back(open[i]->constraint_rule);
    return out;
}

ErrorBook verify_and_close(ErrorBook book, const WikiSnapshot& snapshot, LlmPort& llm) {
    bool any_open_structural = false;
    for (const auto& e : book.entries) {
        any_open_structural |= e.status == ErrorBookEntry::Status::open && is_structural(e.error_type);
    }
    std::vector<ValidationError> structural;
    if (any_open_structural) structural = validate_structural(snapshot, {}, {});
    auto view = WikiView::of(snapshot);

    for (auto& entry : book.entries) {
        if (entry.status != ErrorBookEntry::Status::open) continue;
        std::set<SlugPath> affected(entry.affected_paths.begin(), entry.affected_paths.end());
        std::vector<ValidationError> findings;
        if (is_structural(entry.error_type)) {
            findings = structural;
        } else {
            try {
                findings = validate_content_paths(view, entry.affected_paths, llm);
            } catch (const LlmError&) {
                continue;  // cannot re-verify; stays open
            }
        }
        bool recurs = std::any_of(findings.begin(), findings.end(), [&](const ValidationError& e) {
            return affected.contains(e.path) && entry_id(e.error_type, error_signature(e)) == entry.id;
        });
        if (recurs) {
            entry.last_seen_batch = std::max(entry.last_seen_batch, book.batch_counter);
        } else {
            entry.status = ErrorBookEntry::Status::closed;
        }
    }
    return book;
}

std::string book_to_yaml(const ErrorBook& book) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "batch_counter" << YAML::Value << book.batch_counter;
    out << YAML::Key << "entries" << YAML::Value << YAML::BeginSeq;
    for (const auto& e : book.entries) {
        out << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << YAML::DoubleQuoted << e.id;
        out << YAML::Key << "error_type" << YAML::Value << std::string(to_string(e.error_type));
        out << YAML::Key << "phenomenon" << YAML::Value << e.phenomenon;
        out << YAML::Key << "root_cause" << YAML::Value << e.root_cause;
        out << YAML::Key << "constraint_rule" << YAML::Value << e.constraint_rule;
        out << YAML::Key << "verification_method" << YAML::Value << e.verification_method;
        out << YAML::Key << "status" << YAML::Value << std::string(to_string(e.status));
        out << YAML::Key << "occurrences" << YAML::Value << e.occurrences;
        out << YAML::Key << "first_seen_batch" << YAML::Value << e.first_seen_batch;
        out << YAML::Key << "last_seen_batch" << YAML::Value << e.last_seen_batch;
        out << YAML::Key << "affected_paths" << YAML::Value << YAML::BeginSeq;
        for (const auto& p : e.affected_paths) out << p.str();
        out << YAML::EndSeq;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

ErrorBook book_from_yaml(std::string_view source) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(source));
    } catch (const YAML::Exception& e) {
        throw Error(std::string("error book is not valid YAML: ") + e.what());
    }
    ErrorBook book;
    if (root.IsNull()) return book;
    if (!root.IsMap()) throw Error("error book must be a mapping with 'entries' and 'batch_counter'");
    if (auto bc = root["batch_counter"]) {
        try {
            book.batch_counter = bc.as<int>();
        } catch (const YAML::Exception&) {
            throw Error("error book batch_counter is not an integer");
        }
    }
    auto entries = root["entries"];
    if (!entries || entries.IsNull()) return book;
    if (!entries.IsSequence()) throw Error("error book 'entries' must be a list");

    std::set<std::string> ids;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& n = entries[i];
        if (!n.IsMap()) throw BookFormatError(i, "entry is not a mapping");
        ErrorBookEntry e;
        e.id = yaml_text(n, "id", i);
        auto type = error_type_from_string(yaml_text(n, "error_type", i));
        if (!type) throw BookFormatError(i, "unknown error_type");
        e.error_type = *type;
        e.phenomenon = yaml_text(n, "phenomenon", i);
        e.root_cause = yaml_text(n, "root_cause", i);
        e.constraint_rule = yaml_text(n, "constraint_rule", i);
        e.verification_method = yaml_text(n, "verification_method", i);
        auto status = yaml_text(n, "status", i);
        if (status == "open") {
            e.status = ErrorBookEntry::Status::open;
        } else if (status == "closed") {
            e.status = ErrorBookEntry::Status::closed;
        } else {
            throw BookFormatError(i, "status must be open or closed");
        }
        e.occurrences = yaml_int(n, "occurrences", i);
        e.first_seen_batch = yaml_int(n, "first_seen_batch", i);
        e.last_seen_batch = yaml_int(n, "last_seen_batch", i);
        if (e.occurrences < 1) throw BookFormatError(i, "occurrences must be at least 1");
        if (e.last_seen_batch < e.first_seen_batch) throw BookFormatError(i, "last_seen_batch precedes first_seen_batch");
        auto paths = n["affected_paths"];
        if (paths && !paths.IsNull()) {
            if (!paths.IsSequence()) throw BookFormatError(i, "affected_paths must be a list");
            for (const auto& p : paths) {
                auto sp = p.IsScalar() ? SlugPath::parse(p.Scalar()) : std::nullopt;
                if (!sp) throw BookFormatError(i, "invalid affected path");
                e.affected_paths.push_back(*sp);
            }
        }
        if (!ids.insert(e.id).second) throw BookFormatError(i, "duplicate id " + e.id);
        book.entries.push_back(std::move(e));
    }
    return book;
}

void save_book(const ErrorBook& book, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + file.string());
    out << book_to_yaml(book);
}

ErrorBook load_book(const std::filesystem::path& file) {
    std::error_code ec;
    if (!std::filesystem::exists(file, ec)) return {};
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return book_from_yaml(ss.str());
}

DistributionReport distribution_report(const ErrorBook& book) {
    DistributionReport r;
    for (std::size_t i = 0; i < kAllErrorTypes.size(); ++i) r.rows[i].error_type = kAllErrorTypes[i];
    for (const auto& e : book.entries) {
        r.rows[static_cast<std::size_t>(e.error_type)].occurrences += e.occurrences;
        r.total += e.occurrences;
    }
    r.empty = r.total == 0;
    if (!r.empty) {
        for (auto& row : r.rows) row.percent = 100.0 * row.occurrences / r.total;
    }
    return r;
}

std::string DistributionReport::to_table() const {
    // Largest-remainder rounding to tenths of a percent.
    std::array<int, 7> tenths{};
    if (!empty) {
        std::array<double, 7> rem{};
        int assigned = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            double exact = rows[i].percent * 10.0;
            tenths[i] = static_cast<int>(std::floor(exact + 1e-9));
            rem[i] = exact - tenths[i];
            assigned += tenths[i];
        }
        std::array<std::size_t, 7> order{0, 1, 2, 3, 4, 5, 6};
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rem[a] > rem[b]; });
        for (std::size_t k = 0; assigned < 1000 && k < order.size(); ++k, ++assigned) ++tenths[order[k]];
    }
    std::ostringstream os;
    os << std::left << std::setw(28) << "Error Type" << std::right << std::setw(8) << "Share" << std::setw(8)
       << "Count" << "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::ostringstream pct;
        pct << tenths[i] / 10 << "." << tenths[i] % 10 << "%";
        os << std::left << std::setw(28) << display_name(rows[i].error_type) << std::right << std::setw(8) << pct.str()
           << std::setw(8) << rows[i].occurrences << "\n";
    }
    os << std::left << std::setw(28) << "Total" << std::right << std::setw(8) << (empty ? "0.0%" : "100.0%")
       << std::setw(8) << total << "\n";
    if (empty) os << "(empty error book)\n";
    return os.str();
}

}  // namespace llmwiki
