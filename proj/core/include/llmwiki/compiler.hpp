#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "llmwiki/error_book.hpp"
#include "llmwiki/search_index.hpp"
#include "llmwiki/snapshot.hpp"
#include "llmwiki/validation.hpp"

namespace llmwiki {

class LlmPort;

struct Passage {
    std::string source_id;
    std::string title;
    std::string text;
};

using Batch = std::vector<Passage>;

struct CompilerConfig {
    std::size_t k = 5;
    std::size_t batch_size = 8;
    std::size_t periodic_fix_every_n_articles = 25;
    std::size_t revalidate_every_batches = 10;
    std::size_t constraint_cap = 30;
    std::size_t compile_retry = 1;
    std::size_t index_prompt_budget = 32 * 1024;  // characters
    ContentSamplingConfig sampling;
};

struct CompileState {
    WikiSnapshot snapshot;
    ErrorBook book;
    SearchIndex index;
    std::size_t articles_since_fix = 0;
    std::size_t batches_done = 0;
    std::vector<nlohmann::json> log;  // compile events, one JSON object each
};

CompileState make_state(WikiSnapshot snapshot, ErrorBook book = {});

/// Line-delimited `{"id", "title", "text"}` records grouped into batches.
/// Throws CorpusFormatError naming the line for malformed or duplicate records.
std::vector<Batch> ingest_corpus(std::string_view jsonl, std::size_t batch_size);
std::vector<Batch> ingest_corpus_file(const std::filesystem::path& file, std::size_t batch_size);

/// Global index plus directory index digests; entries only (no summaries)
/// when the full serialization exceeds `budget` characters.
std::string index_digest(const WikiSnapshot& snapshot, std::size_t budget);

std::vector<SlugPath> select_pages(const Passage& passage, const CompileState& state, LlmPort& llm,
                                   const CompilerConfig& config);

/// Paths of the archive records created for a passage.
SlugPath digest_path_for(const Passage& passage);
SlugPath article_path_for(const Passage& passage);

/// Parses `=== FILE: <path> ===` blocks into an update set. Throws
/// MalformedLlmOutput when no usable block is found or a block fails to parse.
UpdateSet parse_file_blocks(std::string_view response);

/// First three sentences of the passage text.
std::string fallback_digest(std::string_view text);

struct CompileOutput {
    UpdateSet updates;
    std::string prompt;  // the user message sent for the successful attempt
};

/// Builds the compile prompt (with the constraint block), parses the reply,
/// and adds the passage digest and article records. Retries once on an
/// unparsable reply, then throws MalformedLlmOutput.
CompileOutput compile_wiki_pages(const Passage& passage, const std::vector<const WikiPage*>& selected,
                                 const std::vector<std::string>& constraints, LlmPort& llm,
                                 const CompilerConfig& config, const WikiSnapshot* snapshot = nullptr);

/// Runs the per-passage loop over a batch followed by periodic maintenance.
CompileState compile_batch(CompileState state, const Batch& batch, LlmPort& llm, const CompilerConfig& config);

}  // namespace llmwiki
