#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace llmwiki {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Frontmatter block missing or unreadable; the page cannot be used.
class FrontmatterSyntaxError : public Error {
public:
    using Error::Error;
};

class InvalidUpdateError : public Error {
public:
    using Error::Error;
};

class LoadError : public Error {
public:
    using Error::Error;
};

class BookFormatError : public Error {
public:
    BookFormatError(std::size_t entry_index, const std::string& what)
        : Error("error book entry " + std::to_string(entry_index) + ": " + what),
          entry_index_(entry_index) {}
    std::size_t entry_index() const noexcept { return entry_index_; }

private:
    std::size_t entry_index_;
};

class LlmError : public Error {
public:
    using Error::Error;
};

class PortUnavailable : public LlmError {
public:
    using LlmError::LlmError;
};

class UnscriptedRequest : public LlmError {
public:
    using LlmError::LlmError;
};

class ReplayMismatch : public LlmError {
public:
    using LlmError::LlmError;
};

class MalformedLlmOutput : public Error {
public:
    using Error::Error;
};

class ParseFailure : public Error {
public:
    using Error::Error;
};

class ProtocolError : public Error {
public:
    ProtocolError(std::string code, const std::string& what)
        : Error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class ToolTransportError : public Error {
public:
    using Error::Error;
};

class EmptyDataset : public Error {
public:
    using Error::Error;
};

class CorpusFormatError : public Error {
public:
    CorpusFormatError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace llmwiki
