#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slrkb {

// Base class for all library errors so callers can catch one type.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input stream produced zero valid records.
class EmptyCorpusError : public Error {
public:
    EmptyCorpusError() : Error("no valid records in input") {}
};

// Bad configuration file (lexicon, vocabulary).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Heading token outside the heading lexicon.
class UnknownHeadingError : public Error {
public:
    explicit UnknownHeadingError(const std::string& token)
        : Error("unknown heading token: " + token) {}
};

// Malformed serialized knowledge base.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Malformed query text. Carries the byte offset and what was expected there.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t pos, const std::string& expected)
        : Error("query syntax error at offset " + std::to_string(pos) +
                ": expected " + expected),
          pos_(pos), expected_(expected) {}
    std::size_t pos() const { return pos_; }
    const std::string& expected() const { return expected_; }

private:
    std::size_t pos_;
    std::string expected_;
};

// Query or shortcut referenced a resource/predicate the KB has never seen.
class UnknownNameError : public Error {
public:
    explicit UnknownNameError(const std::string& name)
        : Error("unknown name: " + name), name_(name) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

// Same study asserted twice into a knowledge base.
class DuplicateStudyError : public Error {
public:
    explicit DuplicateStudyError(const std::string& id)
        : Error("study already asserted: " + id) {}
};

// A triple failed a schema domain/range rule at assertion time.
class SchemaViolationError : public Error {
public:
    explicit SchemaViolationError(const std::string& msg) : Error(msg) {}
};

}  // namespace slrkb
