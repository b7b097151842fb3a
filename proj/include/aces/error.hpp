#pragma once

#include <stdexcept>
#include <string>

namespace aces {

// Base of every error raised by the library. Callers that only care about
// success/failure catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or unsupported configuration. field() names the offending key.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::string field, const std::string& detail = {})
      : Error(detail.empty() ? "invalid config field: " + field
                             : "invalid config field: " + field + " (" + detail + ")"),
        field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

// A backend (model session, tokenizer, stub table) failed to produce output.
class InferenceError : public Error {
 public:
  using Error::Error;
};

class EmptyText : public Error {
 public:
  EmptyText() : Error("empty text") {}
};

class EmptyGroup : public Error {
 public:
  explicit EmptyGroup(const std::string& what = "empty token group") : Error(what) {}
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t a, std::size_t b)
      : Error("embedding dimension mismatch: " + std::to_string(a) + " vs " +
              std::to_string(b)) {}
};

class OverlapOutOfRange : public Error {
 public:
  OverlapOutOfRange(long count, long total)
      : Error("overlap count " + std::to_string(count) + " outside [0, " +
              std::to_string(total) + "]") {}
};

class EmptyReferences : public Error {
 public:
  EmptyReferences() : Error("at least one reference caption is required") {}
};

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("corpus contains no scored pairs") {}
};

// Required backend was not supplied (e.g. fluency weighing is on but no
// fluency model is loaded).
class MissingBackend : public Error {
 public:
  explicit MissingBackend(const std::string& component)
      : Error("missing backend: " + component), component_(component) {}

  const std::string& component() const { return component_; }

 private:
  std::string component_;
};

// Malformed input file. line() is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& detail)
      : Error("line " + std::to_string(line) + ": " + detail), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::size_t line, const std::string& detail)
      : Error("line " + std::to_string(line) + ": " + detail), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class NonFiniteScore : public Error {
 public:
  NonFiniteScore() : Error("metric returned a non-finite score") {}
};

}  // namespace aces
