#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace zest {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed plan text. `line` is 1-based, `column` is the 0-based byte offset
/// within that line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", offset " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t actual)
      : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
              std::to_string(actual)) {}
};

class ZeroVector : public Error {
 public:
  ZeroVector() : Error("cosine similarity undefined for a zero vector") {}
};

class EmbeddingError : public Error {
 public:
  using Error::Error;
};

/// Transport or protocol failure talking to a remote embedding service.
class RemoteError : public EmbeddingError {
 public:
  using EmbeddingError::EmbeddingError;
};

class EmptyList : public Error {
 public:
  EmptyList() : Error("cannot aggregate an empty list of configurations") {}
};

class EmptyIndex : public Error {
 public:
  EmptyIndex() : Error("retrieval index is empty") {}
};

class InconsistentGroup : public Error {
 public:
  using Error::Error;
};

class EmbedderMismatch : public Error {
 public:
  using Error::Error;
};

class InsufficientQueries : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class FormatVersionError : public Error {
 public:
  using Error::Error;
};

/// A record, profile or suite file that parsed but holds invalid data.
/// `where` names the offending record, e.g. "records.jsonl:17".
class DataError : public Error {
 public:
  DataError(const std::string& where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), where_(where) {}

  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

class InvalidWorkload : public Error {
 public:
  using Error::Error;
};

}  // namespace zest
