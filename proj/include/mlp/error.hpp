#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlp {

enum class ErrorKind {
  BlankSolution,
  Parse,
  EmptyCorpus,
  AllBlank,
  IndexOutOfRange,
  ZeroColumn,
  InvalidArgument,
  MissingClusterGrade,
  CountMismatch,
  EmptyTrace,
  MissingGrades,
  EmptyAutoGradedSet,
  InvalidSpec,
  Schema,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by the expression parser. `offset` is a byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected,
             const std::string& found);

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

// Schema violations carry the JSON-pointer-like path of the offending field.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message)
      : Error(ErrorKind::Schema, path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace mlp
