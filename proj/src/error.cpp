#include "mlp/error.hpp"

namespace mlp {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::BlankSolution: return "BlankSolution";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::AllBlank: return "AllBlank";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::ZeroColumn: return "ZeroColumn";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::MissingClusterGrade: return "MissingClusterGrade";
    case ErrorKind::CountMismatch: return "CountMismatch";
    case ErrorKind::EmptyTrace: return "EmptyTrace";
    case ErrorKind::MissingGrades: return "MissingGrades";
    case ErrorKind::EmptyAutoGradedSet: return "EmptyAutoGradedSet";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::Schema: return "SchemaError";
    case ErrorKind::Io: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string describe(std::size_t offset, const std::vector<std::string>& expected,
                     const std::string& found) {
  std::string msg = "parse error at byte " + std::to_string(offset) + ": expected ";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) msg += (i + 1 == expected.size()) ? " or " : ", ";
    msg += expected[i];
  }
  msg += ", found " + found;
  return msg;
}

}  // namespace

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected,
                       const std::string& found)
    : Error(ErrorKind::Parse, describe(offset, expected, found)),
      offset_(offset),
      expected_(std::move(expected)) {}

}  // namespace mlp
