#include "mlp/expr/tokenize.hpp"

#include "mlp/error.hpp"
#include "names.hpp"

#include <array>
#include <cctype>

namespace mlp::expr {
namespace {

// Longest first so "<=" wins over "<".
constexpr std::array<std::string_view, 18> kRelations = {
    "<=>", "<=", ">=", "!=", "==", "=>", "->", "≤", "≥", "≠",
    "∝",   "≈",  "→",  "⇒",  "⟹", "=",  "<",  ">",
};

bool is_ascii_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_ascii_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

bool has_content(std::string_view s) {
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || u >= 0x80) return true;
  }
  return false;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n\f\v");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n\f\v");
  return std::string(s.substr(first, last - first + 1));
}

bool is_short_math(std::string_view w) {
  return w.size() == 1 || detail::is_function_name(w) || detail::is_symbol_name(w);
}

}  // namespace

bool is_math_word(std::string_view word) {
  if (word.empty()) return false;
  if (is_short_math(word)) return true;
  const std::size_t p = detail::function_prefix_length(word);
  return p > 0 && is_short_math(word.substr(p));
}

std::vector<std::string> tokenize_solution(const RawSolution& raw) {
  const std::string_view body = raw.body;
  std::vector<std::string> out;
  std::string current;
  int depth = 0;

  auto flush = [&] {
    std::string seg = trim(current);
    if (has_content(seg)) out.push_back(std::move(seg));
    current.clear();
  };

  std::size_t i = 0;
  while (i < body.size()) {
    const char c = body[i];

    bool matched = false;
    for (auto rel : kRelations) {
      if (body.substr(i, rel.size()) == rel) {
        flush();
        i += rel.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;

    if (is_ascii_alpha(c)) {
      std::size_t j = i;
      while (j < body.size() && is_ascii_alpha(body[j])) ++j;
      const std::string_view word = body.substr(i, j - i);
      if (is_math_word(word)) {
        current.append(word);
      } else {
        flush();
      }
      i = j;
      continue;
    }

    switch (c) {
      case '(':
      case '[':
      case '{':
        ++depth;
        current += c;
        break;
      case ')':
      case ']':
      case '}':
        if (depth > 0) --depth;
        current += c;
        break;
      case '.':
        if (i + 1 < body.size() && is_ascii_digit(body[i + 1])) {
          current += c;
        } else if (depth == 0) {
          flush();
        } else {
          current += c;
        }
        break;
      case ',':
      case '\n':
      case '\r':
        if (depth == 0) {
          flush();
        } else {
          current += (c == ',') ? ',' : ' ';
        }
        break;
      case ';':
      case ':':
      case '?':
      case '$':
        if (depth == 0) {
          flush();
        } else {
          current += c;
        }
        break;
      case '\\':
        break;
      default:
        current += c;
        break;
    }
    ++i;
  }
  flush();

  if (out.empty()) {
    throw Error(ErrorKind::BlankSolution,
                "solution '" + raw.learner_id + "' contains no mathematical expression");
  }
  return out;
}

}  // namespace mlp::expr
