#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mlp::expr {

struct RawSolution {
  std::string learner_id;
  std::string body;
};

// Splits a solution body into its mathematical expressions, in order.
//
// Segments are separated by relation symbols (= < > ≤ ≥ ≠ ∝ ≈ → and their
// ASCII spellings), by `,` `;` `:` `.` `$` and line breaks outside brackets,
// and by prose words. A prose word is a run of two or more ASCII letters that
// is not a known function or symbol name ("sin", "pi", "theta", "sinx").
// Segments without any letter or digit are dropped; duplicates are kept.
//
// Throws Error(BlankSolution) if no segment remains.
std::vector<std::string> tokenize_solution(const RawSolution& raw);

// True if `word` (ASCII letters only) reads as mathematics rather than prose.
bool is_math_word(std::string_view word);

}  // namespace mlp::expr
