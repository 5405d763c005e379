#pragma once

#include <string_view>

namespace mlp::expr::detail {

// Functions that may be applied without brackets ("sin x") and that the
// letter-run splitter recognizes as whole words.
bool is_function_name(std::string_view word) noexcept;

// Multi-letter words that lex as a single symbol (pi, greek letter names).
bool is_symbol_name(std::string_view word) noexcept;

// Longest known function name that prefixes `word`, or 0.
std::size_t function_prefix_length(std::string_view word) noexcept;

// Function name used for the postfix derivative mark `'`.
inline constexpr std::string_view kDerivative = "deriv";

}  // namespace mlp::expr::detail
