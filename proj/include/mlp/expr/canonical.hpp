#pragma once

#include "mlp/expr/expr.hpp"

#include <string>
#include <string_view>

namespace mlp::expr {

enum class SimplificationLevel {
  // Constant folding, operand ordering, like-term collection, merging of
  // equal bases, and the identities x^1, x^0, 0*a, 1*a, a+0, 0^p (p > 0).
  ArithmeticOnly,
  // Additionally distributes products and positive integer powers over sums.
  Full,
};

const char* to_string(SimplificationLevel level) noexcept;
// Accepts "arithmetic" / "arithmetic_only" / "full". Throws mlp::Error.
SimplificationLevel parse_simplification_level(std::string_view text);

struct CanonicalForm {
  Expr expr;
  std::string key;
  SimplificationLevel level = SimplificationLevel::ArithmeticOnly;
};

// Rewrites `e` to a fixpoint of the rules of `level`. No trigonometric,
// logarithmic or exponential identities are applied, and 0^0 and 0^(-n) stay
// symbolic. Total on every Expr.
CanonicalForm canonicalize(const Expr& e,
                           SimplificationLevel level = SimplificationLevel::ArithmeticOnly);

}  // namespace mlp::expr
