#pragma once

// Immutable expression trees with exact rational constants.
//
// Subtraction and division are not node kinds: the parser rewrites `a - b`
// to `a + (-1)*b` and `a / b` to `a * b^(-1)`. Sums and products are kept
// flat, so a Sum never has a Sum operand and a Product never has a Product
// operand.

#include <boost/multiprecision/cpp_int.hpp>

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mlp::expr {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

// The enumerator order is the canonical rank order used by compare().
enum class Kind { Number, Symbol, Function, Power, Product, Sum };

class Expr {
 public:
  Expr();  // the constant 0

  static Expr number(Rational value);
  static Expr number(long value) { return number(Rational(value)); }
  static Expr symbol(std::string name);
  static Expr function(std::string name, std::vector<Expr> args);
  static Expr power(Expr base, Expr exponent);
  // Flattening constructors. A single operand is returned unchanged; an empty
  // operand list yields the identity element (0 for sums, 1 for products).
  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);

  Kind kind() const noexcept;
  bool is(Kind k) const noexcept { return kind() == k; }
  bool is_number() const noexcept { return is(Kind::Number); }

  // Number only.
  const Rational& value() const;
  // Symbol and Function only.
  const std::string& name() const;
  // Function arguments, {base, exponent} for Power, terms, or factors.
  std::span<const Expr> operands() const noexcept;
  const Expr& base() const;
  const Expr& exponent() const;

  bool is_integer() const;
  bool is_value(long v) const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Total order: numbers < symbols < functions < powers < products < sums,
// ties broken recursively and lexicographically over operands.
int compare(const Expr& a, const Expr& b);

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

// Prefix serialization, e.g. `(+ (* 2 (^ x 2)) (* -1 3))`. See docs/keys.md.
std::string to_key(const Expr& e);

// Reads the prefix serialization back. Throws ParseError.
Expr parse_key(std::string_view key);

// Fully parenthesized infix text accepted by parse().
std::string to_infix(const Expr& e);

}  // namespace mlp::expr
