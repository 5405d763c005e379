#include "mlp/expr/canonical.hpp"

#include "mlp/error.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace mlp::expr {

const char* to_string(SimplificationLevel level) noexcept {
  return level == SimplificationLevel::Full ? "full" : "arithmetic";
}

SimplificationLevel parse_simplification_level(std::string_view text) {
  if (text == "arithmetic" || text == "arithmetic_only" || text == "ArithmeticOnly")
    return SimplificationLevel::ArithmeticOnly;
  if (text == "full" || text == "Full") return SimplificationLevel::Full;
  throw Error(ErrorKind::InvalidArgument,
              "unknown simplification level '" + std::string(text) + "'");
}

namespace {

// Folding bounds: larger integer powers and expansions stay symbolic.
constexpr unsigned kMaxFoldBits = 4096;
constexpr long kMaxExpandPower = 32;
constexpr std::size_t kMaxExpandTerms = 4096;
constexpr int kMaxPasses = 64;

std::size_t bit_length(const Integer& v) {
  return v == 0 ? 0 : boost::multiprecision::msb(boost::multiprecision::abs(v)) + 1;
}

// r^n for nonzero r, or nullopt when the result would be unreasonably large.
std::optional<Rational> rational_power(const Rational& r, const Integer& n) {
  const Integer mag = boost::multiprecision::abs(n);
  const std::size_t bits =
      std::max(bit_length(numerator(r)), bit_length(denominator(r)));
  if (mag > kMaxFoldBits || bits * mag.convert_to<std::size_t>() > kMaxFoldBits) {
    return std::nullopt;
  }
  const unsigned e = mag.convert_to<unsigned>();
  Integer num = boost::multiprecision::pow(numerator(r), e);
  Integer den = boost::multiprecision::pow(denominator(r), e);
  if (n < 0) std::swap(num, den);
  return Rational(num) / Rational(den);
}

class Simplifier {
 public:
  explicit Simplifier(SimplificationLevel level) : level_(level) {}

  Expr run(const Expr& e) {
    switch (e.kind()) {
      case Kind::Number:
      case Kind::Symbol:
        return e;
      case Kind::Function:
        return function(e.name(), map_run(e.operands()));
      case Kind::Power:
        return power(run(e.base()), run(e.exponent()));
      case Kind::Product:
        return product(map_run(e.operands()));
      case Kind::Sum:
        return sum(map_run(e.operands()));
    }
    return e;
  }

 private:
  std::vector<Expr> map_run(std::span<const Expr> ops) {
    std::vector<Expr> out;
    out.reserve(ops.size());
    for (const auto& op : ops) out.push_back(run(op));
    return out;
  }

  Expr function(const std::string& name, std::vector<Expr> args) {
    if (args.size() == 1) {
      if (name == "exp") return power(Expr::symbol("e"), args[0]);
      if (name == "sqrt") return power(args[0], Expr::number(Rational(1, 2)));
      if (name == "ln") return Expr::function("log", std::move(args));
    }
    return Expr::function(name, std::move(args));
  }

  Expr power(const Expr& base, const Expr& exponent) {
    if (exponent.is_number()) {
      const Rational& x = exponent.value();
      if (x == 0) return base.is_value(0) ? Expr::power(base, exponent) : Expr::number(1);
      if (x == 1) return base;
      const bool integral = denominator(x) == 1;
      if (base.is_number()) {
        const Rational& b = base.value();
        if (b == 1) return Expr::number(1);
        if (b == 0) return x > 0 ? Expr::number(0) : Expr::power(base, exponent);
        if (integral) {
          if (auto folded = rational_power(b, numerator(x))) return Expr::number(*folded);
        }
        return Expr::power(base, exponent);
      }
      if (integral) {
        if (base.is(Kind::Power)) {
          return power(base.base(), product({base.exponent(), exponent}));
        }
        if (base.is(Kind::Product)) {
          std::vector<Expr> factors;
          for (const auto& f : base.operands()) factors.push_back(power(f, exponent));
          return product(std::move(factors));
        }
        if (level_ == SimplificationLevel::Full && base.is(Kind::Sum) && x > 0 &&
            x <= kMaxExpandPower) {
          const long n = numerator(x).convert_to<long>();
          Expr acc = base;
          for (long i = 1; i < n; ++i) {
            auto next = expand_pair(acc, base);
            if (!next) return Expr::power(base, exponent);
            acc = *next;
          }
          return acc;
        }
      }
      return Expr::power(base, exponent);
    }
    if (base.is_value(1)) return Expr::number(1);
    return Expr::power(base, exponent);
  }

  Expr product(std::vector<Expr> factors) {
    Rational coeff = 1;
    std::map<Expr, std::vector<Expr>, ExprLess> groups;
    std::vector<Expr> flat;
    for (const auto& f : factors) {
      if (f.is(Kind::Product)) {
        flat.insert(flat.end(), f.operands().begin(), f.operands().end());
      } else {
        flat.push_back(f);
      }
    }
    for (const auto& f : flat) {
      if (f.is_number()) {
        coeff *= f.value();
      } else if (f.is(Kind::Power)) {
        groups[f.base()].push_back(f.exponent());
      } else {
        groups[f].push_back(Expr::number(1));
      }
    }
    if (coeff == 0) return Expr::number(0);

    std::vector<Expr> out;
    for (auto& [base, exps] : groups) {
      Expr exponent = exps.size() == 1 ? exps.front() : sum(std::move(exps));
      Expr merged = power(base, exponent);
      if (merged.is_number()) {
        coeff *= merged.value();
      } else if (merged.is(Kind::Product)) {
        for (const auto& inner : merged.operands()) {
          if (inner.is_number()) {
            coeff *= inner.value();
          } else {
            out.push_back(inner);
          }
        }
      } else {
        out.push_back(std::move(merged));
      }
    }
    if (coeff == 0) return Expr::number(0);

    if (level_ == SimplificationLevel::Full &&
        std::any_of(out.begin(), out.end(), [](const Expr& f) { return f.is(Kind::Sum); })) {
      Expr acc = Expr::number(coeff);
      bool ok = true;
      for (const auto& f : out) {
        auto next = expand_pair(acc, f);
        if (!next) {
          ok = false;
          break;
        }
        acc = *next;
      }
      if (ok) return acc;
    }

    std::sort(out.begin(), out.end(), ExprLess{});
    if (out.empty()) return Expr::number(coeff);
    if (coeff != 1) out.insert(out.begin(), Expr::number(coeff));
    return Expr::product(std::move(out));
  }

  // a*b with sums distributed and like terms collected; nullopt when the
  // expansion would exceed kMaxExpandTerms.
  std::optional<Expr> expand_pair(const Expr& a, const Expr& b) {
    auto terms_of = [](const Expr& e) {
      return e.is(Kind::Sum) ? std::vector<Expr>(e.operands().begin(), e.operands().end())
                             : std::vector<Expr>{e};
    };
    const auto ta = terms_of(a);
    const auto tb = terms_of(b);
    if (ta.size() * tb.size() > kMaxExpandTerms) return std::nullopt;
    std::vector<Expr> terms;
    terms.reserve(ta.size() * tb.size());
    for (const auto& x : ta) {
      for (const auto& y : tb) terms.push_back(product({x, y}));
    }
    return sum(std::move(terms));
  }

  Expr sum(std::vector<Expr> terms) {
    std::vector<Expr> flat;
    for (auto& t : terms) {
      if (t.is(Kind::Sum)) {
        for (const auto& inner : t.operands()) flat.push_back(inner);
      } else {
        flat.push_back(std::move(t));
      }
    }

    Rational constant = 0;
    std::map<Expr, Rational, ExprLess> like;
    for (const auto& t : flat) {
      if (t.is_number()) {
        constant += t.value();
        continue;
      }
      if (t.is(Kind::Product) && t.operands().front().is_number()) {
        const auto ops = t.operands();
        Expr rest = Expr::product(std::vector<Expr>(ops.begin() + 1, ops.end()));
        like[rest] += ops.front().value();
      } else {
        like[t] += 1;
      }
    }

    std::vector<Expr> out;
    for (auto& [rest, c] : like) {
      if (c == 0) continue;
      if (c == 1) {
        out.push_back(rest);
      } else {
        out.push_back(Expr::product({Expr::number(c), rest}));
      }
    }
    std::sort(out.begin(), out.end(), ExprLess{});
    if (constant != 0) out.insert(out.begin(), Expr::number(constant));
    return Expr::sum(std::move(out));
  }

  SimplificationLevel level_;
};

}  // namespace

CanonicalForm canonicalize(const Expr& e, SimplificationLevel level) {
  Simplifier simplifier(level);
  Expr current = e;
  for (int pass = 0; pass < kMaxPasses; ++pass) {
    Expr next = simplifier.run(current);
    if (next == current) break;
    current = std::move(next);
  }
  return CanonicalForm{current, to_key(current), level};
}

}  // namespace mlp::expr
