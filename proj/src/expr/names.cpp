#include "names.hpp"

#include <algorithm>
#include <array>

namespace mlp::expr::detail {
namespace {

constexpr std::array<std::string_view, 18> kFunctions = {
    "sin",    "cos",    "tan",    "cot",  "sec",  "csc",
    "arcsin", "arccos", "arctan", "sinh", "cosh", "tanh",
    "exp",    "log",    "ln",     "sqrt", "abs",  "sgn",
};

constexpr std::array<std::string_view, 26> kSymbols = {
    "pi",    "alpha", "beta",  "gamma", "delta", "epsilon", "zeta",
    "eta",   "theta", "iota",  "kappa", "lambda", "mu",     "nu",
    "xi",    "rho",   "sigma", "tau",   "phi",   "chi",     "psi",
    "omega", "Omega", "Delta", "infty", "inf",
};

}  // namespace

bool is_function_name(std::string_view word) noexcept {
  return std::find(kFunctions.begin(), kFunctions.end(), word) != kFunctions.end();
}

bool is_symbol_name(std::string_view word) noexcept {
  return std::find(kSymbols.begin(), kSymbols.end(), word) != kSymbols.end();
}

std::size_t function_prefix_length(std::string_view word) noexcept {
  std::size_t best = 0;
  for (auto f : kFunctions) {
    if (f.size() > best && word.substr(0, f.size()) == f) best = f.size();
  }
  return best;
}

}  // namespace mlp::expr::detail
