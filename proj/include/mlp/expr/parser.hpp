#pragma once

// ASCII/UTF-8 math grammar used for learner input.
//
//   sum      := term (('+' | '-') term)*
//   term     := signed (('*' | '/') signed)*
//   signed   := ('+' | '-') signed | implicit
//   implicit := power power*                 juxtaposition: "2x", "x sin x"
//   power    := postfix ('^' exponent)?
//   exponent := ('+' | '-') exponent | power  right associative
//   postfix  := primary "'"*                 "(f)'" is deriv(f)
//   primary  := number | '(' sum ')' | '{' sum '}' | call | ident ('[' args ']')?
//   call     := fname ('(' args ')' | '^' exponent arg | arg)
//
// Implicit multiplication binds tighter than explicit `*` and `/` and looser
// than `^`, so "1/2x" is 1/(2x) and "2x^2" is 2(x^2). "sin^2 x" is
// (sin x)^2. A bare function argument is a run of juxtaposed factors that
// stops at the next function name: "sin 2x cos x" is sin(2x) cos(x).
// Letter runs that are not known names split into single-letter symbols.

#include "mlp/expr/expr.hpp"

#include <string_view>

namespace mlp::expr {

// Throws ParseError with the byte offset and the expected-token set.
Expr parse(std::string_view text);

}  // namespace mlp::expr
