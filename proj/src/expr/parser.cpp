#include "mlp/expr/parser.hpp"

#include "mlp/error.hpp"
#include "names.hpp"

#include <cctype>
#include <string>
#include <vector>

namespace mlp::expr {
namespace {

enum class Tok {
  Number,
  Ident,
  Plus,
  Minus,
  Star,
  Slash,
  Caret,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Comma,
  Prime,
  Invalid,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
  bool function = false;  // Ident naming a known function
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Number:
    case Tok::Ident: return "'" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

// Splits a letter run into names: known names stay whole, known function
// prefixes peel off ("sinx" -> sin, x), everything else is one letter each.
void split_word(std::string_view word, std::vector<std::string>& out) {
  while (!word.empty()) {
    if (detail::is_function_name(word) || detail::is_symbol_name(word)) {
      out.emplace_back(word);
      return;
    }
    std::size_t p = detail::function_prefix_length(word);
    if (p == 0) {
      for (std::size_t n = word.size(); n >= 2; --n) {
        if (detail::is_symbol_name(word.substr(0, n))) {
          p = n;
          break;
        }
      }
    }
    if (p == 0) p = 1;
    out.emplace_back(word.substr(0, p));
    word.remove_prefix(p);
  }
}

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) return 2;
  if ((lead & 0xF0) == 0xE0) return 3;
  if ((lead & 0xF8) == 0xF0) return 4;
  return 1;
}

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> toks;
  std::size_t i = 0;
  auto push = [&](Tok k, std::string text, std::size_t at) {
    toks.push_back(Token{k, std::move(text), at, false});
  };
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (std::isdigit(c) || (c == '.' && i + 1 < s.size() &&
                            std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      std::size_t start = i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i + 1 < s.size() && s[i] == '.' &&
          std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      }
      push(Tok::Number, std::string(s.substr(start, i - start)), start);
      continue;
    }
    if (std::isalpha(c)) {
      std::size_t start = i;
      while (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i]))) ++i;
      std::vector<std::string> names;
      split_word(s.substr(start, i - start), names);
      // subscript: x_1, x_ab
      if (i + 1 < s.size() && s[i] == '_' &&
          std::isalnum(static_cast<unsigned char>(s[i + 1]))) {
        std::size_t sub = i;
        ++i;
        while (i < s.size() && std::isalnum(static_cast<unsigned char>(s[i]))) ++i;
        names.back() += std::string(s.substr(sub, i - sub));
      }
      std::size_t at = start;
      for (auto& n : names) {
        Token t{Tok::Ident, n, at, detail::is_function_name(n)};
        at += n.size();
        toks.push_back(std::move(t));
      }
      continue;
    }
    if (c >= 0x80) {
      const std::size_t len = std::min(utf8_length(c), s.size() - i);
      const std::string cp(s.substr(i, len));
      const std::size_t at = i;
      i += len;
      if (cp == "−" || cp == "–") {
        push(Tok::Minus, cp, at);
      } else if (cp == "·" || cp == "×" || cp == "⋅") {
        push(Tok::Star, cp, at);
      } else if (cp == "÷") {
        push(Tok::Slash, cp, at);
      } else if (cp == "²" || cp == "³") {
        push(Tok::Caret, "^", at);
        push(Tok::Number, cp == "²" ? "2" : "3", at);
      } else if (cp == "′") {
        push(Tok::Prime, cp, at);
      } else if (cp == "π") {
        push(Tok::Ident, "pi", at);
      } else {
        push(Tok::Ident, cp, at);
      }
      continue;
    }
    const std::size_t at = i++;
    switch (c) {
      case '+': push(Tok::Plus, "+", at); break;
      case '-': push(Tok::Minus, "-", at); break;
      case '*': push(Tok::Star, "*", at); break;
      case '/': push(Tok::Slash, "/", at); break;
      case '^': push(Tok::Caret, "^", at); break;
      case '(': push(Tok::LParen, "(", at); break;
      case ')': push(Tok::RParen, ")", at); break;
      case '{': push(Tok::LBrace, "{", at); break;
      case '}': push(Tok::RBrace, "}", at); break;
      case '[': push(Tok::LBracket, "[", at); break;
      case ']': push(Tok::RBracket, "]", at); break;
      case ',': push(Tok::Comma, ",", at); break;
      case '\'': push(Tok::Prime, "'", at); break;
      default: push(Tok::Invalid, std::string(1, static_cast<char>(c)), at); break;
    }
  }
  toks.push_back(Token{Tok::End, "", s.size(), false});
  return toks;
}

Expr negate(Expr e) { return Expr::product({Expr::number(-1), std::move(e)}); }

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  Expr parse_all() {
    Expr e = parse_sum();
    if (peek().kind != Tok::End) fail({"operator", "end of input"});
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& advance() { return toks_[pos_++]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  void expect(Tok k, const char* what) {
    if (!accept(k)) fail({what});
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    throw ParseError(peek().offset, std::move(expected), describe(peek()));
  }

  bool starts_primary() const {
    switch (peek().kind) {
      case Tok::Number:
      case Tok::Ident:
      case Tok::LParen:
      case Tok::LBrace:
        return true;
      default:
        return false;
    }
  }

  bool starts_bare_argument() const {
    return starts_primary() && !(peek().kind == Tok::Ident && peek().function);
  }

  Expr parse_sum() {
    std::vector<Expr> terms;
    terms.push_back(parse_term());
    for (;;) {
      if (accept(Tok::Plus)) {
        terms.push_back(parse_term());
      } else if (accept(Tok::Minus)) {
        terms.push_back(negate(parse_term()));
      } else {
        break;
      }
    }
    return Expr::sum(std::move(terms));
  }

  Expr parse_term() {
    std::vector<Expr> factors;
    factors.push_back(parse_signed());
    for (;;) {
      if (accept(Tok::Star)) {
        factors.push_back(parse_signed());
      } else if (accept(Tok::Slash)) {
        factors.push_back(Expr::power(parse_signed(), Expr::number(-1)));
      } else {
        break;
      }
    }
    return Expr::product(std::move(factors));
  }

  Expr parse_signed() {
    if (accept(Tok::Minus)) return negate(parse_signed());
    if (accept(Tok::Plus)) return parse_signed();
    return parse_implicit();
  }

  Expr parse_implicit() {
    std::vector<Expr> factors;
    factors.push_back(parse_power());
    while (starts_primary()) factors.push_back(parse_power());
    return Expr::product(std::move(factors));
  }

  Expr parse_power() {
    Expr base = parse_postfix();
    if (accept(Tok::Caret)) return Expr::power(std::move(base), parse_exponent());
    return base;
  }

  Expr parse_exponent() {
    if (accept(Tok::Minus)) return negate(parse_exponent());
    if (accept(Tok::Plus)) return parse_exponent();
    if (!starts_primary()) fail({"number", "identifier", "'('", "sign"});
    return parse_power();
  }

  Expr parse_postfix() {
    Expr e = parse_primary();
    while (accept(Tok::Prime)) {
      e = Expr::function(std::string(detail::kDerivative), {std::move(e)});
    }
    return e;
  }

  Expr parse_group(Tok close, const char* closer) {
    Expr e = parse_sum();
    expect(close, closer);
    return e;
  }

  std::vector<Expr> parse_args(Tok close, const char* closer) {
    std::vector<Expr> args;
    args.push_back(parse_sum());
    while (accept(Tok::Comma)) args.push_back(parse_sum());
    expect(close, closer);
    return args;
  }

  Expr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        advance();
        return Expr::number(decimal(t.text));
      }
      case Tok::LParen:
        advance();
        return parse_group(Tok::RParen, "')'");
      case Tok::LBrace:
        advance();
        return parse_group(Tok::RBrace, "'}'");
      case Tok::Ident: {
        advance();
        if (t.function) return parse_call(t.text);
        if (accept(Tok::LBracket)) return Expr::function(t.text, parse_args(Tok::RBracket, "']'"));
        return Expr::symbol(t.text);
      }
      default:
        fail({"number", "identifier", "'('"});
    }
  }

  Expr parse_call(const std::string& name) {
    if (accept(Tok::Caret)) {
      Expr exponent = parse_exponent();
      Expr applied = Expr::function(name, parse_call_arguments());
      return Expr::power(std::move(applied), std::move(exponent));
    }
    return Expr::function(name, parse_call_arguments());
  }

  std::vector<Expr> parse_call_arguments() {
    if (accept(Tok::LParen)) return parse_args(Tok::RParen, "')'");
    if (accept(Tok::LBrace)) return parse_args(Tok::RBrace, "'}'");
    if (accept(Tok::LBracket)) return parse_args(Tok::RBracket, "']'");
    if (!starts_bare_argument()) fail({"'('", "function argument"});
    std::vector<Expr> factors;
    while (starts_bare_argument()) factors.push_back(parse_power());
    return {Expr::product(std::move(factors))};
  }

  // Exact value of a decimal literal; "2.50" is 5/2.
  static Rational decimal(const std::string& text) {
    const auto dot = text.find('.');
    std::string digits = text;
    Integer scale = 1;
    if (dot != std::string::npos) {
      digits = text.substr(0, dot) + text.substr(dot + 1);
      for (std::size_t k = dot + 1; k < text.size(); ++k) scale *= 10;
    }
    // cpp_int reads a leading zero as an octal prefix
    const auto nz = digits.find_first_not_of('0');
    digits = nz == std::string::npos ? "0" : digits.substr(nz);
    return Rational(Integer(digits), scale);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

}  // namespace mlp::expr
