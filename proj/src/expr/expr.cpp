#include "mlp/expr/expr.hpp"

#include "mlp/error.hpp"
#include "names.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace mlp::expr {

struct Expr::Node {
  Kind kind;
  Rational value;
  std::string name;
  std::vector<Expr> operands;
};

Expr::Expr() : Expr(number(Rational(0))) {}

Expr Expr::number(Rational value) {
  return Expr(std::make_shared<const Node>(Node{Kind::Number, std::move(value), {}, {}}));
}

Expr Expr::symbol(std::string name) {
  return Expr(std::make_shared<const Node>(Node{Kind::Symbol, {}, std::move(name), {}}));
}

Expr Expr::function(std::string name, std::vector<Expr> args) {
  return Expr(std::make_shared<const Node>(
      Node{Kind::Function, {}, std::move(name), std::move(args)}));
}

Expr Expr::power(Expr base, Expr exponent) {
  std::vector<Expr> ops;
  ops.reserve(2);
  ops.push_back(std::move(base));
  ops.push_back(std::move(exponent));
  return Expr(std::make_shared<const Node>(Node{Kind::Power, {}, {}, std::move(ops)}));
}

namespace {

std::vector<Expr> flatten(std::vector<Expr> items, Kind kind) {
  std::vector<Expr> out;
  out.reserve(items.size());
  for (auto& item : items) {
    if (item.kind() == kind) {
      for (const auto& inner : item.operands()) out.push_back(inner);
    } else {
      out.push_back(std::move(item));
    }
  }
  return out;
}

}  // namespace

Expr Expr::sum(std::vector<Expr> terms) {
  terms = flatten(std::move(terms), Kind::Sum);
  if (terms.empty()) return number(Rational(0));
  if (terms.size() == 1) return std::move(terms.front());
  return Expr(std::make_shared<const Node>(Node{Kind::Sum, {}, {}, std::move(terms)}));
}

Expr Expr::product(std::vector<Expr> factors) {
  factors = flatten(std::move(factors), Kind::Product);
  if (factors.empty()) return number(Rational(1));
  if (factors.size() == 1) return std::move(factors.front());
  return Expr(std::make_shared<const Node>(Node{Kind::Product, {}, {}, std::move(factors)}));
}

Kind Expr::kind() const noexcept { return node_->kind; }

const Rational& Expr::value() const {
  if (kind() != Kind::Number) throw std::logic_error("Expr::value on non-number");
  return node_->value;
}

const std::string& Expr::name() const {
  if (kind() != Kind::Symbol && kind() != Kind::Function)
    throw std::logic_error("Expr::name on unnamed node");
  return node_->name;
}

std::span<const Expr> Expr::operands() const noexcept { return node_->operands; }

const Expr& Expr::base() const {
  if (kind() != Kind::Power) throw std::logic_error("Expr::base on non-power");
  return node_->operands[0];
}

const Expr& Expr::exponent() const {
  if (kind() != Kind::Power) throw std::logic_error("Expr::exponent on non-power");
  return node_->operands[1];
}

bool Expr::is_integer() const {
  return kind() == Kind::Number && denominator(node_->value) == 1;
}

bool Expr::is_value(long v) const {
  return kind() == Kind::Number && node_->value == v;
}

bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

namespace {

int compare_operands(std::span<const Expr> a, std::span<const Expr> b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(a[i], b[i]); c != 0) return c;
  }
  if (a.size() == b.size()) return 0;
  return a.size() < b.size() ? -1 : 1;
}

}  // namespace

int compare(const Expr& a, const Expr& b) {
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case Kind::Number:
      if (a.value() == b.value()) return 0;
      return a.value() < b.value() ? -1 : 1;
    case Kind::Symbol:
      return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
    case Kind::Function:
      if (a.name() != b.name()) return a.name() < b.name() ? -1 : 1;
      return compare_operands(a.operands(), b.operands());
    case Kind::Power:
    case Kind::Product:
    case Kind::Sum:
      return compare_operands(a.operands(), b.operands());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Prefix keys

namespace {

void write_key(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Kind::Number:
      out += e.value().str();
      return;
    case Kind::Symbol:
      out += e.name();
      return;
    case Kind::Function:
      out += '(';
      out += e.name();
      break;
    case Kind::Power:
      out += "(^";
      break;
    case Kind::Product:
      out += "(*";
      break;
    case Kind::Sum:
      out += "(+";
      break;
  }
  for (const auto& op : e.operands()) {
    out += ' ';
    write_key(op, out);
  }
  out += ')';
}

class KeyReader {
 public:
  explicit KeyReader(std::string_view text) : text_(text) {}

  Expr read_all() {
    Expr e = read();
    skip_space();
    if (pos_ != text_.size()) fail({"end of key"});
    return e;
  }

 private:
  Expr read() {
    skip_space();
    if (pos_ >= text_.size()) fail({"'('", "atom"});
    if (text_[pos_] == '(') {
      ++pos_;
      std::string head = atom();
      if (head.empty()) fail({"operator or function name"});
      std::vector<Expr> ops;
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) fail({"')'"});
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        ops.push_back(read());
      }
      if (head == "+") return make_nary(Kind::Sum, std::move(ops));
      if (head == "*") return make_nary(Kind::Product, std::move(ops));
      if (head == "^") {
        if (ops.size() != 2) fail({"two operands for '^'"});
        return Expr::power(ops[0], ops[1]);
      }
      return Expr::function(std::move(head), std::move(ops));
    }
    std::string a = atom();
    if (a.empty()) fail({"atom"});
    if (looks_numeric(a)) return Expr::number(Rational(a));
    return Expr::symbol(std::move(a));
  }

  Expr make_nary(Kind kind, std::vector<Expr> ops) {
    if (ops.size() < 2) fail({"at least two operands"});
    return kind == Kind::Sum ? Expr::sum(std::move(ops)) : Expr::product(std::move(ops));
  }

  static bool looks_numeric(const std::string& a) {
    std::size_t i = (a[0] == '-') ? 1 : 0;
    if (i >= a.size() || !std::isdigit(static_cast<unsigned char>(a[i]))) return false;
    for (; i < a.size(); ++i) {
      char c = a[i];
      if (!std::isdigit(static_cast<unsigned char>(c)) && c != '/') return false;
    }
    return true;
  }

  std::string atom() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    std::string found = pos_ < text_.size() ? std::string(1, text_[pos_]) : "end of input";
    throw ParseError(pos_, std::move(expected), found);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Infix

bool is_atomic(const Expr& e) {
  if (e.kind() == Kind::Symbol) return true;
  if (e.kind() == Kind::Function) return true;
  return e.is_integer() && e.value() >= 0;
}

void write_infix(const Expr& e, std::string& out);

void write_wrapped(const Expr& e, std::string& out) {
  if (is_atomic(e)) {
    write_infix(e, out);
  } else {
    out += '(';
    write_infix(e, out);
    out += ')';
  }
}

void write_infix(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Kind::Number:
      out += e.value().str();
      return;
    case Kind::Symbol:
      out += e.name();
      return;
    case Kind::Function: {
      const auto args = e.operands();
      if (e.name() == detail::kDerivative && args.size() == 1) {
        out += '(';
        write_infix(args[0], out);
        out += ")'";
        return;
      }
      const bool known = detail::is_function_name(e.name());
      out += e.name();
      out += known ? '(' : '[';
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        write_infix(args[i], out);
      }
      out += known ? ')' : ']';
      return;
    }
    case Kind::Power:
      write_wrapped(e.base(), out);
      out += '^';
      write_wrapped(e.exponent(), out);
      return;
    case Kind::Product: {
      bool first = true;
      for (const auto& f : e.operands()) {
        if (!first) out += '*';
        first = false;
        write_wrapped(f, out);
      }
      return;
    }
    case Kind::Sum: {
      bool first = true;
      for (const auto& t : e.operands()) {
        if (!first) out += " + ";
        first = false;
        write_wrapped(t, out);
      }
      return;
    }
  }
}

}  // namespace

std::string to_key(const Expr& e) {
  std::string out;
  write_key(e, out);
  return out;
}

Expr parse_key(std::string_view key) { return KeyReader(key).read_all(); }

std::string to_infix(const Expr& e) {
  std::string out;
  write_infix(e, out);
  return out;
}

}  // namespace mlp::expr
