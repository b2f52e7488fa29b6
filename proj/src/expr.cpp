/*
 * Copyright 2026 The ndham Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ndham/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <type_traits>

namespace ndham {

// ---------------------------------------------------------------- errors

namespace {

std::string join_expected(const std::set<std::string>& expected) {
  std::string out;
  for (const auto& e : expected) {
    if (!out.empty()) out += ", ";
    out += '"' + e + '"';
  }
  return out;
}

}  // namespace

ParseError::ParseError(std::size_t offset, std::set<std::string> expected, const std::string& what)
    : InvalidArgument("syntax error at offset " + std::to_string(offset) + ": " + what +
                      (expected.empty() ? std::string{} : " (expected " + join_expected(expected) + ")")),
      offset_(offset),
      expected_(std::move(expected)) {}

UnboundVariable::UnboundVariable(std::string name)
    : InvalidArgument("unbound variable '" + name + "'"), name_(std::move(name)) {}

DomainError::DomainError(const std::string& reason, std::string node)
    : NumericalError("domain error: " + reason + " in '" + node + "'"), node_(std::move(node)) {}

// ---------------------------------------------------------------- parser

namespace {

constexpr std::array<std::pair<std::string_view, UnaryOp>, 5> kFunctions{{
    {"sin", UnaryOp::Sin},
    {"cos", UnaryOp::Cos},
    {"exp", UnaryOp::Exp},
    {"log", UnaryOp::Log},
    {"sqrt", UnaryOp::Sqrt},
}};

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t pos;  // 0-based
  std::string_view text;
  double number = 0.0;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) { advance(); }

  Expr parse_all() {
    Expr e = parse_expr();
    if (tok_.kind != Tok::End)
      fail({"+", "-", "*", "/", "^", "end of input"}, "unexpected '" + std::string(tok_.text) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(std::set<std::string> expected, const std::string& what) const {
    throw ParseError(tok_.pos + 1, std::move(expected), what);
  }

  void advance() {
    std::size_t i = pos_;
    while (i < src_.size() && std::isspace(static_cast<unsigned char>(src_[i]))) ++i;
    if (i >= src_.size()) {
      tok_ = {Tok::End, src_.size(), {}};
      pos_ = i;
      return;
    }
    const char c = src_[i];
    auto single = [&](Tok k) {
      tok_ = {k, i, src_.substr(i, 1)};
      pos_ = i + 1;
    };
    switch (c) {
      case '+': return single(Tok::Plus);
      case '-': return single(Tok::Minus);
      case '*': return single(Tok::Star);
      case '/': return single(Tok::Slash);
      case '^': return single(Tok::Caret);
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      auto digits = [&] {
        std::size_t start = j;
        while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
        return j - start;
      };
      std::size_t mantissa = digits();
      if (j < src_.size() && src_[j] == '.') {
        ++j;
        mantissa += digits();
      }
      if (mantissa == 0) {
        tok_ = {Tok::End, i, src_.substr(i, 1)};
        throw ParseError(i + 1, {"number"}, "malformed number");
      }
      if (j < src_.size() && (src_[j] == 'e' || src_[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
        std::size_t exp_start = k;
        while (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) ++k;
        if (k == exp_start) throw ParseError(k + 1, {"exponent digits"}, "malformed number");
        j = k;
      }
      Token t{Tok::Number, i, src_.substr(i, j - i)};
      auto [ptr, ec] = std::from_chars(src_.data() + i, src_.data() + j, t.number);
      if (ec != std::errc{} || ptr != src_.data() + j || !std::isfinite(t.number))
        throw ParseError(i + 1, {"number"}, "number out of range");
      tok_ = t;
      pos_ = j;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i + 1;
      while (j < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_')) ++j;
      tok_ = {Tok::Ident, i, src_.substr(i, j - i)};
      pos_ = j;
      return;
    }
    throw ParseError(i + 1, {}, std::string("unexpected character '") + c + "'");
  }

  void expect(Tok kind, const std::string& text) {
    if (tok_.kind != kind) fail({text}, tok_.kind == Tok::End ? "unexpected end of input" : "unexpected '" + std::string(tok_.text) + "'");
    advance();
  }

  // expr := term (('+'|'-') term)*
  Expr parse_expr() {
    Expr lhs = parse_term();
    while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
      const BinaryOp op = tok_.kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
      advance();
      lhs = Expr::binary(op, lhs, parse_term());
    }
    return lhs;
  }

  // term := unary (('*'|'/') unary)*
  Expr parse_term() {
    Expr lhs = parse_unary();
    while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
      const BinaryOp op = tok_.kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
      advance();
      lhs = Expr::binary(op, lhs, parse_unary());
    }
    return lhs;
  }

  // unary := '-' unary | power
  Expr parse_unary() {
    if (tok_.kind == Tok::Minus) {
      advance();
      return Expr::unary(UnaryOp::Neg, parse_unary());
    }
    return parse_power();
  }

  // power := atom ('^' unary)?   -- right-associative through unary
  Expr parse_power() {
    Expr base = parse_atom();
    if (tok_.kind == Tok::Caret) {
      advance();
      return Expr::binary(BinaryOp::Pow, base, parse_unary());
    }
    return base;
  }

  Expr parse_atom() {
    switch (tok_.kind) {
      case Tok::Number: {
        const double v = tok_.number;
        advance();
        return Expr::constant(v);
      }
      case Tok::Ident: {
        const Token id = tok_;
        advance();
        if (tok_.kind == Tok::LParen) {
          const UnaryOp* op = nullptr;
          for (const auto& [name, fn] : kFunctions)
            if (name == id.text) op = &fn;
          if (op == nullptr) throw ParseError(id.pos + 1, {"sin", "cos", "exp", "log", "sqrt"}, "unknown function '" + std::string(id.text) + "'");
          advance();
          Expr arg = parse_expr();
          expect(Tok::RParen, ")");
          return Expr::unary(*op, arg);
        }
        for (const auto& [name, fn] : kFunctions)
          if (name == id.text) fail({"("}, "function '" + std::string(id.text) + "' used without arguments");
        if (id.text == "i") return Expr::constant(Complex(0.0, 1.0));
        return Expr::variable(std::string(id.text));
      }
      case Tok::LParen: {
        advance();
        Expr inner = parse_expr();
        expect(Tok::RParen, ")");
        return inner;
      }
      default:
        fail({"number", "identifier", "(", "-"},
             tok_.kind == Tok::End ? "unexpected end of input" : "unexpected '" + std::string(tok_.text) + "'");
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token tok_{Tok::End, 0, {}};
};

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* unary_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::Neg: return "-";
    case UnaryOp::Sin: return "sin";
    case UnaryOp::Cos: return "cos";
    case UnaryOp::Exp: return "exp";
    case UnaryOp::Log: return "log";
    case UnaryOp::Sqrt: return "sqrt";
  }
  return "?";
}

char binary_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
    case BinaryOp::Pow: return '^';
  }
  return '?';
}

void print(const Node& n, std::string& out) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ConstantNode>) {
          const Complex c = v.value;
          if (c == Complex(0.0, 1.0)) {
            out += 'i';
          } else if (c.imag() == 0.0) {
            if (std::signbit(c.real()))
              out += "(" + format_real(c.real()) + ")";
            else
              out += format_real(c.real());
          } else {
            out += "(" + format_real(c.real()) + "+" + format_real(c.imag()) + "*i)";
          }
        } else if constexpr (std::is_same_v<T, VariableNode>) {
          out += v.name;
        } else if constexpr (std::is_same_v<T, UnaryNode>) {
          if (v.op == UnaryOp::Neg) {
            out += "(-";
            print(*v.arg, out);
            out += ')';
          } else {
            out += unary_name(v.op);
            out += '(';
            print(*v.arg, out);
            out += ')';
          }
        } else {
          out += '(';
          print(*v.lhs, out);
          out += binary_symbol(v.op);
          print(*v.rhs, out);
          out += ')';
        }
      },
      n.data);
}

void collect_variables(const Node& n, std::set<std::string>& out) {
  if (const auto* v = std::get_if<VariableNode>(&n.data)) {
    out.insert(v->name);
  } else if (const auto* u = std::get_if<UnaryNode>(&n.data)) {
    collect_variables(*u->arg, out);
  } else if (const auto* b = std::get_if<BinaryNode>(&n.data)) {
    collect_variables(*b->lhs, out);
    collect_variables(*b->rhs, out);
  }
}

}  // namespace

std::string to_string(const Node& node) {
  std::string out;
  print(node, out);
  return out;
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.data.index() != b.data.index()) return false;
  if (const auto* ca = std::get_if<ConstantNode>(&a.data)) {
    const auto& cb = std::get<ConstantNode>(b.data);
    return ca->value == cb.value;
  }
  if (const auto* va = std::get_if<VariableNode>(&a.data)) return va->name == std::get<VariableNode>(b.data).name;
  if (const auto* ua = std::get_if<UnaryNode>(&a.data)) {
    const auto& ub = std::get<UnaryNode>(b.data);
    return ua->op == ub.op && structurally_equal(*ua->arg, *ub.arg);
  }
  const auto& ba = std::get<BinaryNode>(a.data);
  const auto& bb = std::get<BinaryNode>(b.data);
  return ba.op == bb.op && structurally_equal(*ba.lhs, *bb.lhs) && structurally_equal(*ba.rhs, *bb.rhs);
}

// ---------------------------------------------------------------- Expr

Expr::Expr(NodePtr root) : root_(std::move(root)) {
  if (!root_) throw InvalidArgument("null expression");
}

Expr Expr::parse(std::string_view source) { return Parser(source).parse_all(); }

Expr Expr::constant(Complex value) { return Expr(std::make_shared<const Node>(Node{ConstantNode{value}})); }

Expr Expr::variable(std::string name) {
  return Expr(std::make_shared<const Node>(Node{VariableNode{std::move(name)}}));
}

Expr Expr::unary(UnaryOp op, const Expr& arg) {
  return Expr(std::make_shared<const Node>(Node{UnaryNode{op, arg.root_}}));
}

Expr Expr::binary(BinaryOp op, const Expr& lhs, const Expr& rhs) {
  return Expr(std::make_shared<const Node>(Node{BinaryNode{op, lhs.root_, rhs.root_}}));
}

std::string Expr::str() const { return to_string(*root_); }

std::set<std::string> Expr::variables() const {
  std::set<std::string> out;
  collect_variables(*root_, out);
  return out;
}

bool operator==(const Expr& a, const Expr& b) { return structurally_equal(*a.root_, *b.root_); }

namespace {

// Lays out the expression's own variables in sorted order and fills the slot
// values from `bindings`.
std::pair<SlotMap, std::vector<Complex>> layout(const Expr& e, const Bindings& bindings) {
  SlotMap slots;
  std::vector<Complex> values;
  for (const auto& name : e.variables()) {
    auto it = bindings.find(name);
    if (it == bindings.end()) throw UnboundVariable(name);
    slots.emplace(name, values.size());
    values.push_back(it->second);
  }
  return {std::move(slots), std::move(values)};
}

}  // namespace

Complex Expr::eval(const Bindings& bindings) const {
  auto [slots, values] = layout(*this, bindings);
  return compile(slots).eval(values);
}

std::pair<Complex, std::vector<Complex>> Expr::eval_grad(const Bindings& bindings,
                                                         std::span<const std::string> wrt) const {
  if (wrt.empty()) throw InvalidArgument("eval_grad needs at least one variable");
  auto [slots, values] = layout(*this, bindings);
  // Variables listed in wrt but absent from the expression still need slots.
  std::vector<std::size_t> wrt_slots;
  for (const auto& name : wrt) {
    auto it = slots.find(name);
    if (it == slots.end()) {
      auto b = bindings.find(name);
      if (b == bindings.end()) throw UnboundVariable(name);
      it = slots.emplace(name, values.size()).first;
      values.push_back(b->second);
    }
    wrt_slots.push_back(it->second);
  }
  DualValue d = compile(slots).eval_grad(values, wrt_slots);
  return {d.value, std::move(d.partials)};
}

CompiledExpr Expr::compile(const SlotMap& slots, const Constants& constants) const {
  CompiledExpr out;
  out.root_ = root_;
  std::size_t depth = 0;
  std::function<void(const Node&)> emit = [&](const Node& n) {
    using Kind = CompiledExpr::Kind;
    if (const auto* c = std::get_if<ConstantNode>(&n.data)) {
      out.code_.push_back({Kind::Constant, UnaryOp::Neg, BinaryOp::Add, c->value, 0, &n});
      out.max_depth_ = std::max(out.max_depth_, ++depth);
    } else if (const auto* v = std::get_if<VariableNode>(&n.data)) {
      if (auto it = slots.find(v->name); it != slots.end()) {
        out.code_.push_back({Kind::Slot, UnaryOp::Neg, BinaryOp::Add, {}, it->second, &n});
      } else if (auto k = constants.find(v->name); k != constants.end()) {
        out.code_.push_back({Kind::Constant, UnaryOp::Neg, BinaryOp::Add, k->second, 0, &n});
      } else {
        throw UnboundVariable(v->name);
      }
      out.max_depth_ = std::max(out.max_depth_, ++depth);
    } else if (const auto* u = std::get_if<UnaryNode>(&n.data)) {
      emit(*u->arg);
      out.code_.push_back({Kind::Unary, u->op, BinaryOp::Add, {}, 0, &n});
    } else {
      const auto& b = std::get<BinaryNode>(n.data);
      emit(*b.lhs);
      emit(*b.rhs);
      out.code_.push_back({Kind::Binary, UnaryOp::Neg, b.op, {}, 0, &n});
      --depth;
    }
  };
  emit(*root_);
  return out;
}

// ---------------------------------------------------------------- evaluation

namespace {

inline Complex value_of(const Complex& c) { return c; }
inline Complex value_of(const DualValue& d) { return d.value; }

inline bool constant_exponent(const Complex&) { return true; }
inline bool constant_exponent(const DualValue& d) { return !d.has_partials(); }

inline bool is_negative_real(Complex z) { return z.imag() == 0.0 && z.real() < 0.0; }

Complex ipow(Complex a, long n) {
  if (n < 0) return 1.0 / ipow(a, -n);
  Complex r = 1.0;
  while (n > 0) {
    if (n & 1) r *= a;
    n >>= 1;
    if (n > 0) a *= a;
  }
  return r;
}

inline Complex general_pow(Complex a, Complex b) { return std::exp(b * std::log(a)); }
inline DualValue general_pow(const DualValue& a, const DualValue& b) { return pow(a, b); }

template <typename T>
T apply_unary(UnaryOp op, const T& a, const Node& node) {
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sqrt;
  const Complex v = value_of(a);
  switch (op) {
    case UnaryOp::Neg: return -a;
    case UnaryOp::Sin: return sin(a);
    case UnaryOp::Cos: return cos(a);
    case UnaryOp::Exp: return exp(a);
    case UnaryOp::Log:
      if (v == Complex{}) throw DomainError("log of zero", to_string(node));
      if (is_negative_real(v)) throw DomainError("log of a negative real", to_string(node));
      return log(a);
    case UnaryOp::Sqrt:
      if (is_negative_real(v)) throw DomainError("sqrt of a negative real", to_string(node));
      if constexpr (std::is_same_v<T, DualValue>) {
        if (v == Complex{} && a.has_partials()) throw DomainError("derivative of sqrt at zero", to_string(node));
      }
      return sqrt(a);
  }
  return a;
}

template <typename T>
T apply_pow(const T& a, const T& b, const Node& node) {
  const Complex av = value_of(a);
  const Complex bv = value_of(b);
  if (constant_exponent(b) && bv.imag() == 0.0 && std::abs(bv.real()) <= 2147483647.0 &&
      bv.real() == std::floor(bv.real())) {
    const long n = static_cast<long>(bv.real());
    if (n < 0 && av == Complex{}) throw DomainError("zero raised to a negative power", to_string(node));
    return ipow(a, n);
  }
  if (is_negative_real(av)) throw DomainError("non-integer power of a negative real base", to_string(node));
  if (av == Complex{}) {
    if constexpr (std::is_same_v<T, Complex>) {
      if (bv.real() > 0.0) return Complex{};
      throw DomainError("zero raised to a non-positive power", to_string(node));
    } else {
      throw DomainError("derivative of a non-integer power at zero", to_string(node));
    }
  }
  return general_pow(a, b);
}

template <typename T>
T apply_binary(BinaryOp op, const T& a, const T& b, const Node& node) {
  switch (op) {
    case BinaryOp::Add: return a + b;
    case BinaryOp::Sub: return a - b;
    case BinaryOp::Mul: return a * b;
    case BinaryOp::Div:
      if (value_of(b) == Complex{}) throw DomainError("division by zero", to_string(node));
      return a / b;
    case BinaryOp::Pow: return apply_pow(a, b, node);
  }
  return a;
}

}  // namespace

template <typename T>
T CompiledExpr::run(std::span<const Complex> slots, std::span<const std::size_t> wrt) const {
  std::vector<T> stack;
  stack.reserve(max_depth_);
  const std::size_t nwrt = wrt.size();
  for (const Instr& in : code_) {
    switch (in.kind) {
      case Kind::Constant:
        if constexpr (std::is_same_v<T, Complex>)
          stack.push_back(in.value);
        else
          stack.emplace_back(in.value, nwrt);
        break;
      case Kind::Slot:
        if (in.slot >= slots.size()) throw InvalidArgument("slot index out of range");
        if constexpr (std::is_same_v<T, Complex>) {
          stack.push_back(slots[in.slot]);
        } else {
          DualValue d(slots[in.slot], nwrt);
          for (std::size_t j = 0; j < nwrt; ++j)
            if (wrt[j] == in.slot) d.partials[j] = 1.0;
          stack.push_back(std::move(d));
        }
        break;
      case Kind::Unary: {
        T r = apply_unary(in.unary, stack.back(), *in.node);
        stack.back() = std::move(r);
        break;
      }
      case Kind::Binary: {
        T rhs = std::move(stack.back());
        stack.pop_back();
        T r = apply_binary(in.binary, stack.back(), rhs, *in.node);
        stack.back() = std::move(r);
        break;
      }
    }
    const Complex top = value_of(stack.back());
    if (!std::isfinite(top.real()) || !std::isfinite(top.imag()))
      throw DomainError("non-finite result", to_string(*in.node));
  }
  return std::move(stack.back());
}

Complex CompiledExpr::eval(std::span<const Complex> slots) const { return run<Complex>(slots, {}); }

DualValue CompiledExpr::eval_grad(std::span<const Complex> slots, std::span<const std::size_t> wrt) const {
  return run<DualValue>(slots, wrt);
}

bool CompiledExpr::reads_slot(std::size_t slot) const {
  for (const Instr& in : code_)
    if (in.kind == Kind::Slot && in.slot == slot) return true;
  return false;
}

}  // namespace ndham
