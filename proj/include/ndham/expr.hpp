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

#ifndef NDHAM_EXPR_HPP
#define NDHAM_EXPR_HPP

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ndham/dual.hpp"
#include "ndham/errors.hpp"

namespace ndham {

enum class UnaryOp { Neg, Sin, Cos, Exp, Log, Sqrt };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct ConstantNode {
  Complex value;
};

struct VariableNode {
  std::string name;
};

struct UnaryNode {
  UnaryOp op;
  NodePtr arg;
};

struct BinaryNode {
  BinaryOp op;
  NodePtr lhs;
  NodePtr rhs;
};

struct Node {
  std::variant<ConstantNode, VariableNode, UnaryNode, BinaryNode> data;
};

using Bindings = std::map<std::string, Complex, std::less<>>;
using Constants = std::map<std::string, double, std::less<>>;

/// Maps variable names onto evaluation slots. Several names may share a slot.
using SlotMap = std::map<std::string, std::size_t, std::less<>>;

class CompiledExpr;

/// Immutable arithmetic expression tree over named variables.
///
/// Grammar, loosest binding first: `+ -`, then `* /`, then unary minus, then
/// right-associative `^`. Atoms are decimal numbers, identifiers, calls of
/// sin/cos/exp/log/sqrt and parenthesized expressions. The identifier `i` is
/// the imaginary unit.
class Expr {
 public:
  explicit Expr(NodePtr root);

  static Expr parse(std::string_view source);

  static Expr constant(Complex value);
  static Expr variable(std::string name);
  static Expr unary(UnaryOp op, const Expr& arg);
  static Expr binary(BinaryOp op, const Expr& lhs, const Expr& rhs);

  const Node& root() const noexcept { return *root_; }
  const NodePtr& root_ptr() const noexcept { return root_; }

  /// Fully parenthesized text that parses back to the same tree.
  std::string str() const;

  std::set<std::string> variables() const;

  Complex eval(const Bindings& bindings) const;

  /// Value and exact first partials with respect to `wrt`.
  std::pair<Complex, std::vector<Complex>> eval_grad(const Bindings& bindings,
                                                     std::span<const std::string> wrt) const;

  /// Resolves variables to slots; names found in `constants` are folded in.
  /// Throws UnboundVariable for any name found in neither.
  CompiledExpr compile(const SlotMap& slots, const Constants& constants = {}) const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  NodePtr root_;
};

std::string to_string(const Node& node);
bool structurally_equal(const Node& a, const Node& b);

/// Flattened postfix form of an Expr with variables resolved to slot indices.
class CompiledExpr {
 public:
  Complex eval(std::span<const Complex> slots) const;

  /// Forward-mode evaluation; partials are taken with respect to the slots
  /// listed in `wrt` (in that order).
  DualValue eval_grad(std::span<const Complex> slots, std::span<const std::size_t> wrt) const;

  /// True if any instruction reads `slot`.
  bool reads_slot(std::size_t slot) const;

 private:
  friend class Expr;

  enum class Kind { Constant, Slot, Unary, Binary };
  struct Instr {
    Kind kind;
    UnaryOp unary = UnaryOp::Neg;
    BinaryOp binary = BinaryOp::Add;
    Complex value{};
    std::size_t slot = 0;
    const Node* node = nullptr;
  };

  template <typename T>
  T run(std::span<const Complex> slots, std::span<const std::size_t> wrt) const;

  NodePtr root_;
  std::vector<Instr> code_;
  std::size_t max_depth_ = 0;
};

}  // namespace ndham

#endif  // NDHAM_EXPR_HPP
