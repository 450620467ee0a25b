// SPDX-License-Identifier: MIT
/*!
  \file
  \brief Scalar field expressions: parsing, printing, and jet evaluation.

  Grammar (left-associative, one optional exponent per factor):
    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' exponent)?
    base   := number | ident | func '(' expr ')' | '(' expr ')' | '-' base
  Identifiers are [A-Za-z][A-Za-z0-9]*; the unary builtins are sin, cos, exp,
  log, sqrt.  Exponents are optionally signed numeric literals.
*/
#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "warpcheck/jet.hpp"

namespace warpcheck {

/// Thrown on malformed input; `offset` is the byte position of the defect.
class ParseError : public std::runtime_error {
 public:
  ParseError(size_t offset, const std::string& message)
      : std::runtime_error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

enum class Builtin { sin, cos, exp, log, sqrt };

/*!
  \brief Immutable expression tree over a named list of variables.

  Nodes are shared; copies are cheap.  Variables are referenced by index into
  `vars`, so an expression can be re-homed into a larger variable space
  (`with_vars`) without rewriting the tree contents beyond index relabeling.
*/
class ScalarFieldExpr {
 public:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  struct Node {
    enum class Kind { number, var, add, sub, mul, div, neg, pow, call };
    Kind kind;
    double number = 0.0;              // number
    int var = -1;                     // var
    Builtin func = Builtin::sin;      // call
    double exponent = 0.0;            // pow
    bool exponent_is_int = false;     // pow
    NodePtr lhs, rhs;                 // children (rhs unused for neg/call/pow)
  };

  ScalarFieldExpr() = default;
  ScalarFieldExpr(NodePtr root, std::vector<std::string> vars)
      : root_(std::move(root)), vars_(std::move(vars)) {}

  bool valid() const { return root_ != nullptr; }
  const NodePtr& root() const { return root_; }
  const std::vector<std::string>& vars() const { return vars_; }

  /// Plain scalar evaluation (no derivative machinery).
  double eval_value(std::span<const double> point) const;

  /// Evaluation over the jet ring with one jet per variable (shared layout);
  /// passing non-coordinate jets performs truncated composition.
  Jet eval(const std::vector<Jet>& var_jets) const;

  /// Round-trippable rendering: parse(to_string()) rebuilds this tree exactly.
  std::string to_string() const;

  /// Structural equality (numbers compare bit-exactly).
  bool same_ast(const ScalarFieldExpr& other) const;

  /// Re-homes the expression into `new_vars`; `index_map[i]` is the position
  /// of this expression's variable i in the new list.
  ScalarFieldExpr with_vars(std::vector<std::string> new_vars,
                            const std::vector<int>& index_map) const;

 private:
  NodePtr root_;
  std::vector<std::string> vars_;
};

/// Parses `src` over the given coordinate names.  Throws ParseError.
ScalarFieldExpr parse(std::string_view src, std::vector<std::string> vars);

/// Jet of the expression at `point` with identity coordinate jets.
/// `order` must lie in [0, 4].
Jet eval_jet(const ScalarFieldExpr& e, std::span<const double> point, int order);

/// Programmatic constructors (AST builders).
namespace exprb {
ScalarFieldExpr::NodePtr num(double v);
ScalarFieldExpr::NodePtr var(int index);
ScalarFieldExpr::NodePtr add(ScalarFieldExpr::NodePtr a, ScalarFieldExpr::NodePtr b);
ScalarFieldExpr::NodePtr sub(ScalarFieldExpr::NodePtr a, ScalarFieldExpr::NodePtr b);
ScalarFieldExpr::NodePtr mul(ScalarFieldExpr::NodePtr a, ScalarFieldExpr::NodePtr b);
ScalarFieldExpr::NodePtr div(ScalarFieldExpr::NodePtr a, ScalarFieldExpr::NodePtr b);
ScalarFieldExpr::NodePtr neg(ScalarFieldExpr::NodePtr a);
ScalarFieldExpr::NodePtr powi(ScalarFieldExpr::NodePtr a, long long n);
ScalarFieldExpr::NodePtr call(Builtin f, ScalarFieldExpr::NodePtr a);
}  // namespace exprb

}  // namespace warpcheck
