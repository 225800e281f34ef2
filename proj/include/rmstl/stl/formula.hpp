#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>

#include "rmstl/error.hpp"
#include "rmstl/stl/arith.hpp"

namespace rmstl::stl {

enum class FormulaKind { True, Predicate, Not, And, Or, Until, Eventually, Always };

/// Comparison of a normalized predicate `expr ~ 0`.
enum class Comparison { Less, LessEq, Greater, GreaterEq, Equal, NotEqual };

inline const char* to_string(Comparison c) {
  switch (c) {
    case Comparison::Less: return "<";
    case Comparison::LessEq: return "<=";
    case Comparison::Greater: return ">";
    case Comparison::GreaterEq: return ">=";
    case Comparison::Equal: return "==";
    case Comparison::NotEqual: return "!=";
  }
  return "?";
}

/// Closed interval of environment steps, `0 <= lo <= hi`.
struct StepInterval {
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  friend bool operator==(const StepInterval&, const StepInterval&) = default;
};

struct FormulaNode;

/// Immutable, shareable STL formula.
///
/// `Eventually` and `Always` are kept as their own node kinds; the monitor
/// evaluates them as sliding max/min, which coincides exactly with the
/// `true until` / `not eventually not` desugarings.
class Formula {
 public:
  /// Empty placeholder; only assignment and node() are valid on it.
  Formula() = default;

  static Formula truth();
  static Formula predicate(ArithExpr expr, Comparison cmp);
  static Formula negation(Formula f);
  static Formula conjunction(Formula a, Formula b);
  static Formula disjunction(Formula a, Formula b);
  static Formula until(Formula a, StepInterval i, Formula b);
  static Formula eventually(StepInterval i, Formula f);
  static Formula always(StepInterval i, Formula f);

  FormulaKind kind() const;
  const ArithExpr& expr() const;
  Comparison comparison() const;
  StepInterval interval() const;
  /// Operand of unary nodes, left operand of binary nodes.
  const Formula& left() const;
  const Formula& right() const;
  const FormulaNode* node() const noexcept { return node_.get(); }

  std::string to_string() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
  int precedence() const;
  void print(std::string& out) const;

  std::shared_ptr<const FormulaNode> node_;
  friend struct FormulaNode;
};

struct FormulaNode {
  FormulaKind kind;
  Comparison cmp = Comparison::Greater;
  ArithExpr expr = ArithExpr::constant(0.0);
  StepInterval interval{};
  Formula left{};
  Formula right{};
};

namespace detail {
inline StepInterval checked(StepInterval i) {
  if (i.lo < 0) throw EmptyInterval(i.lo, i.hi);
  if (i.lo > i.hi) throw EmptyInterval(i.lo, i.hi);
  return i;
}
}  // namespace detail

inline Formula Formula::truth() {
  return Formula(std::make_shared<const FormulaNode>(FormulaNode{FormulaKind::True}));
}

inline Formula Formula::predicate(ArithExpr expr, Comparison cmp) {
  return Formula(std::make_shared<const FormulaNode>(FormulaNode{FormulaKind::Predicate, cmp, std::move(expr)}));
}

inline Formula Formula::negation(Formula f) {
  FormulaNode n{FormulaKind::Not};
  n.left = std::move(f);
  return Formula(std::make_shared<const FormulaNode>(std::move(n)));
}

inline Formula Formula::conjunction(Formula a, Formula b) {
  FormulaNode n{FormulaKind::And};
  n.left = std::move(a);
  n.right = std::move(b);
  return Formula(std::make_shared<const FormulaNode>(std::move(n)));
}

inline Formula Formula::disjunction(Formula a, Formula b) {
  FormulaNode n{FormulaKind::Or};
  n.left = std::move(a);
  n.right = std::move(b);
  return Formula(std::make_shared<const FormulaNode>(std::move(n)));
}

inline Formula Formula::until(Formula a, StepInterval i, Formula b) {
  FormulaNode n{FormulaKind::Until};
  n.interval = detail::checked(i);
  n.left = std::move(a);
  n.right = std::move(b);
  return Formula(std::make_shared<const FormulaNode>(std::move(n)));
}

inline Formula Formula::eventually(StepInterval i, Formula f) {
  FormulaNode n{FormulaKind::Eventually};
  n.interval = detail::checked(i);
  n.left = std::move(f);
  return Formula(std::make_shared<const FormulaNode>(std::move(n)));
}

inline Formula Formula::always(StepInterval i, Formula f) {
  FormulaNode n{FormulaKind::Always};
  n.interval = detail::checked(i);
  n.left = std::move(f);
  return Formula(std::make_shared<const FormulaNode>(std::move(n)));
}

inline FormulaKind Formula::kind() const { return node_->kind; }
inline const ArithExpr& Formula::expr() const { return node_->expr; }
inline Comparison Formula::comparison() const { return node_->cmp; }
inline StepInterval Formula::interval() const { return node_->interval; }
inline const Formula& Formula::left() const { return node_->left; }
inline const Formula& Formula::right() const { return node_->right; }

// until < or < and < unary/atoms
inline int Formula::precedence() const {
  switch (kind()) {
    case FormulaKind::Until: return 0;
    case FormulaKind::Or: return 1;
    case FormulaKind::And: return 2;
    default: return 3;
  }
}

inline void Formula::print(std::string& out) const {
  auto wrap = [&out](const Formula& f, bool parens) {
    if (parens) out += '(';
    f.print(out);
    if (parens) out += ')';
  };
  auto bounds = [&out](StepInterval i) {
    out += '[' + std::to_string(i.lo) + ',' + std::to_string(i.hi) + "] ";
  };
  switch (kind()) {
    case FormulaKind::True: out += "true"; return;
    case FormulaKind::Predicate:
      out += expr().to_string();
      out += ' ';
      out += stl::to_string(comparison());
      out += " 0";
      return;
    case FormulaKind::Not:
      out += "not ";
      wrap(left(), left().precedence() < 3);
      return;
    case FormulaKind::Eventually:
    case FormulaKind::Always:
      out += kind() == FormulaKind::Eventually ? "ev_" : "alw_";
      bounds(interval());
      wrap(left(), left().precedence() < 3);
      return;
    case FormulaKind::And:
    case FormulaKind::Or: {
      int p = precedence();
      wrap(left(), left().precedence() < p);
      out += kind() == FormulaKind::And ? " and " : " or ";
      wrap(right(), right().precedence() <= p);
      return;
    }
    case FormulaKind::Until:
      wrap(left(), left().precedence() <= 0);
      out += " until_";
      bounds(interval());
      wrap(right(), false);
      return;
  }
}

inline std::string Formula::to_string() const {
  std::string s;
  print(s);
  return s;
}

inline bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case FormulaKind::True: return true;
    case FormulaKind::Predicate: return a.comparison() == b.comparison() && a.expr() == b.expr();
    case FormulaKind::Not: return a.left() == b.left();
    case FormulaKind::And:
    case FormulaKind::Or: return a.left() == b.left() && a.right() == b.right();
    case FormulaKind::Until:
      return a.interval() == b.interval() && a.left() == b.left() && a.right() == b.right();
    case FormulaKind::Eventually:
    case FormulaKind::Always: return a.interval() == b.interval() && a.left() == b.left();
  }
  return false;
}

/// Number of future steps after `t` needed to evaluate `f` exactly at `t`.
inline std::int64_t formula_horizon(const Formula& f) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::Predicate: return 0;
    case FormulaKind::Not: return formula_horizon(f.left());
    case FormulaKind::And:
    case FormulaKind::Or: return std::max(formula_horizon(f.left()), formula_horizon(f.right()));
    case FormulaKind::Eventually:
    case FormulaKind::Always: return f.interval().hi + formula_horizon(f.left());
    case FormulaKind::Until:
      return f.interval().hi + std::max(formula_horizon(f.left()), formula_horizon(f.right()));
  }
  return 0;
}

}  // namespace rmstl::stl
