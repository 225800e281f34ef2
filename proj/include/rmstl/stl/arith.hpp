#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>

#include "rmstl/detail/format.hpp"

namespace rmstl::stl {

/// Closed real range, used both for variable bounds and interval evaluation.
struct Range {
  double lo = 0.0;
  double hi = 0.0;

  friend bool operator==(const Range&, const Range&) = default;
};

struct ArithNode;

/// Immutable arithmetic expression over signal variables.
///
/// Variables are referenced by their index in the owning `VariableTable`; the
/// name is kept only for printing.
class ArithExpr {
 public:
  enum class Kind { Constant, Variable, Add, Sub, Mul, Abs, Negate };

  static ArithExpr constant(double v);
  static ArithExpr variable(std::size_t index, std::string name);
  static ArithExpr add(ArithExpr a, ArithExpr b) { return binary(Kind::Add, std::move(a), std::move(b)); }
  static ArithExpr sub(ArithExpr a, ArithExpr b) { return binary(Kind::Sub, std::move(a), std::move(b)); }
  static ArithExpr mul(ArithExpr a, ArithExpr b) { return binary(Kind::Mul, std::move(a), std::move(b)); }
  static ArithExpr abs(ArithExpr a) { return unary(Kind::Abs, std::move(a)); }
  static ArithExpr negate(ArithExpr a) { return unary(Kind::Negate, std::move(a)); }

  Kind kind() const;
  double value() const;
  std::size_t var_index() const;
  const std::string& var_name() const;
  const ArithExpr& lhs() const;
  const ArithExpr& rhs() const;
  const ArithExpr& operand() const { return lhs(); }

  double eval(std::span<const double> sample) const;
  Range eval_range(std::span<const Range> bounds) const;
  std::string to_string() const;

  friend bool operator==(const ArithExpr& a, const ArithExpr& b);

 private:
  static ArithExpr binary(Kind k, ArithExpr a, ArithExpr b);
  static ArithExpr unary(Kind k, ArithExpr a);
  int precedence() const;
  void print(std::string& out) const;

  ArithExpr() = default;
  explicit ArithExpr(std::shared_ptr<const ArithNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ArithNode> node_;
  friend struct ArithNode;
};

struct ArithNode {
  ArithExpr::Kind kind;
  double value = 0.0;
  std::size_t index = 0;
  std::string name;
  ArithExpr a;
  ArithExpr b;
};

inline ArithExpr ArithExpr::constant(double v) {
  return ArithExpr(std::make_shared<const ArithNode>(ArithNode{Kind::Constant, v, 0, {}, {}, {}}));
}

inline ArithExpr ArithExpr::variable(std::size_t index, std::string name) {
  return ArithExpr(
      std::make_shared<const ArithNode>(ArithNode{Kind::Variable, 0.0, index, std::move(name), {}, {}}));
}

inline ArithExpr ArithExpr::binary(Kind k, ArithExpr a, ArithExpr b) {
  return ArithExpr(std::make_shared<const ArithNode>(ArithNode{k, 0.0, 0, {}, std::move(a), std::move(b)}));
}

inline ArithExpr ArithExpr::unary(Kind k, ArithExpr a) {
  return ArithExpr(std::make_shared<const ArithNode>(ArithNode{k, 0.0, 0, {}, std::move(a), {}}));
}

inline ArithExpr::Kind ArithExpr::kind() const { return node_->kind; }
inline double ArithExpr::value() const { return node_->value; }
inline std::size_t ArithExpr::var_index() const { return node_->index; }
inline const std::string& ArithExpr::var_name() const { return node_->name; }

inline const ArithExpr& ArithExpr::lhs() const { return node_->a; }
inline const ArithExpr& ArithExpr::rhs() const { return node_->b; }

inline double ArithExpr::eval(std::span<const double> sample) const {
  switch (kind()) {
    case Kind::Constant: return value();
    case Kind::Variable: return sample[var_index()];
    case Kind::Add: return lhs().eval(sample) + rhs().eval(sample);
    case Kind::Sub: return lhs().eval(sample) - rhs().eval(sample);
    case Kind::Mul: return lhs().eval(sample) * rhs().eval(sample);
    case Kind::Abs: return std::fabs(lhs().eval(sample));
    case Kind::Negate: return -lhs().eval(sample);
  }
  return 0.0;
}

inline Range ArithExpr::eval_range(std::span<const Range> bounds) const {
  switch (kind()) {
    case Kind::Constant: return {value(), value()};
    case Kind::Variable: return bounds[var_index()];
    case Kind::Add: {
      auto l = lhs().eval_range(bounds), r = rhs().eval_range(bounds);
      return {l.lo + r.lo, l.hi + r.hi};
    }
    case Kind::Sub: {
      auto l = lhs().eval_range(bounds), r = rhs().eval_range(bounds);
      return {l.lo - r.hi, l.hi - r.lo};
    }
    case Kind::Mul: {
      auto l = lhs().eval_range(bounds), r = rhs().eval_range(bounds);
      double p[] = {l.lo * r.lo, l.lo * r.hi, l.hi * r.lo, l.hi * r.hi};
      return {*std::min_element(p, p + 4), *std::max_element(p, p + 4)};
    }
    case Kind::Abs: {
      auto r = lhs().eval_range(bounds);
      if (r.lo >= 0) return r;
      if (r.hi <= 0) return {-r.hi, -r.lo};
      return {0.0, std::max(-r.lo, r.hi)};
    }
    case Kind::Negate: {
      auto r = lhs().eval_range(bounds);
      return {-r.hi, -r.lo};
    }
  }
  return {};
}

inline int ArithExpr::precedence() const {
  switch (kind()) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul: return 2;
    default: return 3;
  }
}

inline void ArithExpr::print(std::string& out) const {
  auto wrap = [&out](const ArithExpr& e, bool parens) {
    if (parens) out += '(';
    e.print(out);
    if (parens) out += ')';
  };
  switch (kind()) {
    case Kind::Constant: out += detail::shortest(value()); return;
    case Kind::Variable: out += var_name(); return;
    case Kind::Abs:
      out += "abs(";
      lhs().print(out);
      out += ')';
      return;
    case Kind::Negate:
      // `-<number>` would re-parse as a negative literal, so constants keep parens too.
      out += '-';
      wrap(lhs(), lhs().kind() != Kind::Variable && lhs().kind() != Kind::Abs);
      return;
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul: {
      int p = precedence();
      wrap(lhs(), lhs().precedence() < p);
      out += kind() == Kind::Add ? " + " : kind() == Kind::Sub ? " - " : " * ";
      wrap(rhs(), rhs().precedence() <= p);
      return;
    }
  }
}

inline std::string ArithExpr::to_string() const {
  std::string s;
  print(s);
  return s;
}

inline bool operator==(const ArithExpr& x, const ArithExpr& y) {
  if (x.node_ == y.node_) return true;
  if (x.kind() != y.kind()) return false;
  switch (x.kind()) {
    case ArithExpr::Kind::Constant: return x.value() == y.value();
    case ArithExpr::Kind::Variable: return x.var_index() == y.var_index() && x.var_name() == y.var_name();
    case ArithExpr::Kind::Abs:
    case ArithExpr::Kind::Negate: return x.lhs() == y.lhs();
    default: return x.lhs() == y.lhs() && x.rhs() == y.rhs();
  }
}

}  // namespace rmstl::stl
