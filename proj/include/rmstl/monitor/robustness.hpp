#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <unordered_map>
#include <vector>

#include "rmstl/error.hpp"
#include "rmstl/stl/formula.hpp"
#include "rmstl/stl/signal.hpp"

namespace rmstl::monitor {

using stl::Formula;
using stl::FormulaKind;
using stl::FormulaNode;
using stl::Signal;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Enclosure [lo, hi] of the robustness of a formula over every admissible
/// completion of a partial signal.
struct RobustnessInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool is_point() const noexcept { return lo == hi; }
  bool contains(double v) const noexcept { return lo <= v && v <= hi; }
  friend bool operator==(const RobustnessInterval&, const RobustnessInterval&) = default;
};

inline RobustnessInterval min(RobustnessInterval a, RobustnessInterval b) {
  return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
}
inline RobustnessInterval max(RobustnessInterval a, RobustnessInterval b) {
  return {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
}
inline RobustnessInterval operator-(RobustnessInterval a) { return {-a.hi, -a.lo}; }

/// How the evaluator treats steps at or beyond the signal length.
enum class TailModel {
  /// Unobserved samples may take any value within the declared variable bounds.
  Unknown,
  /// The last recorded sample persists (piecewise-constant extension of a finished episode).
  HoldLast,
};

/// Robustness of a predicate node for a concrete sample vector.
inline double predicate_robustness(const FormulaNode& n, std::span<const double> sample) {
  double v = n.expr.eval(sample);
  switch (n.cmp) {
    case stl::Comparison::Greater:
    case stl::Comparison::GreaterEq: return v;
    case stl::Comparison::Less:
    case stl::Comparison::LessEq: return -v;
    default: throw UnsupportedPredicate("equality predicates have no usable robustness: " + n.expr.to_string());
  }
}

/// Interval-valued evaluator over a fixed snapshot of a signal.
///
/// Values at steps >= signal length are identical for every step (all inputs
/// are unobserved), so each node carries one cached "tail" interval and only the
/// observed prefix is evaluated explicitly. Eventually/Always use monotonic-deque
/// sliding windows; Until is evaluated directly from its definition.
class Evaluator {
 public:
  explicit Evaluator(const Signal& s, TailModel tail = TailModel::Unknown)
      : signal_(s), tail_model_(tail), length_(static_cast<std::int64_t>(s.length())) {
    if (tail_model_ == TailModel::HoldLast && length_ == 0)
      throw OutOfRecordedRange("hold-last evaluation of an empty signal");
  }

  RobustnessInterval at(const Formula& f, std::int64_t t) { return series(*f.node(), t, t).front(); }

  /// Values for steps t0..t1 inclusive.
  std::vector<RobustnessInterval> series(const Formula& f, std::int64_t t0, std::int64_t t1) {
    return series(*f.node(), t0, t1);
  }

  RobustnessInterval tail(const FormulaNode& n) {
    if (auto it = tails_.find(&n); it != tails_.end()) return it->second;
    RobustnessInterval v{};
    switch (n.kind) {
      case FormulaKind::True: v = {kInf, kInf}; break;
      case FormulaKind::Predicate:
        if (tail_model_ == TailModel::HoldLast) {
          double r = predicate_robustness(n, signal_.sample(signal_.length() - 1));
          v = {r, r};
        } else {
          auto range = n.expr.eval_range(signal_.bounds());
          switch (n.cmp) {
            case stl::Comparison::Greater:
            case stl::Comparison::GreaterEq: v = {range.lo, range.hi}; break;
            case stl::Comparison::Less:
            case stl::Comparison::LessEq: v = {-range.hi, -range.lo}; break;
            default: throw UnsupportedPredicate("equality predicates have no usable robustness: " + n.expr.to_string());
          }
        }
        break;
      case FormulaKind::Not: v = -tail(*n.left.node()); break;
      case FormulaKind::And: v = min(tail(*n.left.node()), tail(*n.right.node())); break;
      case FormulaKind::Or: v = max(tail(*n.left.node()), tail(*n.right.node())); break;
      case FormulaKind::Eventually:
      case FormulaKind::Always: v = tail(*n.left.node()); break;
      case FormulaKind::Until: v = min(tail(*n.left.node()), tail(*n.right.node())); break;
    }
    tails_.emplace(&n, v);
    return v;
  }

 private:
  // Observed-prefix values of `n` on [from, min(to, length-1)] plus the tail value.
  struct Partial {
    std::int64_t from;
    std::vector<RobustnessInterval> known;
    RobustnessInterval tail;

    RobustnessInterval operator[](std::int64_t k) const {
      auto i = k - from;
      return i < static_cast<std::int64_t>(known.size()) ? known[static_cast<std::size_t>(i)] : tail;
    }
  };

  Partial partial(const FormulaNode& n, std::int64_t from, std::int64_t to) {
    Partial p{from, {}, tail(n)};
    std::int64_t last = std::min(to, length_ - 1);
    if (last >= from) p.known = known_series(n, from, last);
    return p;
  }

  std::vector<RobustnessInterval> series(const FormulaNode& n, std::int64_t t0, std::int64_t t1) {
    std::vector<RobustnessInterval> out;
    out.reserve(static_cast<std::size_t>(t1 - t0 + 1));
    std::int64_t last = std::min(t1, length_ - 1);
    if (last >= t0) out = known_series(n, t0, last);
    out.resize(static_cast<std::size_t>(t1 - t0 + 1), tail(n));
    return out;
  }

  // Requires t0 <= t1 < length.
  std::vector<RobustnessInterval> known_series(const FormulaNode& n, std::int64_t t0, std::int64_t t1) {
    const auto count = static_cast<std::size_t>(t1 - t0 + 1);
    std::vector<RobustnessInterval> out(count);
    switch (n.kind) {
      case FormulaKind::True: std::fill(out.begin(), out.end(), RobustnessInterval{kInf, kInf}); break;
      case FormulaKind::Predicate:
        for (std::size_t i = 0; i < count; ++i) {
          double r = predicate_robustness(n, signal_.sample(static_cast<std::size_t>(t0) + i));
          out[i] = {r, r};
        }
        break;
      case FormulaKind::Not: {
        out = known_series(*n.left.node(), t0, t1);
        for (auto& v : out) v = -v;
        break;
      }
      case FormulaKind::And:
      case FormulaKind::Or: {
        auto a = known_series(*n.left.node(), t0, t1);
        auto b = known_series(*n.right.node(), t0, t1);
        bool conj = n.kind == FormulaKind::And;
        for (std::size_t i = 0; i < count; ++i) out[i] = conj ? min(a[i], b[i]) : max(a[i], b[i]);
        break;
      }
      case FormulaKind::Eventually:
      case FormulaKind::Always: sliding(n, t0, t1, out); break;
      case FormulaKind::Until: until(n, t0, t1, out); break;
    }
    return out;
  }

  // Window [j+a, j+b]; every index >= length is represented by index `length`.
  void sliding(const FormulaNode& n, std::int64_t t0, std::int64_t t1, std::vector<RobustnessInterval>& out) {
    const auto [a, b] = n.interval;
    const bool is_max = n.kind == FormulaKind::Eventually;
    const std::int64_t cap = std::max(length_, t0 + a);
    Partial child = partial(*n.left.node(), t0 + a, std::min(t1 + b, cap));
    auto better = [is_max](double x, double y) { return is_max ? x >= y : x <= y; };

    std::deque<std::int64_t> lo_q, hi_q;
    std::int64_t next = t0 + a;
    for (std::int64_t j = t0; j <= t1; ++j) {
      const std::int64_t w_lo = std::min(j + a, cap);
      const std::int64_t w_hi = std::min(j + b, cap);
      for (; next <= w_hi; ++next) {
        auto v = child[next];
        while (!lo_q.empty() && better(v.lo, child[lo_q.back()].lo)) lo_q.pop_back();
        lo_q.push_back(next);
        while (!hi_q.empty() && better(v.hi, child[hi_q.back()].hi)) hi_q.pop_back();
        hi_q.push_back(next);
      }
      while (lo_q.front() < w_lo) lo_q.pop_front();
      while (hi_q.front() < w_lo) hi_q.pop_front();
      out[static_cast<std::size_t>(j - t0)] = {child[lo_q.front()].lo, child[hi_q.front()].hi};
    }
  }

  void until(const FormulaNode& n, std::int64_t t0, std::int64_t t1, std::vector<RobustnessInterval>& out) {
    const auto [a, b] = n.interval;
    const std::int64_t cap_l = std::max(length_, t0);
    const std::int64_t cap_r = std::max(length_, t0 + a);
    Partial lhs = partial(*n.left.node(), t0, std::min(t1 + b, cap_l));
    Partial rhs = partial(*n.right.node(), t0 + a, std::min(t1 + b, cap_r));
    for (std::int64_t j = t0; j <= t1; ++j) {
      RobustnessInterval run{kInf, kInf};
      RobustnessInterval best{-kInf, -kInf};
      const std::int64_t stop = std::min(j + b, length_);
      for (std::int64_t tp = j; tp <= stop; ++tp) {
        run = min(run, lhs[tp]);
        // Index `length_` stands for every later step, including j+a when that is later.
        if (tp >= j + a || tp == length_) best = max(best, min(rhs[std::max(tp, t0 + a)], run));
      }
      out[static_cast<std::size_t>(j - t0)] = best;
    }
  }

  const Signal& signal_;
  TailModel tail_model_;
  std::int64_t length_;
  std::unordered_map<const FormulaNode*, RobustnessInterval> tails_;
};

/// Robustness interval of `f` at step `t` given the recorded prefix of `s`.
inline RobustnessInterval rob_interval(const Formula& f, const Signal& s, std::int64_t t) {
  return Evaluator(s).at(f, t);
}

/// Exact robustness; requires the signal to cover the formula horizon after `t`.
inline double rob_offline(const Formula& f, const Signal& s, std::int64_t t) {
  const auto hz = stl::formula_horizon(f);
  if (t < 0 || t + hz >= static_cast<std::int64_t>(s.length()))
    throw HorizonExceedsSignal("evaluation at step " + std::to_string(t) + " needs " + std::to_string(t + hz + 1) +
                               " samples, signal has " + std::to_string(s.length()));
  return Evaluator(s).at(f, t).lo;
}

/// Sliding-window evaluation at max(0, t - horizon).
inline RobustnessInterval eval_event(const Formula& f, const Signal& s, std::int64_t t) {
  const auto hz = stl::formula_horizon(f);
  return rob_interval(f, s, std::max<std::int64_t>(0, t - hz));
}

struct TruncatedRobustness {
  double value = 0.0;
  /// The signal was shorter than the formula horizon; the last sample was held.
  bool truncated = false;
};

/// Robustness over a finished signal, holding the last sample when the horizon
/// reaches past the end.
inline TruncatedRobustness rob_truncated(const Formula& f, const Signal& s, std::int64_t t) {
  const auto hz = stl::formula_horizon(f);
  Evaluator ev(s, TailModel::HoldLast);
  return {ev.at(f, t).lo, t + hz >= static_cast<std::int64_t>(s.length())};
}

}  // namespace rmstl::monitor
