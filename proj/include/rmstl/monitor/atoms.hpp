#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rmstl/monitor/robustness.hpp"

namespace rmstl::monitor {

/// `LowerAtLeast`: lo >= threshold. `UpperAtMost`: hi <= threshold.
enum class AtomKind { LowerAtLeast, UpperAtMost };

/// `AtOrigin` evaluates at step 0; `SlidingWindow` at max(0, t - horizon).
enum class EvalMode { AtOrigin, SlidingWindow };

/// Proposition over the robustness interval of a formula.
struct PredicateAtom {
  std::string name;
  Formula formula;
  AtomKind kind = AtomKind::LowerAtLeast;
  double threshold = 0.0;
  EvalMode mode = EvalMode::SlidingWindow;
  std::int64_t horizon = 0;

  static PredicateAtom make(std::string name, Formula f, AtomKind kind = AtomKind::LowerAtLeast,
                            double threshold = 0.0, EvalMode mode = EvalMode::SlidingWindow) {
    auto hz = stl::formula_horizon(f);
    return {std::move(name), std::move(f), kind, threshold, mode, hz};
  }

  std::int64_t evaluation_time(std::int64_t t) const {
    return mode == EvalMode::AtOrigin ? 0 : std::max<std::int64_t>(0, t - horizon);
  }

  bool holds(const RobustnessInterval& r) const {
    return kind == AtomKind::LowerAtLeast ? r.lo >= threshold : r.hi <= threshold;
  }
};

/// Set of atoms (by declaration index) true at one step.
class TruthAssignment {
 public:
  TruthAssignment() = default;
  explicit TruthAssignment(std::size_t atom_count) : bits_(atom_count, false) {}

  /// Builds an assignment from a bit mask over the first 64 atoms.
  static TruthAssignment from_mask(std::size_t atom_count, std::uint64_t mask) {
    TruthAssignment s(atom_count);
    for (std::size_t i = 0; i < atom_count && i < 64; ++i) s.bits_[i] = (mask >> i) & 1u;
    return s;
  }

  bool contains(std::size_t atom) const { return atom < bits_.size() && bits_[atom]; }
  void insert(std::size_t atom) { bits_.at(atom) = true; }
  void erase(std::size_t atom) { bits_.at(atom) = false; }
  std::size_t universe() const noexcept { return bits_.size(); }

  std::size_t count() const {
    std::size_t n = 0;
    for (bool b : bits_) n += b;
    return n;
  }

  friend bool operator==(const TruthAssignment&, const TruthAssignment&) = default;

 private:
  std::vector<bool> bits_;
};

struct AtomEvaluation {
  TruthAssignment sigma;
  std::vector<RobustnessInterval> robustness;
};

/// Evaluates every atom at step `t` against the current signal prefix.
inline AtomEvaluation truth_assignment(std::span<const PredicateAtom> atoms, const Signal& s, std::int64_t t) {
  AtomEvaluation out{TruthAssignment(atoms.size()), {}};
  out.robustness.reserve(atoms.size());
  Evaluator ev(s);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    auto r = ev.at(atoms[i].formula, atoms[i].evaluation_time(t));
    if (atoms[i].holds(r)) out.sigma.insert(i);
    out.robustness.push_back(r);
  }
  return out;
}

}  // namespace rmstl::monitor
