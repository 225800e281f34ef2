#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rmstl/detail/format.hpp"
#include "rmstl/error.hpp"
#include "rmstl/rm/guard.hpp"

namespace rmstl::rm {

/// Reward emitted by a transition: a constant, or the environment's own reward.
struct RewardSpec {
  enum class Kind { Constant, EnvPassthrough };
  Kind kind = Kind::Constant;
  double value = 0.0;

  static RewardSpec constant(double v) { return {Kind::Constant, v}; }
  static RewardSpec env() { return {Kind::EnvPassthrough, 0.0}; }

  double resolve(double env_reward) const { return kind == Kind::Constant ? value : env_reward; }
  std::string to_string() const { return kind == Kind::Constant ? rmstl::detail::shortest(value) : std::string("env"); }
};

/// Unvalidated machine description, as read from a task file.
struct MachineDefinition {
  struct Edge {
    std::string from;
    std::string guard;
    std::string to;
    RewardSpec reward;
  };

  std::string name;
  std::vector<std::string> states;
  std::string initial;
  std::vector<std::string> terminal;
  std::vector<Edge> transitions;
  double weight = 1.0;
};

struct Transition {
  std::size_t from;
  Guard guard;
  std::size_t to;
  RewardSpec reward;
};

struct MachineStep {
  std::size_t next;
  double reward;
  /// Index of the fired transition, empty for the implicit self-loop.
  std::optional<std::size_t> transition;
};

/// Reward machine with first-match transition semantics. Any (state, sigma)
/// pair without a satisfied outgoing guard takes an implicit zero-reward self-loop.
class RewardMachine {
 public:
  RewardMachine(std::string name, std::vector<std::string> states, std::size_t initial, std::vector<bool> terminal,
                std::vector<Transition> transitions, double weight)
      : name_(std::move(name)),
        states_(std::move(states)),
        initial_(initial),
        terminal_(std::move(terminal)),
        transitions_(std::move(transitions)),
        weight_(weight) {
    by_state_.resize(states_.size());
    for (std::size_t i = 0; i < transitions_.size(); ++i) by_state_[transitions_[i].from].push_back(i);
  }

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& states() const noexcept { return states_; }
  std::size_t state_count() const noexcept { return states_.size(); }
  std::size_t initial() const noexcept { return initial_; }
  bool is_terminal(std::size_t u) const { return terminal_.at(u); }
  const std::vector<Transition>& transitions() const noexcept { return transitions_; }
  double weight() const noexcept { return weight_; }

  std::optional<std::size_t> state_index(const std::string& s) const {
    auto it = std::find(states_.begin(), states_.end(), s);
    if (it == states_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - states_.begin());
  }

  MachineStep step(std::size_t u, const TruthAssignment& sigma, double env_reward) const {
    for (std::size_t i : by_state_.at(u)) {
      const auto& tr = transitions_[i];
      if (tr.guard.eval(sigma)) return {tr.to, tr.reward.resolve(env_reward), i};
    }
    return {u, 0.0, std::nullopt};
  }

  /// One message per pair of same-source transitions whose guards can hold together.
  std::vector<std::string> overlap_warnings(const std::vector<std::string>& atom_names) const {
    std::vector<std::string> out;
    for (std::size_t s = 0; s < states_.size(); ++s) {
      const auto& outgoing = by_state_[s];
      for (std::size_t i = 0; i < outgoing.size(); ++i) {
        for (std::size_t j = i + 1; j < outgoing.size(); ++j) {
          const auto& a = transitions_[outgoing[i]];
          const auto& b = transitions_[outgoing[j]];
          auto used = a.guard.atoms();
          auto more = b.guard.atoms();
          used.insert(more.begin(), more.end());
          std::vector<std::size_t> idx(used.begin(), used.end());
          std::size_t universe = atom_names.size();
          bool overlap = false;
          for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << idx.size()) && !overlap; ++mask) {
            TruthAssignment sigma(universe);
            for (std::size_t k = 0; k < idx.size(); ++k)
              if ((mask >> k) & 1u) sigma.insert(idx[k]);
            overlap = a.guard.eval(sigma) && b.guard.eval(sigma);
          }
          if (overlap)
            out.push_back("machine '" + name_ + "', state '" + states_[s] + "': guards '" + a.guard.to_string() +
                          "' and '" + b.guard.to_string() + "' can hold together; the first declared wins");
        }
      }
    }
    return out;
  }

 private:
  std::string name_;
  std::vector<std::string> states_;
  std::size_t initial_;
  std::vector<bool> terminal_;
  std::vector<Transition> transitions_;
  std::vector<std::vector<std::size_t>> by_state_;
  double weight_;
};

inline RewardMachine load_machine(const MachineDefinition& def, const std::vector<std::string>& atom_names) {
  auto index_of = [&def](const std::string& s) -> std::size_t {
    auto it = std::find(def.states.begin(), def.states.end(), s);
    if (it == def.states.end()) throw UnknownState(s);
    return static_cast<std::size_t>(it - def.states.begin());
  };
  if (def.states.empty() || def.initial.empty()) throw NoInitialState(def.name);
  for (std::size_t i = 0; i < def.states.size(); ++i)
    for (std::size_t j = i + 1; j < def.states.size(); ++j)
      if (def.states[i] == def.states[j]) throw Error("machine '" + def.name + "': duplicate state '" + def.states[i] + "'");
  if (std::find(def.states.begin(), def.states.end(), def.initial) == def.states.end()) throw NoInitialState(def.name);
  if (!std::isfinite(def.weight)) throw Error("machine '" + def.name + "': weight must be finite");

  std::vector<bool> terminal(def.states.size(), false);
  for (const auto& t : def.terminal) terminal[index_of(t)] = true;

  std::vector<Transition> transitions;
  transitions.reserve(def.transitions.size());
  for (const auto& e : def.transitions) {
    std::size_t from = index_of(e.from);
    std::size_t to = index_of(e.to);
    transitions.push_back({from, parse_guard(e.guard, atom_names), to, e.reward});
  }
  return RewardMachine(def.name, def.states, index_of(def.initial), std::move(terminal), std::move(transitions),
                       def.weight);
}

/// Current state of every machine in a parallel composition.
struct ComposedState {
  std::vector<std::size_t> states;
  bool terminal = false;

  friend bool operator==(const ComposedState&, const ComposedState&) = default;
};

struct ComposedStep {
  ComposedState next;
  std::vector<double> rewards;
  double total = 0.0;
};

inline ComposedState initial_state(std::span<const RewardMachine> machines) {
  ComposedState cs;
  for (const auto& m : machines) {
    cs.states.push_back(m.initial());
    cs.terminal = cs.terminal || m.is_terminal(m.initial());
  }
  return cs;
}

/// Steps every machine on the same assignment; total = sum of weight * reward.
inline ComposedStep step_composed(std::span<const RewardMachine> machines, const ComposedState& cs,
                                  const TruthAssignment& sigma, double env_reward) {
  if (cs.states.size() != machines.size()) throw DimensionMismatch(machines.size(), cs.states.size());
  ComposedStep out;
  out.next.states.resize(machines.size());
  out.rewards.resize(machines.size());
  for (std::size_t i = 0; i < machines.size(); ++i) {
    auto step = machines[i].step(cs.states[i], sigma, env_reward);
    out.next.states[i] = step.next;
    out.rewards[i] = step.reward;
    out.total += machines[i].weight() * step.reward;
    out.next.terminal = out.next.terminal || machines[i].is_terminal(step.next);
  }
  return out;
}

}  // namespace rmstl::rm
