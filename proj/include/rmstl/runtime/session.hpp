#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rmstl/runtime/task_spec.hpp"

namespace rmstl::runtime {

enum class TerminalCause { None, EnvTerminal, RmTerminal, Truncated };

inline const char* to_string(TerminalCause c) {
  switch (c) {
    case TerminalCause::EnvTerminal: return "env-terminal";
    case TerminalCause::RmTerminal: return "rm-terminal";
    case TerminalCause::Truncated: return "truncated";
    default: return "none";
  }
}

inline TerminalCause terminal_cause_from_string(std::string_view s) {
  if (s == "env-terminal") return TerminalCause::EnvTerminal;
  if (s == "rm-terminal") return TerminalCause::RmTerminal;
  if (s == "truncated") return TerminalCause::Truncated;
  return TerminalCause::None;
}

/// Result of one session step, or of the reset (step 0, no action, no machine step).
struct StepRecord {
  std::int64_t t = 0;
  std::optional<std::size_t> action;
  std::vector<double> observation;
  monitor::TruthAssignment sigma;
  std::vector<monitor::RobustnessInterval> robustness;
  std::vector<std::size_t> machine_states;
  std::vector<double> machine_rewards;
  double reward = 0.0;
  double env_reward = 0.0;
  TerminalCause cause = TerminalCause::None;
};

/// One episode of the two-layer stack: environment, then the STL layer
/// (signal + truth assignment), then the reward-machine layer.
///
/// Without machines the reward is the environment reward. The episode ends on
/// environment termination, on entry into a terminal machine state, or on
/// truncation (environment truncation or the task spec horizon), in that priority.
class Session {
 public:
  explicit Session(const TaskSpec& spec) : spec_(spec), env_(spec.make_environment()) {
    for (const auto& c : env_->observation_space()) names_.push_back(c.name);
    for (const auto& m : spec_.machines)
      for (const auto& s : m.states()) names_.push_back(m.name() + "." + s);
    for (auto a : spec_.augment_atoms) names_.push_back("rho." + spec_.atom_names[a]);
  }

  const StepRecord& reset(std::uint64_t seed) {
    signal_ = stl::Signal(spec_.variables);
    cached_.assign(spec_.atoms.size(), std::nullopt);
    state_ = rm::initial_state(spec_.machines);
    done_ = false;
    last_ = StepRecord{};
    last_.observation = env_->reset(seed);
    record_signal(last_);
    last_.machine_states = state_.states;
    last_.machine_rewards.assign(spec_.machines.size(), 0.0);
    augment();
    return last_;
  }

  const StepRecord& step(std::size_t action) {
    if (done_) throw StepAfterTerminal();
    auto r = env_->step(action);
    StepRecord rec;
    rec.t = last_.t + 1;
    rec.action = action;
    rec.observation = std::move(r.observation);
    rec.env_reward = r.reward;
    record_signal(rec);

    if (spec_.machines.empty()) {
      rec.reward = r.reward;
    } else {
      auto next = rm::step_composed(spec_.machines, state_, rec.sigma, r.reward);
      state_ = std::move(next.next);
      rec.machine_rewards = std::move(next.rewards);
      rec.reward = next.total;
    }
    rec.machine_states = state_.states;

    if (r.terminated) rec.cause = TerminalCause::EnvTerminal;
    else if (state_.terminal) rec.cause = TerminalCause::RmTerminal;
    else if (r.truncated || rec.t >= spec_.horizon) rec.cause = TerminalCause::Truncated;
    done_ = rec.cause != TerminalCause::None;
    last_ = std::move(rec);
    augment();
    return last_;
  }

  bool done() const noexcept { return done_; }
  const StepRecord& last() const noexcept { return last_; }
  /// Environment observation, one-hot machine states, clipped robustness lower bounds.
  const std::vector<double>& augmented_observation() const noexcept { return augmented_; }
  const std::vector<std::string>& augmented_names() const noexcept { return names_; }
  const TaskSpec& spec() const noexcept { return spec_; }
  const env::Environment& environment() const noexcept { return *env_; }
  const stl::Signal& signal() const noexcept { return signal_; }
  const rm::ComposedState& machine_state() const noexcept { return state_; }

 private:
  void record_signal(StepRecord& rec) {
    std::vector<double> sample(spec_.variable_source.size());
    for (std::size_t i = 0; i < sample.size(); ++i) sample[i] = rec.observation[spec_.variable_source[i]];
    signal_.append(sample);

    const auto t = static_cast<std::int64_t>(signal_.length()) - 1;
    rec.sigma = monitor::TruthAssignment(spec_.atoms.size());
    rec.robustness.resize(spec_.atoms.size());
    std::optional<monitor::Evaluator> ev;
    for (std::size_t i = 0; i < spec_.atoms.size(); ++i) {
      const auto& atom = spec_.atoms[i];
      monitor::RobustnessInterval r;
      if (cached_[i]) {
        r = *cached_[i];
      } else {
        if (!ev) ev.emplace(signal_);
        r = ev->at(atom.formula, atom.evaluation_time(t));
        // A point interval at a fixed evaluation time cannot change any more.
        if (atom.mode == monitor::EvalMode::AtOrigin && r.is_point()) cached_[i] = r;
      }
      rec.robustness[i] = r;
      if (atom.holds(r)) rec.sigma.insert(i);
    }
  }

  void augment() {
    augmented_ = last_.observation;
    for (std::size_t m = 0; m < spec_.machines.size(); ++m)
      for (std::size_t s = 0; s < spec_.machines[m].state_count(); ++s)
        augmented_.push_back(state_.states[m] == s ? 1.0 : 0.0);
    const double c = spec_.augment_clip;
    for (auto a : spec_.augment_atoms) augmented_.push_back(std::clamp(last_.robustness[a].lo, -c, c));
  }

  const TaskSpec& spec_;
  std::unique_ptr<env::Environment> env_;
  std::vector<std::string> names_;
  stl::Signal signal_;
  std::vector<std::optional<monitor::RobustnessInterval>> cached_;
  rm::ComposedState state_;
  StepRecord last_;
  std::vector<double> augmented_;
  bool done_ = true;
};

}  // namespace rmstl::runtime
