#pragma once

#include <string>
#include <vector>

#include "rmstl/runtime/policies.hpp"

namespace rmstl::runtime {

/// Full record of one episode. `steps[0]` is the reset; the episode length is
/// the number of actions taken (steps.size() - 1).
struct EpisodeTrace {
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;
  stl::Signal signal;

  std::int64_t length() const { return static_cast<std::int64_t>(steps.size()) - 1; }
  TerminalCause cause() const { return steps.empty() ? TerminalCause::None : steps.back().cause; }
  double total_reward() const {
    double sum = 0;
    for (std::size_t i = 1; i < steps.size(); ++i) sum += steps[i].reward;
    return sum;
  }
};

inline EpisodeTrace run_episode(const TaskSpec& spec, Policy& policy, std::uint64_t seed) {
  Session session(spec);
  EpisodeTrace trace;
  trace.seed = seed;
  trace.steps.push_back(session.reset(seed));
  policy.begin_episode(seed);
  while (!session.done()) {
    std::size_t a = policy.act(session);
    if (a >= session.environment().action_count())
      throw Error("policy chose action " + std::to_string(a) + " but the environment has " +
                  std::to_string(session.environment().action_count()));
    trace.steps.push_back(session.step(a));
  }
  trace.signal = session.signal();
  return trace;
}

struct EvalResult {
  std::string name;
  double robustness = 0.0;
  bool satisfied = false;
  /// Robustness exactly 0: reported unsatisfied.
  bool boundary = false;
  /// The episode was shorter than the formula horizon; its last sample was held.
  bool truncated = false;
};

/// Robustness at step 0 of every evaluation formula over a finished episode.
inline std::vector<EvalResult> eval_signal(const TaskSpec& spec, const stl::Signal& signal) {
  std::vector<EvalResult> out;
  for (auto i : spec.eval_formulas) {
    const auto& f = spec.formulas[i];
    auto r = monitor::rob_truncated(f.formula, signal, 0);
    out.push_back({f.name, r.value, r.value > 0, r.value == 0, r.truncated});
  }
  return out;
}

inline std::vector<EvalResult> eval_episode(const TaskSpec& spec, const EpisodeTrace& trace) {
  return eval_signal(spec, trace.signal);
}

}  // namespace rmstl::runtime
