#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "rmstl/config/document.hpp"
#include "rmstl/learner/qtable.hpp"
#include "rmstl/runtime/episode.hpp"

namespace rmstl::learner {

struct LearnerConfig {
  double alpha = 0.1;
  double gamma = 0.99;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  /// Fraction of the episode budget over which epsilon decays linearly.
  double decay_fraction = 0.5;
  std::int64_t episodes = 2000;
  std::uint64_t seed = 0;
  /// Observation features in the table key; empty means all environment components.
  std::vector<std::string> observe;
  bool machine_states = true;
  std::map<std::string, BinSpec, std::less<>> bins;
  std::int64_t eval_episodes = 100;
  std::uint64_t eval_seed = 1000000;
  /// Set when no config file was given.
  bool defaults = false;

  double epsilon(std::int64_t episode) const {
    const double span = decay_fraction * static_cast<double>(episodes);
    const double f = span <= 0 ? 1.0 : std::min(1.0, static_cast<double>(episode) / span);
    return epsilon_start + (epsilon_end - epsilon_start) * f;
  }

  void validate() const {
    if (!(alpha > 0 && alpha <= 1)) throw Error("learner alpha must be in (0, 1]");
    if (!(gamma > 0 && gamma <= 1)) throw Error("learner gamma must be in (0, 1]");
    for (double e : {epsilon_start, epsilon_end})
      if (!(e >= 0 && e <= 1)) throw Error("learner epsilon must be in [0, 1]");
    if (!(decay_fraction >= 0 && decay_fraction <= 1)) throw Error("learner decay_fraction must be in [0, 1]");
    if (episodes < 1) throw Error("learner episodes must be positive");
    if (eval_episodes < 1) throw Error("learner eval_episodes must be positive");
  }
};

/// Built-in cuts for continuous components, used when the config has no entry.
inline std::map<std::string, BinSpec, std::less<>> default_bins(std::string_view env_id) {
  if (env_id == "cartpole")
    return {{"x", {13, -2.4, 2.4}}, {"x_dot", {9, -3, 3}}, {"theta", {13, -0.2095, 0.2095}}, {"theta_dot", {9, -3, 3}}};
  return {};
}

/// Reads `[learner]` and `[bins]` sections.
inline LearnerConfig load_learner_config(const config::Document& doc) {
  LearnerConfig cfg;
  for (const auto& t : doc.tables) {
    if (t.name.empty()) {
      if (!t.entries.empty()) doc.fail(t.entries.front().second.line, "key outside of any section");
      continue;
    }
    if (t.name != "learner" && t.name != "bins") doc.fail(t.line, "unknown section [" + t.name + "]");
  }
  if (const auto* t = doc.find("learner")) {
    for (const auto& [k, v] : t->entries) {
      if (k == "alpha") cfg.alpha = doc.number(v, k);
      else if (k == "gamma") cfg.gamma = doc.number(v, k);
      else if (k == "epsilon_start") cfg.epsilon_start = doc.number(v, k);
      else if (k == "epsilon_end") cfg.epsilon_end = doc.number(v, k);
      else if (k == "decay_fraction") cfg.decay_fraction = doc.number(v, k);
      else if (k == "episodes") cfg.episodes = doc.integer(v, k);
      else if (k == "seed") cfg.seed = static_cast<std::uint64_t>(doc.integer(v, k));
      else if (k == "machine_states") cfg.machine_states = doc.boolean(v, k);
      else if (k == "eval_episodes") cfg.eval_episodes = doc.integer(v, k);
      else if (k == "eval_seed") cfg.eval_seed = static_cast<std::uint64_t>(doc.integer(v, k));
      else if (k == "observe") {
        for (const auto& item : doc.array(v, k)) cfg.observe.push_back(doc.string(item, k));
      } else {
        doc.fail(v.line, "unknown key '" + k + "' in [learner]");
      }
    }
  }
  if (const auto* t = doc.find("bins")) {
    for (const auto& [name, v] : t->entries) {
      BinSpec b;
      bool has_count = false, has_lo = false, has_hi = false;
      for (const auto& [k, x] : doc.table(v, "bins." + name)) {
        if (k == "count") {
          auto c = doc.integer(x, "count");
          if (c < 1) doc.fail(x.line, "bin count must be positive");
          b.count = static_cast<std::size_t>(c);
          has_count = true;
        } else if (k == "lo") {
          b.lo = doc.number(x, "lo");
          has_lo = true;
        } else if (k == "hi") {
          b.hi = doc.number(x, "hi");
          has_hi = true;
        } else {
          doc.fail(x.line, "unknown key '" + k + "' in bins." + name);
        }
      }
      if (!has_count || !has_lo || !has_hi) doc.fail(v.line, "bins." + name + " needs count, lo and hi");
      if (!(b.hi > b.lo)) doc.fail(v.line, "bins." + name + " needs hi > lo");
      cfg.bins[name] = b;
    }
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw SpecValidationError(doc.source + ": " + e.what());
  }
  return cfg;
}

inline LearnerConfig load_learner_config_file(const std::string& path) {
  std::string text;
  try {
    text = config::read_file(path);
  } catch (const Error& e) {
    throw SpecValidationError(e.what());
  }
  return load_learner_config(config::parse_document(text, path));
}

/// Bins used for training: config entries over the environment defaults.
inline std::map<std::string, BinSpec, std::less<>> effective_bins(const runtime::TaskSpec& spec,
                                                                  const LearnerConfig& cfg) {
  auto bins = default_bins(spec.env_id);
  for (const auto& [k, v] : cfg.bins) bins[k] = v;
  return bins;
}

/// Human-readable concerns about a configuration (training still runs).
inline std::vector<std::string> config_warnings(const runtime::TaskSpec& spec, const LearnerConfig& cfg) {
  std::vector<std::string> out;
  if (spec.env_id == "cartpole") {
    auto bins = effective_bins(spec, cfg);
    bool observes_x = cfg.observe.empty() || std::find(cfg.observe.begin(), cfg.observe.end(), "x") != cfg.observe.end();
    if (auto it = bins.find("x"); observes_x && it != bins.end()) {
      double width = (it->second.hi - it->second.lo) / static_cast<double>(it->second.count);
      if (width >= 0.2)
        out.push_back("x bin width " + rmstl::detail::shortest(width) +
                      " is not below 0.2: regions A (-0.7, -0.5) and B (0.5, 0.7) are unresolvable");
    }
  }
  return out;
}

struct EpisodeStats {
  std::int64_t episode = 0;
  std::uint64_t seed = 0;
  double total_reward = 0.0;
  double env_return = 0.0;
  std::int64_t length = 0;
  runtime::TerminalCause cause = runtime::TerminalCause::None;
};

struct TrainResult {
  QModel model;
  std::vector<EpisodeStats> curve;
};

/// Environment seed of training episode `i`.
inline std::uint64_t episode_seed(std::uint64_t seed, std::int64_t i) {
  std::uint64_t z = seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(i) + 1;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Discretizer make_discretizer(const runtime::TaskSpec& spec, const LearnerConfig& cfg) {
  runtime::Session probe(spec);
  probe.reset(0);
  return Discretizer(probe, cfg.observe, effective_bins(spec, cfg), cfg.machine_states);
}

/// Epsilon-greedy tabular Q-learning over the aggregated state. Episodes that
/// end by termination (environment or machine) do not bootstrap; truncated ones do.
inline TrainResult train(const runtime::TaskSpec& spec, const LearnerConfig& cfg,
                         const std::function<void(const EpisodeStats&)>& on_episode = {}) {
  cfg.validate();
  runtime::Session session(spec);
  TrainResult out;
  out.model.env_id = spec.env_id;
  session.reset(0);
  out.model.actions = session.environment().action_names();
  out.model.discretizer = Discretizer(session, cfg.observe, effective_bins(spec, cfg), cfg.machine_states);
  out.model.table = QTable(out.model.actions.size());
  auto& q = out.model.table;
  const auto& disc = out.model.discretizer;
  const std::size_t n_actions = out.model.actions.size();

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> any_action(0, n_actions - 1);
  out.curve.reserve(static_cast<std::size_t>(cfg.episodes));

  for (std::int64_t ep = 0; ep < cfg.episodes; ++ep) {
    EpisodeStats stats;
    stats.episode = ep;
    stats.seed = episode_seed(cfg.seed, ep);
    session.reset(stats.seed);
    const double eps = cfg.epsilon(ep);
    std::uint64_t s = disc.key(session);
    while (!session.done()) {
      std::size_t a;
      if (unit(rng) < eps) {
        a = any_action(rng);
      } else {
        // Random tie-break among maximizers keeps early greedy steps exploratory.
        const auto& v = q.values(s);
        double best = *std::max_element(v.begin(), v.end());
        std::size_t ties = 0;
        for (double x : v) ties += x == best;
        std::size_t pick = std::uniform_int_distribution<std::size_t>(0, ties - 1)(rng);
        a = 0;
        for (std::size_t i = 0; i < v.size(); ++i)
          if (v[i] == best && pick-- == 0) {
            a = i;
            break;
          }
      }
      const auto& rec = session.step(a);
      const std::uint64_t next = disc.key(session);
      const bool terminal =
          rec.cause == runtime::TerminalCause::EnvTerminal || rec.cause == runtime::TerminalCause::RmTerminal;
      q.update(s, a, rec.reward, next, terminal, cfg.alpha, cfg.gamma);
      stats.total_reward += rec.reward;
      stats.env_return += rec.env_reward;
      stats.length = rec.t;
      stats.cause = rec.cause;
      s = next;
    }
    if (on_episode) on_episode(stats);
    out.curve.push_back(stats);
  }
  return out;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

inline MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd m;
  if (xs.empty()) return m;
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(xs.size());
  for (double x : xs) m.std += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(m.std / static_cast<double>(xs.size()));
  return m;
}

struct EvalSummary {
  std::int64_t episodes = 0;
  /// Sum of reward-machine rewards (the training signal).
  MeanStd reward;
  /// Sum of environment rewards (the task's own score).
  MeanStd env_return;
  MeanStd length;
  /// Fraction of episodes ending in environment termination.
  double env_terminal_rate = 0.0;
};

/// Runs the greedy policy on seeds eval_seed, eval_seed + 1, ...
inline EvalSummary evaluate_greedy(const runtime::TaskSpec& spec, const QModel& model, std::int64_t episodes,
                                   std::uint64_t first_seed,
                                   const std::function<void(const runtime::EpisodeTrace&)>& on_trace = {}) {
  QTablePolicy policy(model);
  std::vector<double> rewards, returns, lengths;
  EvalSummary out;
  out.episodes = episodes;
  for (std::int64_t i = 0; i < episodes; ++i) {
    auto trace = runtime::run_episode(spec, policy, first_seed + static_cast<std::uint64_t>(i));
    rewards.push_back(trace.total_reward());
    double env_total = 0;
    for (std::size_t k = 1; k < trace.steps.size(); ++k) env_total += trace.steps[k].env_reward;
    returns.push_back(env_total);
    lengths.push_back(static_cast<double>(trace.length()));
    if (trace.cause() == runtime::TerminalCause::EnvTerminal) out.env_terminal_rate += 1;
    if (on_trace) on_trace(trace);
  }
  out.reward = mean_std(rewards);
  out.env_return = mean_std(returns);
  out.length = mean_std(lengths);
  out.env_terminal_rate /= static_cast<double>(episodes);
  return out;
}

}  // namespace rmstl::learner
