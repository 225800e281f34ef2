#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rmstl/error.hpp"

namespace rmstl::env {

/// Named observation component. The components double as the signal
/// variables available to formulas (the labeling map is the identity on names).
struct ObservationComponent {
  std::string name;
  double lo;
  double hi;
  /// Integer-valued, usable as an exact table key without binning.
  bool discrete = false;
};

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
};

using EnvParams = std::map<std::string, double, std::less<>>;

/// Uniform episodic environment contract.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string_view id() const = 0;
  virtual const std::vector<ObservationComponent>& observation_space() const = 0;
  virtual const std::vector<std::string>& action_names() const = 0;
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  /// Throws StepAfterTerminal once the episode has ended.
  virtual StepResult step(std::size_t action) = 0;
  virtual std::vector<double> observation() const = 0;
  virtual bool finished() const = 0;

  std::size_t action_count() const { return action_names().size(); }

  std::size_t observation_index(std::string_view name) const {
    const auto& space = observation_space();
    for (std::size_t i = 0; i < space.size(); ++i)
      if (space[i].name == name) return i;
    throw UnknownVariable(std::string(name));
  }

  bool has_observation(std::string_view name) const {
    for (const auto& c : observation_space())
      if (c.name == name) return true;
    return false;
  }
};

namespace detail {

/// Reads a parameter, rejecting names the environment does not know.
class ParamReader {
 public:
  ParamReader(std::string_view env, const EnvParams& params) : env_(env), params_(params) {}

  double get(std::string_view key, double fallback) {
    used_.emplace_back(key);
    auto it = params_.find(key);
    return it == params_.end() ? fallback : it->second;
  }

  void finish() const {
    for (const auto& [k, v] : params_) {
      bool known = false;
      for (const auto& u : used_) known = known || u == k;
      if (!known) throw Error("environment '" + std::string(env_) + "' has no parameter '" + k + "'");
    }
  }

 private:
  std::string_view env_;
  const EnvParams& params_;
  std::vector<std::string> used_;
};

}  // namespace detail

}  // namespace rmstl::env
