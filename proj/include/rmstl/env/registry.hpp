#pragma once

#include <memory>
#include <string_view>

#include "rmstl/env/cartpole.hpp"
#include "rmstl/env/gridworld.hpp"
#include "rmstl/env/highway.hpp"

namespace rmstl::env {

inline constexpr std::string_view kEnvironmentIds[] = {"gridworld", "cartpole", "highway"};

inline std::unique_ptr<Environment> make_environment(std::string_view id, const EnvParams& params = {}) {
  if (id == "gridworld") return std::make_unique<GridworldUnlock>(params);
  if (id == "cartpole") return std::make_unique<CartPole>(params);
  if (id == "highway") return std::make_unique<HighwayLite>(params);
  throw Error("unknown environment '" + std::string(id) + "' (known: gridworld, cartpole, highway)");
}

}  // namespace rmstl::env
