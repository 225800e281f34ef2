#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "rmstl/env/environment.hpp"

namespace rmstl::env {

/// Classic cart-pole with explicit Euler integration. Terminates when
/// |theta| > 12 degrees or |x| > 2.4; truncates on the step that takes the
/// episode past `max_steps`. Env reward is 1 per step.
class CartPole final : public Environment {
 public:
  enum Action : std::size_t { PushLeft = 0, PushRight = 1 };
  using State = std::array<double, 4>;

  static constexpr double kThetaLimit = 12.0 * 2.0 * std::numbers::pi / 360.0;
  static constexpr double kXLimit = 2.4;

  explicit CartPole(const EnvParams& params = {}) {
    detail::ParamReader p("cartpole", params);
    gravity_ = p.get("gravity", 9.8);
    masscart_ = p.get("masscart", 1.0);
    masspole_ = p.get("masspole", 0.1);
    length_ = p.get("length", 0.5);
    force_mag_ = p.get("force_mag", 10.0);
    tau_ = p.get("tau", 0.02);
    max_steps_ = static_cast<int>(p.get("max_steps", 500));
    init_range_ = p.get("init_range", 0.05);
    p.finish();

    space_ = {{"x", -kXLimit, kXLimit, false},
              {"x_dot", -10, 10, false},
              {"theta", -kThetaLimit, kThetaLimit, false},
              {"theta_dot", -10, 10, false}};
    actions_ = {"push_left", "push_right"};
  }

  std::string_view id() const override { return "cartpole"; }
  const std::vector<ObservationComponent>& observation_space() const override { return space_; }
  const std::vector<std::string>& action_names() const override { return actions_; }

  std::vector<double> reset(std::uint64_t seed) override {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> init(-init_range_, init_range_);
    for (auto& v : state_) v = init(rng);
    steps_ = 0;
    finished_ = false;
    return observation();
  }

  /// Starts an episode from an explicit state.
  std::vector<double> reset_to(const State& s) {
    state_ = s;
    steps_ = 0;
    finished_ = false;
    return observation();
  }

  StepResult step(std::size_t action) override {
    if (finished_) throw StepAfterTerminal();
    if (action > 1) throw Error("cartpole action out of range: " + std::to_string(action));
    auto [x, x_dot, theta, theta_dot] = state_;
    const double force = action == PushRight ? force_mag_ : -force_mag_;
    const double total_mass = masspole_ + masscart_;
    const double polemass_length = masspole_ * length_;
    const double cos_t = std::cos(theta), sin_t = std::sin(theta);
    const double temp = (force + polemass_length * theta_dot * theta_dot * sin_t) / total_mass;
    const double theta_acc =
        (gravity_ * sin_t - cos_t * temp) / (length_ * (4.0 / 3.0 - masspole_ * cos_t * cos_t / total_mass));
    const double x_acc = temp - polemass_length * theta_acc * cos_t / total_mass;

    x += tau_ * x_dot;
    x_dot += tau_ * x_acc;
    theta += tau_ * theta_dot;
    theta_dot += tau_ * theta_acc;
    state_ = {x, x_dot, theta, theta_dot};
    ++steps_;

    StepResult r;
    r.reward = 1.0;
    r.terminated = std::fabs(x) > kXLimit || std::fabs(theta) > kThetaLimit;
    r.truncated = !r.terminated && steps_ > max_steps_;
    finished_ = r.terminated || r.truncated;
    r.observation = observation();
    return r;
  }

  std::vector<double> observation() const override { return {state_.begin(), state_.end()}; }
  bool finished() const override { return finished_; }

  const State& state() const noexcept { return state_; }
  int steps() const noexcept { return steps_; }
  int max_steps() const noexcept { return max_steps_; }

 private:
  double gravity_, masscart_, masspole_, length_, force_mag_, tau_, init_range_;
  int max_steps_;
  std::vector<ObservationComponent> space_;
  std::vector<std::string> actions_;
  State state_{};
  int steps_ = 0;
  bool finished_ = false;
};

}  // namespace rmstl::env
