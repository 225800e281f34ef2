#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "rmstl/env/environment.hpp"

namespace rmstl::env {

/// Kinematic multi-lane highway. Positions are normalized (x in units of
/// 100 m, lane k sits at y = 0.2 * (k + 1), higher y is further right);
/// speeds are in m/s. Leads keep lane and speed; the ego changes lane over two
/// steps and changes speed in increments of 5 within [20, 40].
///
/// The observation reports the four leads closest to the ego among those no
/// more than 10 m behind it, relative to the ego; missing slots read
/// (10, 10, 0, 0).
class HighwayLite final : public Environment {
 public:
  enum Action : std::size_t { LaneLeft = 0, Idle = 1, LaneRight = 2, Faster = 3, Slower = 4 };

  static constexpr int kSlots = 4;
  static constexpr double kLaneGap = 0.2;
  static constexpr double kMinSpeed = 20.0;
  static constexpr double kMaxSpeed = 40.0;
  static constexpr double kSpeedStep = 5.0;
  static constexpr double kCarLength = 5.0;

  struct Vehicle {
    double x;  // metres
    int lane;
    double v;
  };

  explicit HighwayLite(const EnvParams& params = {}) {
    detail::ParamReader p("highway", params);
    lanes_ = static_cast<int>(p.get("lanes", 4));
    vehicle_count_ = static_cast<int>(p.get("vehicles", 8));
    max_steps_ = static_cast<int>(p.get("max_steps", 120));
    initial_speed_ = p.get("initial_speed", 25.0);
    start_lane_ = static_cast<int>(p.get("start_lane", -1));
    p.finish();
    if (lanes_ < 2 || lanes_ > 4) throw Error("highway lanes must be in [2, 4]");
    if (vehicle_count_ < 0) throw Error("highway vehicles must be non-negative");

    space_ = {{"x_ego", 0, 200, false}, {"y_ego", 0, 1, false}, {"vx_ego", 0, 40, false}, {"vy_ego", -0.1, 0.1, false}};
    for (int i = 1; i <= kSlots; ++i) {
      auto s = std::to_string(i);
      space_.push_back({"x" + s, -10, 10, false});
      space_.push_back({"y" + s, -10, 10, false});
      space_.push_back({"vx" + s, -40, 40, false});
      space_.push_back({"vy" + s, -0.1, 0.1, false});
    }
    actions_ = {"lane_left", "idle", "lane_right", "faster", "slower"};
  }

  std::string_view id() const override { return "highway"; }
  const std::vector<ObservationComponent>& observation_space() const override { return space_; }
  const std::vector<std::string>& action_names() const override { return actions_; }

  std::vector<double> reset(std::uint64_t seed) override {
    rng_.seed(seed);
    ego_x_ = 0.0;
    lane_ = start_lane_ >= 0 ? std::min(start_lane_, lanes_ - 1)
                             : std::uniform_int_distribution<int>(0, lanes_ - 1)(rng_);
    target_lane_ = lane_;
    y_ = lane_y(lane_);
    vy_ = 0.0;
    v_ = std::clamp(initial_speed_, kMinSpeed, kMaxSpeed);
    leads_.clear();
    double x = 25.0;
    for (int i = 0; i < vehicle_count_; ++i) {
      x += std::uniform_real_distribution<double>(10.0, 30.0)(rng_);
      leads_.push_back({x, std::uniform_int_distribution<int>(0, lanes_ - 1)(rng_), random_speed()});
    }
    steps_ = 0;
    finished_ = false;
    return observation();
  }

  StepResult step(std::size_t action) override {
    if (finished_) throw StepAfterTerminal();
    if (action >= actions_.size()) throw Error("highway action out of range: " + std::to_string(action));
    switch (action) {
      case LaneLeft: target_lane_ = std::max(0, target_lane_ - 1); break;
      case LaneRight: target_lane_ = std::min(lanes_ - 1, target_lane_ + 1); break;
      case Faster: v_ = std::min(kMaxSpeed, v_ + kSpeedStep); break;
      case Slower: v_ = std::max(kMinSpeed, v_ - kSpeedStep); break;
      default: break;
    }
    const double target_y = lane_y(target_lane_);
    const double dy = std::clamp(target_y - y_, -kLaneGap / 2, kLaneGap / 2);
    vy_ = dy;
    y_ = std::fabs(target_y - y_ - dy) < 1e-12 ? target_y : y_ + dy;
    lane_ = nearest_lane(y_);

    ego_x_ += v_;
    for (auto& l : leads_) {
      l.x += l.v;
      if (l.x - ego_x_ < -50.0) {
        l.x = ego_x_ + std::uniform_real_distribution<double>(100.0, 200.0)(rng_);
        l.lane = std::uniform_int_distribution<int>(0, lanes_ - 1)(rng_);
        l.v = random_speed();
      }
    }
    ++steps_;

    StepResult r;
    r.reward = (v_ - kMinSpeed) / (kMaxSpeed - kMinSpeed);
    if (collided()) {
      r.terminated = true;
      r.reward -= 1.0;
    }
    r.truncated = !r.terminated && steps_ >= max_steps_;
    finished_ = r.terminated || r.truncated;
    r.observation = observation();
    return r;
  }

  std::vector<double> observation() const override {
    std::vector<double> obs{ego_x_ / 100.0, y_, v_, vy_};
    std::vector<const Vehicle*> near;
    for (const auto& l : leads_)
      if (l.x - ego_x_ > -10.0) near.push_back(&l);
    std::sort(near.begin(), near.end(), [this](const Vehicle* a, const Vehicle* b) {
      return std::fabs(a->x - ego_x_) < std::fabs(b->x - ego_x_);
    });
    for (int i = 0; i < kSlots; ++i) {
      if (i < static_cast<int>(near.size())) {
        const auto& l = *near[static_cast<std::size_t>(i)];
        obs.insert(obs.end(), {(l.x - ego_x_) / 100.0, lane_y(l.lane) - y_, l.v - v_, -vy_});
      } else {
        obs.insert(obs.end(), {10.0, 10.0, 0.0, 0.0});
      }
    }
    return obs;
  }

  bool finished() const override { return finished_; }

  double lane_y(int lane) const { return kLaneGap * (lane + 1); }
  int lanes() const noexcept { return lanes_; }
  int lane() const noexcept { return lane_; }
  int target_lane() const noexcept { return target_lane_; }
  double speed() const noexcept { return v_; }
  double ego_x() const noexcept { return ego_x_; }
  const std::vector<Vehicle>& leads() const noexcept { return leads_; }

  /// Test hook: replaces the lead vehicles.
  void set_leads(std::vector<Vehicle> leads) { leads_ = std::move(leads); }

 private:
  double random_speed() { return std::uniform_real_distribution<double>(18.0, 28.0)(rng_); }

  int nearest_lane(double y) const {
    return std::clamp(static_cast<int>(std::lround(y / kLaneGap)) - 1, 0, lanes_ - 1);
  }

  bool collided() const {
    for (const auto& l : leads_)
      if (std::fabs(l.x - ego_x_) < kCarLength && std::fabs(lane_y(l.lane) - y_) < kLaneGap / 2) return true;
    return false;
  }

  int lanes_, vehicle_count_, max_steps_, start_lane_;
  double initial_speed_;
  std::vector<ObservationComponent> space_;
  std::vector<std::string> actions_;
  std::mt19937_64 rng_;
  double ego_x_ = 0, y_ = 0.2, vy_ = 0, v_ = 25;
  int lane_ = 0, target_lane_ = 0;
  std::vector<Vehicle> leads_;
  int steps_ = 0;
  bool finished_ = false;
};

}  // namespace rmstl::env
