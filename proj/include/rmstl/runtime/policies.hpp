#pragma once

#include <array>
#include <deque>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "rmstl/runtime/session.hpp"

namespace rmstl::runtime {

/// Chooses actions from the session's current (augmented) state.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void begin_episode(std::uint64_t /*seed*/) {}
  virtual std::size_t act(const Session& session) = 0;
};

class RandomPolicy final : public Policy {
 public:
  void begin_episode(std::uint64_t seed) override { rng_.seed(seed ^ 0x9e3779b97f4a7c15ULL); }
  std::size_t act(const Session& s) override {
    return std::uniform_int_distribution<std::size_t>(0, s.environment().action_count() - 1)(rng_);
  }

 private:
  std::mt19937_64 rng_;
};

class ConstantPolicy final : public Policy {
 public:
  explicit ConstantPolicy(std::size_t action) : action_(action) {}
  std::size_t act(const Session&) override { return action_; }

 private:
  std::size_t action_;
};

/// Replays a fixed action list, then repeats its last action.
class SequencePolicy final : public Policy {
 public:
  explicit SequencePolicy(std::vector<std::size_t> actions) : actions_(std::move(actions)) {
    if (actions_.empty()) throw Error("sequence policy needs at least one action");
  }
  void begin_episode(std::uint64_t) override { i_ = 0; }
  std::size_t act(const Session&) override { return actions_[std::min(i_++, actions_.size() - 1)]; }

 private:
  std::vector<std::size_t> actions_;
  std::size_t i_ = 0;
};

/// Shortest action sequence from the current gridworld state to opening the
/// door (breadth-first search over pose and key possession).
inline std::vector<std::size_t> plan_gridworld(const env::GridworldUnlock& g) {
  using G = env::GridworldUnlock;
  const int n = g.size();
  auto [kx, ky] = g.key_home();
  auto encode = [n](int x, int y, int d, bool k) { return ((y * n + x) * 4 + d) * 2 + (k ? 1 : 0); };
  const auto start_pose = g.agent();
  const int start = encode(start_pose.first, start_pose.second, g.heading(), g.has_key());
  std::vector<int> parent(static_cast<std::size_t>(n * n * 8), -1);
  std::vector<int> via(parent.size(), -1);
  std::vector<bool> seen(parent.size(), false);
  std::deque<int> queue{start};
  seen[static_cast<std::size_t>(start)] = true;

  auto blocked = [&](int x, int y, bool has_key) {
    auto c = g.cell(x, y);
    if (c == G::Cell::Key) return !has_key;  // the key cell empties once picked up
    if (c == G::Cell::Empty) return x == kx && y == ky && !has_key;
    return true;  // walls, and the closed door
  };

  while (!queue.empty()) {
    int code = queue.front();
    queue.pop_front();
    bool k = code & 1;
    int d = (code >> 1) & 3;
    int x = (code >> 3) % n, y = (code >> 3) / n;
    int fx = x + G::kHeading[static_cast<std::size_t>(d)].first;
    int fy = y + G::kHeading[static_cast<std::size_t>(d)].second;
    if (k && g.cell(fx, fy) == G::Cell::Door) {
      std::vector<std::size_t> plan{G::Toggle};
      for (int c = code; c != start; c = parent[static_cast<std::size_t>(c)])
        plan.push_back(static_cast<std::size_t>(via[static_cast<std::size_t>(c)]));
      return {plan.rbegin(), plan.rend()};
    }
    auto push = [&](int next, std::size_t action) {
      if (seen[static_cast<std::size_t>(next)]) return;
      seen[static_cast<std::size_t>(next)] = true;
      parent[static_cast<std::size_t>(next)] = code;
      via[static_cast<std::size_t>(next)] = static_cast<int>(action);
      queue.push_back(next);
    };
    push(encode(x, y, (d + 3) % 4, k), G::Left);
    push(encode(x, y, (d + 1) % 4, k), G::Right);
    if (!blocked(fx, fy, k)) push(encode(fx, fy, d, k), G::Forward);
    if (!k && fx == kx && fy == ky) push(encode(x, y, d, true), G::Pickup);
  }
  return {};
}

class GridShortestPolicy final : public Policy {
 public:
  std::size_t act(const Session& s) override {
    const auto* g = dynamic_cast<const env::GridworldUnlock*>(&s.environment());
    if (!g) throw Error("policy grid-shortest needs the gridworld environment");
    auto plan = plan_gridworld(*g);
    return plan.empty() ? env::GridworldUnlock::Done : plan.front();
  }
};

/// Bang-bang linear state feedback that balances the pole while steering the
/// cart to a position setpoint.
class CartPoleController {
 public:
  explicit CartPoleController(double x_ref = 0.0) : x_ref_(x_ref) {}
  void set_reference(double x_ref) { x_ref_ = x_ref; }
  double reference() const noexcept { return x_ref_; }

  std::size_t act(const env::CartPole::State& s) const {
    const auto [x, x_dot, theta, theta_dot] = s;
    double u = kX * (x - x_ref_) + kXDot * x_dot + kTheta * theta + kThetaDot * theta_dot;
    return u > 0 ? env::CartPole::PushRight : env::CartPole::PushLeft;
  }

  static constexpr double kX = 3.0;
  static constexpr double kXDot = 4.0;
  static constexpr double kTheta = 20.0;
  static constexpr double kThetaDot = 5.0;

 private:
  double x_ref_;
};

inline const env::CartPole& cartpole_of(const Session& s, const char* policy) {
  const auto* c = dynamic_cast<const env::CartPole*>(&s.environment());
  if (!c) throw Error(std::string("policy ") + policy + " needs the cartpole environment");
  return *c;
}

/// Parks the cart inside region A (left of the origin) and keeps it there.
class CartPoleHoldLeftPolicy final : public Policy {
 public:
  std::size_t act(const Session& s) override { return ctl_.act(cartpole_of(s, "cartpole-hold-left").state()); }

 private:
  CartPoleController ctl_{-0.6};
};

/// Visits region A, then moves to region B and stays there.
class CartPoleAbPolicy final : public Policy {
 public:
  void begin_episode(std::uint64_t) override { ctl_.set_reference(-0.6); }
  std::size_t act(const Session& s) override {
    const auto& c = cartpole_of(s, "cartpole-ab");
    const double x = c.state()[0];
    if (ctl_.reference() < 0 && x > -0.7 && x < -0.5) ctl_.set_reference(0.6);
    return ctl_.act(c.state());
  }

 private:
  CartPoleController ctl_{-0.6};
};

/// Highway driver: keeps a target lane and speed, changing lane or braking when
/// a slower car is close ahead.
class HighwayDriverPolicy final : public Policy {
 public:
  HighwayDriverPolicy(bool prefer_right, double target_speed) : prefer_right_(prefer_right), speed_(target_speed) {}

  std::size_t act(const Session& s) override {
    using H = env::HighwayLite;
    const auto* h = dynamic_cast<const H*>(&s.environment());
    if (!h) throw Error("highway policies need the highway environment");
    const int lane = h->target_lane();
    const int want = prefer_right_ ? h->lanes() - 1 : 0;
    auto gap_ahead = [h](int l) {
      double gap = 1e9;
      for (const auto& v : h->leads())
        if (v.lane == l && v.x - h->ego_x() > -2.0 * H::kCarLength) gap = std::min(gap, v.x - h->ego_x());
      return gap;
    };
    // A lane is free when no car in it comes within 8 m over the next three steps.
    auto lane_free = [h](int l) {
      for (const auto& v : h->leads()) {
        if (v.lane != l) continue;
        for (int k = 0; k <= 3; ++k)
          if (std::fabs(v.x - h->ego_x() + k * (v.v - h->speed())) < 8.0) return false;
      }
      return true;
    };
    if (h->lane() != lane) return H::Idle;  // finish the lane change first
    const double gap = gap_ahead(lane);
    const double danger = 2.0 * H::kCarLength + h->speed();
    if (gap < danger) {
      for (int d : {prefer_right_ ? 1 : -1, prefer_right_ ? -1 : 1}) {
        int l = lane + d;
        if (l >= 0 && l < h->lanes() && lane_free(l)) return d > 0 ? H::LaneRight : H::LaneLeft;
      }
      return h->speed() > H::kMinSpeed ? H::Slower : H::Idle;
    }
    if (lane != want) {
      int l = lane + (want > lane ? 1 : -1);
      if (lane_free(l)) return want > lane ? H::LaneRight : H::LaneLeft;
    }
    if (h->speed() < speed_) return H::Faster;
    if (h->speed() > speed_) return H::Slower;
    return H::Idle;
  }

 private:
  bool prefer_right_;
  double speed_;
};

inline const std::vector<std::string>& scripted_policy_names() {
  static const std::vector<std::string> names{"grid-shortest", "cartpole-hold-left", "cartpole-ab",
                                              "highway-right-fast", "highway-left-slow"};
  return names;
}

/// Builds "random", "const:<action>" or "scripted:<name>" policies.
inline std::unique_ptr<Policy> make_builtin_policy(std::string_view spec) {
  if (spec == "random") return std::make_unique<RandomPolicy>();
  if (spec.starts_with("const:")) {
    std::string a(spec.substr(6));
    try {
      return std::make_unique<ConstantPolicy>(static_cast<std::size_t>(std::stoul(a)));
    } catch (const std::exception&) {
      throw Error("bad constant policy action '" + a + "'");
    }
  }
  if (spec.starts_with("scripted:")) {
    auto name = spec.substr(9);
    if (name == "grid-shortest") return std::make_unique<GridShortestPolicy>();
    if (name == "cartpole-hold-left") return std::make_unique<CartPoleHoldLeftPolicy>();
    if (name == "cartpole-ab") return std::make_unique<CartPoleAbPolicy>();
    if (name == "highway-right-fast") return std::make_unique<HighwayDriverPolicy>(true, 30.0);
    if (name == "highway-left-slow") return std::make_unique<HighwayDriverPolicy>(false, 20.0);
    throw Error("unknown scripted policy '" + std::string(name) + "'");
  }
  return nullptr;
}

}  // namespace rmstl::runtime
