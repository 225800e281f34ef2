#include <gtest/gtest.h>

#include <deque>
#include <map>
#include <random>
#include <tuple>

#include "rmstl/rmstl.hpp"

using namespace rmstl;
using namespace rmstl::env;

namespace {

std::string fixture(const std::string& name) { return std::string(RMSTL_FIXTURES) + "/" + name; }

void expect_deterministic(const std::string& id, const EnvParams& params) {
  for (std::uint64_t seed : {0u, 1u, 42u}) {
    auto a = make_environment(id, params);
    auto b = make_environment(id, params);
    EXPECT_EQ(a->reset(seed), b->reset(seed)) << id;
    std::mt19937_64 rng(seed + 100);
    for (int t = 0; t < 100 && !a->finished(); ++t) {
      auto act = std::uniform_int_distribution<std::size_t>(0, a->action_count() - 1)(rng);
      auto ra = a->step(act);
      auto rb = b->step(act);
      ASSERT_EQ(ra.observation, rb.observation) << id << " step " << t;
      ASSERT_EQ(ra.reward, rb.reward);
      ASSERT_EQ(ra.terminated, rb.terminated);
      ASSERT_EQ(ra.truncated, rb.truncated);
    }
  }
}

/// Fewest steps from the current state to a successful toggle, found by
/// breadth-first search over copies of the environment itself.
int shortest_success(const GridworldUnlock& start) {
  using Key = std::tuple<int, int, int, bool>;
  auto key = [](const GridworldUnlock& g) { return Key{g.agent().first, g.agent().second, g.heading(), g.has_key()}; };
  std::map<Key, int> dist{{key(start), 0}};
  std::deque<GridworldUnlock> queue{start};
  while (!queue.empty()) {
    auto g = queue.front();
    queue.pop_front();
    int d = dist[key(g)];
    for (std::size_t a = 0; a < g.action_count(); ++a) {
      auto next = g;
      auto r = next.step(a);
      if (r.terminated) return d + 1;
      if (r.truncated) continue;
      if (dist.emplace(key(next), d + 1).second) queue.push_back(next);
    }
  }
  return -1;
}

}  // namespace

TEST(Determinism, AllEnvironments) {
  expect_deterministic("gridworld", {{"size", 8}, {"layout_seed", 3}});
  expect_deterministic("cartpole", {});
  expect_deterministic("highway", {});
}

TEST(Registry, UnknownIdAndParameter) {
  EXPECT_THROW(make_environment("pong"), Error);
  EXPECT_THROW(make_environment("cartpole", {{"mass", 1}}), Error);
  EXPECT_THROW(make_environment("gridworld", {{"size", 3}}), Error);
}

TEST(Gridworld, SuccessIsReachableAndPlannerIsShortest) {
  for (int n = 6; n <= 12; ++n)
    for (int layout = 0; layout < 5; ++layout)
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        GridworldUnlock g({{"size", n}, {"layout_seed", layout}});
        g.reset(seed);
        int best = shortest_success(g);
        ASSERT_GT(best, 0) << "size " << n << " layout " << layout;
        auto plan = runtime::plan_gridworld(g);
        EXPECT_EQ(static_cast<int>(plan.size()), best) << "size " << n << " layout " << layout;

        StepResult r;
        for (auto a : plan) r = g.step(a);
        EXPECT_TRUE(r.terminated);
        EXPECT_EQ(r.reward, g.success_reward(best));
      }
}

TEST(Gridworld, LayoutFixedAcrossEpisodes) {
  GridworldUnlock g({{"size", 10}, {"layout_seed", 4}});
  g.reset(1);
  auto door = g.door();
  auto key = g.key_home();
  g.reset(2);
  EXPECT_EQ(g.door(), door);
  EXPECT_EQ(g.key_home(), key);
  EXPECT_EQ(door.first, 5);
}

TEST(Gridworld, ToggleWithoutKeyDoesNothing) {
  GridworldUnlock g({{"size", 6}, {"layout_seed", 7}});
  g.reset(0);
  auto plan = runtime::plan_gridworld(g);
  // Drive to the door without picking up the key: replay the plan minus pickups.
  for (auto a : plan) {
    if (a == GridworldUnlock::Pickup || a == GridworldUnlock::Toggle) continue;
    g.step(a);
  }
  for (int i = 0; i < 3; ++i) {
    auto r = g.step(GridworldUnlock::Toggle);
    EXPECT_FALSE(r.terminated);
    EXPECT_EQ(r.reward, 0.0);
    EXPECT_FALSE(g.door_open());
  }
}

TEST(Gridworld, TruncatesAtStepBudget) {
  GridworldUnlock g({{"size", 6}, {"layout_seed", 7}});
  EXPECT_EQ(g.max_steps(), 288);
  g.reset(0);
  StepResult r;
  for (int i = 0; i < 288; ++i) {
    ASSERT_FALSE(g.finished());
    r = g.step(GridworldUnlock::Done);
  }
  EXPECT_TRUE(r.truncated);
  EXPECT_FALSE(r.terminated);
  EXPECT_EQ(r.reward, 0.0);
  EXPECT_THROW(g.step(GridworldUnlock::Done), StepAfterTerminal);
}

TEST(Gridworld, SuccessRewardSchedule) {
  GridworldUnlock g({{"size", 6}});
  EXPECT_DOUBLE_EQ(g.success_reward(16), 0.95);
  EXPECT_NEAR(g.success_reward(288), 0.1, 1e-15);
}

TEST(Gridworld, PickupSetsKeyAndDropKeepsIt) {
  GridworldUnlock g({{"size", 6}, {"layout_seed", 7}});
  g.reset(0);
  auto plan = runtime::plan_gridworld(g);
  for (auto a : plan) {
    if (a == GridworldUnlock::Toggle) break;
    g.step(a);
  }
  EXPECT_TRUE(g.has_key());
  g.step(GridworldUnlock::Drop);
  EXPECT_TRUE(g.has_key());
  EXPECT_EQ(g.observation()[3], 1.0);
}

TEST(CartPole, PushRightFromRest) {
  CartPole c;
  c.reset_to({0, 0, 0, 0});
  auto r = c.step(CartPole::PushRight);
  EXPECT_EQ(r.observation[0], 0.0);
  EXPECT_GT(r.observation[1], 0.0);
  EXPECT_LT(r.observation[3], 0.0);
  EXPECT_EQ(r.reward, 1.0);
  EXPECT_FALSE(r.terminated);
}

TEST(CartPole, TerminationBoundaryIsExclusive) {
  CartPole c({{"gravity", 0}, {"force_mag", 0}});
  c.reset_to({2.4, 0, 0, 0});
  EXPECT_FALSE(c.step(CartPole::PushRight).terminated);
  c.reset_to({2.4, 1e-6, 0, 0});
  EXPECT_TRUE(c.step(CartPole::PushRight).terminated);
  c.reset_to({0, 0, CartPole::kThetaLimit, 0});
  EXPECT_FALSE(c.step(CartPole::PushRight).terminated);
  c.reset_to({0, 0, -CartPole::kThetaLimit, -1e-6});
  EXPECT_TRUE(c.step(CartPole::PushRight).terminated);
}

TEST(CartPole, TruncatesOnStepPastBudget) {
  CartPole c;
  EXPECT_EQ(c.max_steps(), 500);
  c.reset(3);
  runtime::CartPoleController ctl;
  StepResult r;
  for (int i = 0; i < 500; ++i) {
    r = c.step(ctl.act(c.state()));
    ASSERT_FALSE(r.terminated) << "pole fell at step " << i + 1;
    ASSERT_FALSE(r.truncated) << "step " << i + 1;
  }
  r = c.step(ctl.act(c.state()));
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(c.steps(), 501);
}

TEST(CartPole, InitialStateWithinRange) {
  CartPole c;
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto obs = c.reset(s);
    for (double v : obs) {
      EXPECT_LE(std::fabs(v), 0.05);
    }
  }
}

TEST(Highway, FasterSaturatesAtCap) {
  HighwayLite h({{"vehicles", 0}});
  h.reset(0);
  std::vector<double> speeds;
  for (int i = 0; i < 4; ++i) speeds.push_back(h.step(HighwayLite::Faster).observation[2]);
  EXPECT_EQ(speeds, (std::vector<double>{30, 35, 40, 40}));
  for (int i = 0; i < 6; ++i) h.step(HighwayLite::Slower);
  EXPECT_EQ(h.speed(), 20.0);
}

TEST(Highway, EmptySlotsUseSentinel) {
  HighwayLite h({{"vehicles", 0}});
  auto obs = h.reset(0);
  ASSERT_EQ(obs.size(), 4u + 4u * 4u);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(obs[4 + 4 * i + 0], 10.0);
    EXPECT_EQ(obs[4 + 4 * i + 1], 10.0);
    EXPECT_EQ(obs[4 + 4 * i + 2], 0.0);
    EXPECT_EQ(obs[4 + 4 * i + 3], 0.0);
  }
}

TEST(Highway, LaneChangeTakesTwoSteps) {
  HighwayLite h({{"vehicles", 0}, {"start_lane", 3}});
  auto obs = h.reset(0);
  EXPECT_DOUBLE_EQ(obs[1], 0.8);
  EXPECT_NEAR(h.step(HighwayLite::LaneLeft).observation[1], 0.7, 1e-12);
  EXPECT_DOUBLE_EQ(h.step(HighwayLite::Idle).observation[1], 0.6);
  EXPECT_EQ(h.lane(), 2);
}

TEST(Highway, CollisionTerminatesWithPenalty) {
  HighwayLite h({{"vehicles", 0}, {"start_lane", 1}});
  h.reset(0);
  h.set_leads({{3.0, 1, 25.0}});
  auto r = h.step(HighwayLite::Idle);
  EXPECT_TRUE(r.terminated);
  EXPECT_DOUBLE_EQ(r.reward, 0.25 - 1.0);
}

TEST(Highway, NearestLeadFillsFirstSlot) {
  HighwayLite h({{"vehicles", 0}, {"start_lane", 1}});
  h.reset(0);
  h.set_leads({{40.0, 2, 25.0}, {15.0, 1, 25.0}, {-20.0, 0, 25.0}});
  auto obs = h.observation();
  EXPECT_DOUBLE_EQ(obs[4], 0.15);
  EXPECT_DOUBLE_EQ(obs[5], 0.0);
  EXPECT_DOUBLE_EQ(obs[8], 0.40);
  EXPECT_NEAR(obs[9], 0.2, 1e-12);
  EXPECT_EQ(obs[12], 10.0);  // the car 20 m behind is not reported
}

TEST(Highway, LabelsFromTaskSpec) {
  auto spec = runtime::load_task_spec_file(fixture("highway.toml"));
  stl::Signal s(spec.variables);
  std::vector<double> row(spec.variables.size(), 0.0);
  auto set = [&](const std::string& v, double x) { row[*spec.variables.find(v)] = x; };
  set("y_ego", 0.8);
  set("vx_ego", 30);
  set("x1", 0.05);
  set("y1", 0.0);
  for (const char* v : {"x2", "y2", "x3", "y3", "x4", "y4"}) set(v, 10);
  s.append(row);
  auto eval = monitor::truth_assignment(spec.atoms, s, 0);
  auto has = [&](const std::string& name) {
    auto it = std::find(spec.atom_names.begin(), spec.atom_names.end(), name);
    return eval.sigma.contains(static_cast<std::size_t>(it - spec.atom_names.begin()));
  };
  EXPECT_TRUE(has("mu_right"));
  EXPECT_TRUE(has("mu_fast"));
  EXPECT_TRUE(has("mu_danger1"));
  EXPECT_TRUE(has("mu_danger"));
  EXPECT_FALSE(has("mu_danger2"));

  // Robustness 0 satisfies a lower-bound atom with beta 0, so the lane at
  // y = 0.6 still counts as right; the lane at 0.4 does not.
  auto mu_right_at = [&](double y) {
    row[*spec.variables.find("y_ego")] = y;
    stl::Signal lane(spec.variables);
    lane.append(row);
    auto it = std::find(spec.atom_names.begin(), spec.atom_names.end(), "mu_right");
    return monitor::truth_assignment(spec.atoms, lane, 0).sigma.contains(static_cast<std::size_t>(it - spec.atom_names.begin()));
  };
  EXPECT_TRUE(mu_right_at(0.6));
  EXPECT_FALSE(mu_right_at(0.4));
}
