#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "rmstl/rmstl.hpp"

using namespace rmstl;
using namespace rmstl::learner;

namespace {

std::string fixture(const std::string& name) { return std::string(RMSTL_FIXTURES) + "/" + name; }

LearnerConfig small_grid_config() {
  LearnerConfig cfg;
  cfg.alpha = 0.5;
  cfg.episodes = 200;
  cfg.seed = 3;
  cfg.observe = {"x", "y", "dir"};
  return cfg;
}

}  // namespace

TEST(QTable, UpdateExamples) {
  QTable q(2);
  // Zero-initialized table, reward 1, alpha 0.5: 0 + 0.5 * (1 + 0.99 * 0 - 0).
  EXPECT_DOUBLE_EQ(q.update(0, 0, 1.0, 1, false, 0.5, 0.99), 0.5);
  // Terminal transitions do not bootstrap even when the successor has value.
  q.entry(7)[1] = 100.0;
  EXPECT_DOUBLE_EQ(q.update(1, 1, 10.0, 7, true, 1.0, 0.9), 10.0);
  // Non-terminal: 0 + 1.0 * (0 + 0.9 * 100).
  EXPECT_DOUBLE_EQ(q.update(2, 0, 0.0, 7, false, 1.0, 0.9), 90.0);
  // A fixed point stays put.
  q.entry(3)[0] = 2.0;
  q.entry(4) = {1.0, 0.0};
  EXPECT_DOUBLE_EQ(q.update(3, 0, 1.1, 4, false, 0.3, 0.9), 2.0);
}

TEST(QTable, GreedyPrefersLowestIndex) {
  QTable q(3);
  EXPECT_EQ(q.greedy(5), 0u);
  q.entry(5) = {1.0, 2.0, 2.0};
  EXPECT_EQ(q.greedy(5), 1u);
}

TEST(Config, EpsilonLinearDecay) {
  LearnerConfig cfg;
  cfg.epsilon_start = 1.0;
  cfg.epsilon_end = 0.1;
  cfg.decay_fraction = 0.5;
  cfg.episodes = 100;
  EXPECT_DOUBLE_EQ(cfg.epsilon(0), 1.0);
  EXPECT_DOUBLE_EQ(cfg.epsilon(25), 0.55);
  EXPECT_DOUBLE_EQ(cfg.epsilon(50), 0.1);
  EXPECT_DOUBLE_EQ(cfg.epsilon(99), 0.1);
  cfg.decay_fraction = 0;
  EXPECT_DOUBLE_EQ(cfg.epsilon(0), 0.1);
}

TEST(Discretizer, MachineStatesSeparateCells) {
  auto spec = runtime::load_task_spec_file(fixture("gridworld-6.toml"));
  runtime::Session s(spec);
  s.reset(0);
  Discretizer d(s, {"x", "y", "dir"}, {}, true);
  EXPECT_EQ(d.size(), 6.0 * 6 * 4 * 3);
  auto before = d.key(s);

  // Walk to the key and pick it up: pose-only features cannot tell the two
  // phases apart, the machine state can.
  auto plan = runtime::plan_gridworld(dynamic_cast<const env::GridworldUnlock&>(s.environment()));
  for (auto a : plan) {
    if (a == env::GridworldUnlock::Toggle) break;
    s.step(a);
  }
  ASSERT_EQ(s.machine_state().states[0], 1u);
  Discretizer pose_only(s, {"x", "y", "dir"}, {}, false);
  Discretizer with_rm(s, {"x", "y", "dir"}, {}, true);
  EXPECT_EQ(with_rm.key(s) % 3, 1u);
  EXPECT_NE(before, with_rm.key(s));
  EXPECT_EQ(pose_only.key(s), with_rm.key(s) / 3);
}

TEST(Discretizer, ContinuousNeedsBins) {
  auto spec = runtime::load_task_spec_file(fixture("cartpole-r1.toml"));
  runtime::Session s(spec);
  s.reset(0);
  EXPECT_THROW(Discretizer(s, {"x"}, {}, true), NotDiscretizable);
  EXPECT_THROW(Discretizer(s, {"R1.u0"}, {}, true), NotDiscretizable);
  EXPECT_THROW(Discretizer(s, {"nope"}, {}, true), NotDiscretizable);
  EXPECT_THROW(Discretizer(s, {"x"}, {{"x", {0, 0, 1}}}, true), NotDiscretizable);
  Discretizer d(s, {"x"}, {{"x", {4, -2, 2}}}, true);
  EXPECT_EQ(d.size(), 4.0 * 3);
}

TEST(Discretizer, BinEdgesClampToRange) {
  Feature f;
  f.bins = {4, -2, 2};
  EXPECT_EQ(f.cell(-5), 0u);
  EXPECT_EQ(f.cell(-2), 0u);
  EXPECT_EQ(f.cell(-1), 1u);
  EXPECT_EQ(f.cell(0), 2u);
  EXPECT_EQ(f.cell(1.999), 3u);
  EXPECT_EQ(f.cell(2), 3u);
  EXPECT_EQ(f.cell(std::nan("")), 0u);
}

TEST(Train, SeededRunsAreIdentical) {
  auto spec = runtime::load_task_spec_file(fixture("gridworld-6.toml"));
  auto cfg = small_grid_config();
  auto a = train(spec, cfg);
  auto b = train(spec, cfg);
  std::stringstream sa, sb;
  a.model.save(sa);
  b.model.save(sb);
  EXPECT_EQ(sa.str(), sb.str());
  ASSERT_EQ(a.curve.size(), b.curve.size());
  for (std::size_t i = 0; i < a.curve.size(); ++i) EXPECT_EQ(a.curve[i].total_reward, b.curve[i].total_reward);

  cfg.seed = 4;
  auto c = train(spec, cfg);
  std::stringstream sc;
  c.model.save(sc);
  EXPECT_NE(sa.str(), sc.str());
}

TEST(Train, ValuesStayFiniteAndBounded) {
  auto spec = runtime::load_task_spec_file(fixture("gridworld-6.toml"));
  auto result = train(spec, small_grid_config());
  EXPECT_GT(result.model.table.size(), 0u);
  // Rewards lie in [0, 1] and only the final step pays, so values do too.
  for (const auto& [k, v] : result.model.table.entries())
    for (double x : v) {
      EXPECT_TRUE(std::isfinite(x));
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
}

TEST(Model, SaveLoadRoundTrip) {
  auto spec = runtime::load_task_spec_file(fixture("cartpole-r1r2.toml"));
  auto cfg = load_learner_config_file(fixture("learner-cartpole.toml"));
  cfg.episodes = 50;
  auto result = train(spec, cfg);
  std::stringstream first;
  result.model.save(first);
  auto loaded = QModel::load(first);
  std::stringstream second;
  loaded.save(second);
  EXPECT_EQ(first.str(), second.str());
  EXPECT_EQ(loaded.table.size(), result.model.table.size());
  for (const auto& [k, v] : result.model.table.entries()) EXPECT_EQ(loaded.table.values(k), v);

  // The loaded model drives the same greedy episode.
  auto e1 = evaluate_greedy(spec, result.model, 2, 77);
  auto e2 = evaluate_greedy(spec, loaded, 2, 77);
  EXPECT_EQ(e1.reward.mean, e2.reward.mean);
  EXPECT_EQ(e1.length.mean, e2.length.mean);
}

TEST(Model, RejectsGarbage) {
  std::stringstream bad("hello 1\n");
  EXPECT_THROW(QModel::load(bad), Error);
  std::stringstream truncated("rmstl-qtable 1\nenv gridworld\nactions 2 a b\nfeatures 0\nmachines 0\nentries 3\n1 0 0\n");
  EXPECT_THROW(QModel::load(truncated), Error);
}

TEST(Model, WrongEnvironmentIsRejected) {
  auto grid = runtime::load_task_spec_file(fixture("gridworld-6.toml"));
  auto pole = runtime::load_task_spec_file(fixture("cartpole-r1.toml"));
  auto cfg = small_grid_config();
  cfg.episodes = 5;
  auto result = train(grid, cfg);
  QTablePolicy p(result.model);
  EXPECT_THROW(runtime::run_episode(pole, p, 0), Error);
}

TEST(Warnings, CoarseCartpoleBins) {
  auto spec = runtime::load_task_spec_file(fixture("cartpole-r1.toml"));
  LearnerConfig cfg;
  cfg.bins["x"] = {4, -2.4, 2.4};
  EXPECT_FALSE(config_warnings(spec, cfg).empty());
  auto good = load_learner_config_file(fixture("learner-cartpole.toml"));
  EXPECT_TRUE(config_warnings(spec, good).empty());
}
