#pragma once

#include <array>
#include <random>
#include <utility>

#include "rmstl/env/environment.hpp"

namespace rmstl::env {

/// Two-room key/door task: pick up the key in the left room, then toggle the
/// locked door in the dividing wall. Success pays 1 - 0.9 * n / n_max, where n
/// counts steps including the toggle; reaching n_max truncates with reward 0.
///
/// The layout (key and door) is drawn from `layout_seed` and stays fixed across
/// episodes; the agent pose is drawn per episode when `random_start` is set.
class GridworldUnlock final : public Environment {
 public:
  enum Action : std::size_t { Left = 0, Right = 1, Forward = 2, Pickup = 3, Drop = 4, Toggle = 5, Done = 6 };
  enum class Cell { Empty, Wall, Key, Door };

  /// Heading 0 = +x, 1 = +y, 2 = -x, 3 = -y.
  static constexpr std::array<std::pair<int, int>, 4> kHeading{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

  explicit GridworldUnlock(const EnvParams& params = {}) {
    detail::ParamReader p("gridworld", params);
    size_ = static_cast<int>(p.get("size", 6));
    layout_seed_ = static_cast<std::uint64_t>(p.get("layout_seed", 0));
    random_start_ = p.get("random_start", 1) != 0.0;
    max_steps_ = static_cast<int>(p.get("max_steps", 8.0 * size_ * size_));
    p.finish();
    if (size_ < 5 || size_ > 64) throw Error("gridworld size must be in [5, 64]");
    if (max_steps_ < 1) throw Error("gridworld max_steps must be positive");

    double edge = size_ - 1;
    space_ = {{"x", 0, edge, true},
              {"y", 0, edge, true},
              {"dir", 0, 3, true},
              {"has_key", 0, 1, true},
              {"open_door", 0, 1, true}};
    actions_ = {"left", "right", "forward", "pickup", "drop", "toggle", "done"};
    build_layout();
  }

  std::string_view id() const override { return "gridworld"; }
  const std::vector<ObservationComponent>& observation_space() const override { return space_; }
  const std::vector<std::string>& action_names() const override { return actions_; }

  std::vector<double> reset(std::uint64_t seed) override {
    std::mt19937_64 rng(seed);
    grid_ = base_grid_;
    has_key_ = false;
    open_door_ = false;
    steps_ = 0;
    finished_ = false;
    if (random_start_) {
      auto cells = free_left_cells();
      std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
      std::tie(ax_, ay_) = cells[pick(rng)];
      dir_ = std::uniform_int_distribution<int>(0, 3)(rng);
    } else {
      ax_ = start_x_;
      ay_ = start_y_;
      dir_ = start_dir_;
    }
    return observation();
  }

  StepResult step(std::size_t action) override {
    if (finished_) throw StepAfterTerminal();
    if (action >= actions_.size()) throw Error("gridworld action out of range: " + std::to_string(action));
    ++steps_;
    StepResult r;
    auto [fx, fy] = front();
    switch (action) {
      case Left: dir_ = (dir_ + 3) % 4; break;
      case Right: dir_ = (dir_ + 1) % 4; break;
      case Forward: {
        Cell c = cell(fx, fy);
        if (c == Cell::Empty || (c == Cell::Door && open_door_)) {
          ax_ = fx;
          ay_ = fy;
        }
        break;
      }
      case Pickup:
        if (cell(fx, fy) == Cell::Key && !has_key_) {
          has_key_ = true;
          set_cell(fx, fy, Cell::Empty);
        }
        break;
      case Toggle:
        if (cell(fx, fy) == Cell::Door && has_key_ && !open_door_) {
          open_door_ = true;
          r.terminated = true;
          r.reward = success_reward(steps_);
        }
        break;
      default: break;  // drop keeps the key (has_key is monotone); done is a no-op
    }
    if (!r.terminated && steps_ >= max_steps_) r.truncated = true;
    finished_ = r.terminated || r.truncated;
    r.observation = observation();
    return r;
  }

  std::vector<double> observation() const override {
    return {static_cast<double>(ax_), static_cast<double>(ay_), static_cast<double>(dir_), has_key_ ? 1.0 : 0.0,
            open_door_ ? 1.0 : 0.0};
  }
  bool finished() const override { return finished_; }

  double success_reward(int n) const { return 1.0 - 0.9 * n / max_steps_; }

  int size() const noexcept { return size_; }
  int max_steps() const noexcept { return max_steps_; }
  int steps() const noexcept { return steps_; }
  std::pair<int, int> agent() const noexcept { return {ax_, ay_}; }
  int heading() const noexcept { return dir_; }
  bool has_key() const noexcept { return has_key_; }
  bool door_open() const noexcept { return open_door_; }
  std::pair<int, int> door() const noexcept { return {door_x_, door_y_}; }
  std::pair<int, int> key_home() const noexcept { return {key_x_, key_y_}; }
  Cell cell(int x, int y) const {
    if (x < 0 || y < 0 || x >= size_ || y >= size_) return Cell::Wall;
    return grid_[static_cast<std::size_t>(y * size_ + x)];
  }
  std::pair<int, int> front() const { return {ax_ + kHeading[dir_].first, ay_ + kHeading[dir_].second}; }

 private:
  void set_cell(int x, int y, Cell c) { grid_[static_cast<std::size_t>(y * size_ + x)] = c; }

  std::vector<std::pair<int, int>> free_left_cells() const {
    std::vector<std::pair<int, int>> out;
    for (int y = 1; y < size_ - 1; ++y)
      for (int x = 1; x < wall_x_; ++x)
        if (base_grid_[static_cast<std::size_t>(y * size_ + x)] == Cell::Empty) out.emplace_back(x, y);
    return out;
  }

  void build_layout() {
    base_grid_.assign(static_cast<std::size_t>(size_ * size_), Cell::Empty);
    auto put = [this](int x, int y, Cell c) { base_grid_[static_cast<std::size_t>(y * size_ + x)] = c; };
    for (int i = 0; i < size_; ++i) {
      put(i, 0, Cell::Wall);
      put(i, size_ - 1, Cell::Wall);
      put(0, i, Cell::Wall);
      put(size_ - 1, i, Cell::Wall);
    }
    wall_x_ = size_ / 2;
    for (int y = 0; y < size_; ++y) put(wall_x_, y, Cell::Wall);

    std::mt19937_64 rng(layout_seed_);
    door_x_ = wall_x_;
    door_y_ = std::uniform_int_distribution<int>(1, size_ - 2)(rng);
    put(door_x_, door_y_, Cell::Door);
    key_x_ = std::uniform_int_distribution<int>(1, wall_x_ - 1)(rng);
    key_y_ = std::uniform_int_distribution<int>(1, size_ - 2)(rng);
    put(key_x_, key_y_, Cell::Key);

    auto cells = free_left_cells();
    std::tie(start_x_, start_y_) = cells[std::uniform_int_distribution<std::size_t>(0, cells.size() - 1)(rng)];
    start_dir_ = std::uniform_int_distribution<int>(0, 3)(rng);
    grid_ = base_grid_;
  }

  int size_ = 6;
  std::uint64_t layout_seed_ = 0;
  bool random_start_ = true;
  int max_steps_ = 288;
  std::vector<ObservationComponent> space_;
  std::vector<std::string> actions_;

  std::vector<Cell> base_grid_;
  std::vector<Cell> grid_;
  int wall_x_ = 3;
  int door_x_ = 0, door_y_ = 0, key_x_ = 0, key_y_ = 0;
  int start_x_ = 1, start_y_ = 1, start_dir_ = 0;

  int ax_ = 1, ay_ = 1, dir_ = 0;
  bool has_key_ = false;
  bool open_door_ = false;
  int steps_ = 0;
  bool finished_ = false;
};

}  // namespace rmstl::env
