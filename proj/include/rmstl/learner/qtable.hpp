#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "rmstl/runtime/policies.hpp"

namespace rmstl::learner {

struct BinSpec {
  std::size_t count = 0;
  double lo = 0.0;
  double hi = 0.0;
};

/// One coordinate of the table key: an augmented-observation component cut
/// into uniform bins, or an integer-valued component used as is.
struct Feature {
  std::string name;
  bool exact = false;
  BinSpec bins;    // when !exact
  long lo = 0;     // exact range
  long hi = 0;

  std::uint64_t radix() const { return exact ? static_cast<std::uint64_t>(hi - lo + 1) : bins.count; }

  std::uint64_t cell(double v) const {
    if (exact) {
      long r = std::clamp(std::lround(v), lo, hi);
      return static_cast<std::uint64_t>(r - lo);
    }
    double f = std::floor((v - bins.lo) / (bins.hi - bins.lo) * static_cast<double>(bins.count));
    if (!(f >= 0)) f = 0;
    return std::min(static_cast<std::uint64_t>(f), static_cast<std::uint64_t>(bins.count - 1));
  }
};

/// Thrown when an observation component has no usable discretization.
class NotDiscretizable : public Error {
 public:
  using Error::Error;
};

/// Maps the aggregated state (selected observation features plus every
/// machine state) to a mixed-radix integer key.
class Discretizer {
 public:
  Discretizer() = default;

  /// `observe` empty means every environment component; `bins` supplies cuts for
  /// continuous components and robustness features ("rho.<formula>").
  Discretizer(const runtime::Session& session, std::vector<std::string> observe,
              const std::map<std::string, BinSpec, std::less<>>& bins, bool machine_states) {
    const auto& names = session.augmented_names();
    const auto& space = session.environment().observation_space();
    if (observe.empty())
      for (const auto& c : space) observe.push_back(c.name);
    for (const auto& name : observe) {
      auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) throw NotDiscretizable("unknown observation feature '" + name + "'");
      std::size_t idx = static_cast<std::size_t>(it - names.begin());
      bool is_env = idx < space.size();
      bool is_rho = name.starts_with("rho.");
      if (!is_env && !is_rho)
        throw NotDiscretizable("'" + name + "' is a machine-state column; machine states enter the key directly");
      Feature f;
      f.name = name;
      if (auto b = bins.find(name); b != bins.end()) {
        f.bins = b->second;
        if (f.bins.count == 0 || !(f.bins.hi > f.bins.lo))
          throw NotDiscretizable("bins for '" + name + "' need count >= 1 and hi > lo");
      } else if (is_env && space[idx].discrete) {
        f.exact = true;
        f.lo = std::lround(space[idx].lo);
        f.hi = std::lround(space[idx].hi);
      } else {
        throw NotDiscretizable("continuous feature '" + name + "' has no [bins] entry");
      }
      features_.push_back(std::move(f));
      columns_.push_back(idx);
    }
    if (machine_states)
      for (const auto& m : session.spec().machines) {
        machines_.push_back(m.name());
        machine_radix_.push_back(m.state_count());
      }
    check_size();
  }

  std::uint64_t key(const runtime::Session& s) const {
    const auto& obs = s.augmented_observation();
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < features_.size(); ++i) k = k * features_[i].radix() + features_[i].cell(obs[columns_[i]]);
    const auto& u = s.machine_state().states;
    for (std::size_t i = 0; i < machines_.size(); ++i) k = k * machine_radix_[i] + u[i];
    return k;
  }

  /// Number of distinct keys.
  double size() const {
    double n = 1;
    for (const auto& f : features_) n *= static_cast<double>(f.radix());
    for (auto r : machine_radix_) n *= static_cast<double>(r);
    return n;
  }

  const std::vector<Feature>& features() const noexcept { return features_; }
  const std::vector<std::string>& machines() const noexcept { return machines_; }

  void write(std::ostream& out) const {
    out << "features " << features_.size() << '\n';
    for (const auto& f : features_) {
      out << "feature " << f.name << ' ';
      if (f.exact) out << "exact " << f.lo << ' ' << f.hi << '\n';
      else out << "bins " << f.bins.count << ' ' << rmstl::detail::shortest(f.bins.lo) << ' ' << rmstl::detail::shortest(f.bins.hi) << '\n';
    }
    out << "machines " << machines_.size() << '\n';
    for (std::size_t i = 0; i < machines_.size(); ++i) out << "machine " << machines_[i] << ' ' << machine_radix_[i] << '\n';
  }

  static Discretizer read(std::istream& in) {
    Discretizer d;
    std::string word;
    std::size_t n = 0;
    expect(in, "features");
    in >> n;
    for (std::size_t i = 0; i < n; ++i) {
      Feature f;
      std::string kind;
      expect(in, "feature");
      in >> f.name >> kind;
      if (kind == "exact") {
        f.exact = true;
        in >> f.lo >> f.hi;
      } else if (kind == "bins") {
        in >> f.bins.count >> f.bins.lo >> f.bins.hi;
      } else {
        throw Error("q-table: bad feature kind '" + kind + "'");
      }
      d.features_.push_back(std::move(f));
    }
    expect(in, "machines");
    in >> n;
    for (std::size_t i = 0; i < n; ++i) {
      std::string name;
      std::size_t radix = 0;
      expect(in, "machine");
      in >> name >> radix;
      d.machines_.push_back(name);
      d.machine_radix_.push_back(radix);
    }
    if (!in) throw Error("q-table: truncated header");
    d.check_size();
    return d;
  }

  /// Resolves feature columns against a session's observation layout.
  void bind(const runtime::Session& s) {
    const auto& names = s.augmented_names();
    columns_.clear();
    for (const auto& f : features_) {
      auto it = std::find(names.begin(), names.end(), f.name);
      if (it == names.end()) throw DimensionMismatch(features_.size(), columns_.size());
      columns_.push_back(static_cast<std::size_t>(it - names.begin()));
    }
    const auto& ms = s.spec().machines;
    for (std::size_t i = 0; i < machines_.size(); ++i)
      if (i >= ms.size() || ms[i].name() != machines_[i] || ms[i].state_count() != machine_radix_[i])
        throw Error("q-table machine '" + machines_[i] + "' does not match the task spec");
  }

 private:
  static void expect(std::istream& in, const char* word) {
    std::string w;
    in >> w;
    if (w != word) throw Error(std::string("q-table: expected '") + word + "', found '" + w + "'");
  }

  void check_size() const {
    if (size() > 1.8e19) throw NotDiscretizable("discretized state space does not fit a 64-bit key");
  }

  std::vector<Feature> features_;
  std::vector<std::size_t> columns_;
  std::vector<std::string> machines_;
  std::vector<std::size_t> machine_radix_;
};

/// Sparse action-value table; unseen keys read as zero.
class QTable {
 public:
  explicit QTable(std::size_t actions = 0) : actions_(actions), zero_(actions, 0.0) {}

  std::size_t action_count() const noexcept { return actions_; }
  std::size_t size() const noexcept { return table_.size(); }

  const std::vector<double>& values(std::uint64_t key) const {
    auto it = table_.find(key);
    return it == table_.end() ? zero_ : it->second;
  }

  std::vector<double>& entry(std::uint64_t key) { return table_.try_emplace(key, zero_).first->second; }

  double max_value(std::uint64_t key) const {
    const auto& v = values(key);
    return *std::max_element(v.begin(), v.end());
  }

  /// Lowest-index maximizer.
  std::size_t greedy(std::uint64_t key) const {
    const auto& v = values(key);
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  }

  /// One-step Q-learning update; returns the new value.
  double update(std::uint64_t key, std::size_t action, double reward, std::uint64_t next, bool terminal,
                double alpha, double gamma) {
    const double target = reward + (terminal ? 0.0 : gamma * max_value(next));
    auto& q = entry(key)[action];
    q += alpha * (target - q);
    return q;
  }

  const std::unordered_map<std::uint64_t, std::vector<double>>& entries() const noexcept { return table_; }

  void write(std::ostream& out) const {
    std::vector<std::uint64_t> keys;
    keys.reserve(table_.size());
    for (const auto& [k, _] : table_) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    out << "entries " << keys.size() << '\n';
    char buf[40];
    for (auto k : keys) {
      out << k;
      for (double v : table_.at(k)) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << ' ' << buf;
      }
      out << '\n';
    }
  }

  void read_entries(std::istream& in) {
    std::string word;
    std::size_t n = 0;
    in >> word >> n;
    if (word != "entries") throw Error("q-table: expected 'entries'");
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t k = 0;
      in >> k;
      auto& e = entry(k);
      for (auto& v : e) in >> v;
    }
    if (!in) throw Error("q-table: truncated entries");
  }

 private:
  std::size_t actions_;
  std::vector<double> zero_;
  std::unordered_map<std::uint64_t, std::vector<double>> table_;
};

/// Trained table plus the key layout it was trained with.
struct QModel {
  std::string env_id;
  std::vector<std::string> actions;
  Discretizer discretizer;
  QTable table;

  void save(std::ostream& out) const {
    out << "rmstl-qtable 1\n";
    out << "env " << env_id << '\n';
    out << "actions " << actions.size();
    for (const auto& a : actions) out << ' ' << a;
    out << '\n';
    discretizer.write(out);
    table.write(out);
  }

  static QModel load(std::istream& in) {
    QModel m;
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "rmstl-qtable" || version != 1) throw Error("not a q-table file");
    std::string word;
    in >> word >> m.env_id;
    if (word != "env") throw Error("q-table: expected 'env'");
    std::size_t n = 0;
    in >> word >> n;
    if (word != "actions") throw Error("q-table: expected 'actions'");
    m.actions.resize(n);
    for (auto& a : m.actions) in >> a;
    m.discretizer = Discretizer::read(in);
    m.table = QTable(n);
    m.table.read_entries(in);
    return m;
  }
};

/// Greedy policy over a loaded table.
class QTablePolicy final : public runtime::Policy {
 public:
  explicit QTablePolicy(QModel model) : model_(std::move(model)) {}

  std::size_t act(const runtime::Session& s) override {
    if (!bound_) {
      if (s.environment().id() != model_.env_id)
        throw Error("q-table trained on '" + model_.env_id + "' cannot drive '" + std::string(s.environment().id()) + "'");
      if (s.environment().action_count() != model_.actions.size())
        throw DimensionMismatch(s.environment().action_count(), model_.actions.size());
      model_.discretizer.bind(s);
      bound_ = true;
    }
    return model_.table.greedy(model_.discretizer.key(s));
  }

 private:
  QModel model_;
  bool bound_ = false;
};

}  // namespace rmstl::learner
