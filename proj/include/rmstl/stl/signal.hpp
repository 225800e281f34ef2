#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rmstl/error.hpp"
#include "rmstl/stl/arith.hpp"

namespace rmstl::stl {

/// Bounds used when a variable declaration omits them.
inline constexpr double kDefaultBound = 1e6;

struct VariableDecl {
  std::string name;
  double lo = -kDefaultBound;
  double hi = kDefaultBound;
};

class VariableTable {
 public:
  VariableTable() = default;
  VariableTable(std::initializer_list<VariableDecl> decls) {
    for (const auto& d : decls) add(d.name, d.lo, d.hi);
  }

  std::size_t add(std::string name, double lo = -kDefaultBound, double hi = kDefaultBound) {
    if (index_.contains(name)) throw Error("duplicate variable '" + name + "'");
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
      throw Error("invalid bounds for variable '" + name + "'");
    index_.emplace(name, decls_.size());
    decls_.push_back({std::move(name), lo, hi});
    return decls_.size() - 1;
  }

  std::optional<std::size_t> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const noexcept { return decls_.size(); }
  bool empty() const noexcept { return decls_.empty(); }
  const VariableDecl& operator[](std::size_t i) const { return decls_[i]; }
  const std::vector<VariableDecl>& decls() const noexcept { return decls_; }

  std::vector<Range> bounds() const {
    std::vector<Range> out;
    out.reserve(decls_.size());
    for (const auto& d : decls_) out.push_back({d.lo, d.hi});
    return out;
  }

 private:
  std::vector<VariableDecl> decls_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Append-only multivariate trace sampled once per environment step.
///
/// Samples outside the declared bounds are clamped and the step is flagged.
/// Values between steps follow the piecewise-constant, right-continuous
/// interpolation: the value at real time t is the sample at floor(t).
class Signal {
 public:
  Signal() = default;
  explicit Signal(VariableTable vars) : vars_(std::move(vars)), bounds_(vars_.bounds()) {}

  std::size_t append(std::span<const double> sample) {
    if (sample.size() != vars_.size()) throw DimensionMismatch(vars_.size(), sample.size());
    bool clamped = false;
    for (std::size_t i = 0; i < sample.size(); ++i) {
      double v = sample[i];
      double c = std::clamp(v, bounds_[i].lo, bounds_[i].hi);
      if (std::isnan(v)) c = bounds_[i].lo;
      clamped = clamped || c != v;
      data_.push_back(c);
    }
    clamped_.push_back(clamped);
    return clamped_.size() - 1;
  }

  std::size_t append(std::initializer_list<double> sample) {
    return append(std::span<const double>(sample.begin(), sample.size()));
  }

  std::size_t length() const noexcept { return clamped_.size(); }
  bool empty() const noexcept { return clamped_.empty(); }
  std::size_t dimension() const noexcept { return vars_.size(); }

  std::span<const double> sample(std::size_t step) const {
    return {data_.data() + step * vars_.size(), vars_.size()};
  }
  double at(std::size_t step, std::size_t var) const { return data_[step * vars_.size() + var]; }
  bool clamped(std::size_t step) const { return clamped_[step]; }

  double value(std::size_t var, double t) const {
    if (!(t >= 0.0)) throw OutOfRecordedRange("time " + rmstl::detail::shortest(t) + " before the first sample");
    auto step = static_cast<std::size_t>(std::floor(t));
    if (step >= length())
      throw OutOfRecordedRange("time " + rmstl::detail::shortest(t) + " beyond " + std::to_string(length()) +
                               " recorded samples");
    if (var >= vars_.size()) throw OutOfRecordedRange("variable index " + std::to_string(var));
    return at(step, var);
  }

  double value(const std::string& var, double t) const {
    auto idx = vars_.find(var);
    if (!idx) throw UnknownVariable(var);
    return value(*idx, t);
  }

  const VariableTable& variables() const noexcept { return vars_; }
  std::span<const Range> bounds() const noexcept { return bounds_; }

 private:
  VariableTable vars_;
  std::vector<Range> bounds_;
  std::vector<double> data_;
  std::vector<bool> clamped_;
};

}  // namespace rmstl::stl
