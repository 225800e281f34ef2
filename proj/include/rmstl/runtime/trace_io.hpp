#pragma once

#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmstl/detail/format.hpp"
#include "rmstl/runtime/episode.hpp"

namespace rmstl::runtime {

/// Trace CSV: t, action, every observation component, per atom lo/hi/in, per
/// machine state name and reward, reward, env_reward, cause. The reset row has
/// an empty action; cause is empty except on the last row.
inline void write_trace_csv(std::ostream& out, const TaskSpec& spec, const EpisodeTrace& trace) {
  auto env = spec.make_environment();
  out << "t,action";
  for (const auto& c : env->observation_space()) out << ',' << c.name;
  for (const auto& a : spec.atom_names) out << ',' << a << ".lo," << a << ".hi," << a << ".in";
  for (const auto& m : spec.machines) out << ',' << m.name() << ".state," << m.name() << ".reward";
  out << ",reward,env_reward,cause\n";
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& r = trace.steps[i];
    out << r.t << ',';
    if (r.action) out << *r.action;
    for (double v : r.observation) out << ',' << rmstl::detail::sig9(v);
    for (std::size_t a = 0; a < spec.atoms.size(); ++a)
      out << ',' << rmstl::detail::sig9(r.robustness[a].lo) << ',' << rmstl::detail::sig9(r.robustness[a].hi) << ','
          << (r.sigma.contains(a) ? 1 : 0);
    for (std::size_t m = 0; m < spec.machines.size(); ++m)
      out << ',' << spec.machines[m].states()[r.machine_states[m]] << ',' << rmstl::detail::sig9(r.machine_rewards[m]);
    out << ',' << rmstl::detail::sig9(r.reward) << ',' << rmstl::detail::sig9(r.env_reward) << ',';
    if (i + 1 == trace.steps.size()) out << to_string(r.cause);
    out << '\n';
  }
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    return std::nullopt;
  }
};

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  for (char c : line) {
    if (c == ',') out.emplace_back();
    else if (c != '\r') out.back() += c;
  }
  return out;
}
}  // namespace detail

/// Reads a plain comma-separated table (no quoting).
inline CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) return t;
  t.header = detail::split_csv_line(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto row = detail::split_csv_line(line);
    if (row.size() != t.header.size())
      throw Error("csv line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                  " fields, found " + std::to_string(row.size()));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline double parse_csv_number(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) throw Error("not a number: '" + s + "'");
  return v;
}

/// Rebuilds the task spec's signal from CSV columns named after its variables.
/// Uses the first `rows` rows (all when negative).
inline stl::Signal signal_from_csv(const CsvTable& t, const stl::VariableTable& vars, std::int64_t rows = -1) {
  std::vector<std::size_t> cols;
  for (const auto& d : vars.decls()) {
    auto c = t.column(d.name);
    if (!c) throw MissingColumn(d.name);
    cols.push_back(*c);
  }
  stl::Signal s(vars);
  std::size_t n = rows < 0 ? t.rows.size() : std::min(t.rows.size(), static_cast<std::size_t>(rows));
  std::vector<double> sample(cols.size());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < cols.size(); ++i) sample[i] = parse_csv_number(t.rows[r][cols[i]]);
    s.append(sample);
  }
  return s;
}

inline nlohmann::ordered_json eval_json(const std::vector<EvalResult>& results) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& r : results)
    out[r.name] = {{"robustness", r.robustness},
                   {"satisfied", r.satisfied},
                   {"boundary", r.boundary},
                   {"truncated", r.truncated}};
  return out;
}

/// One JSON-lines record per episode.
inline std::string metrics_line(const TaskSpec& spec, const EpisodeTrace& trace) {
  nlohmann::ordered_json j;
  j["seed"] = trace.seed;
  j["length"] = trace.length();
  j["total_reward"] = trace.total_reward();
  j["terminal_cause"] = to_string(trace.cause());
  j["eval"] = eval_json(eval_episode(spec, trace));
  return j.dump();
}

}  // namespace rmstl::runtime
