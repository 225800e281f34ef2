// rmstl: validate task specs, monitor traces, run, train and evaluate episodes.
//
// Exit codes: 0 success, 1 validation error, 2 runtime error.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmstl/rmstl.hpp"

namespace fs = std::filesystem;
using namespace rmstl;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;

struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) { return rmstl::detail::sig9(v); }

std::uint64_t effective_seed(std::uint64_t flag) {
  if (const char* env = std::getenv("RMSTL_SEED"); env && *env) {
    char* end = nullptr;
    auto v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return v;
    throw ValidationFailure(std::string("RMSTL_SEED is not an unsigned integer: '") + env + "'");
  }
  return flag;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory '" + dir + "': " + ec.message());
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  return out;
}

const char* role_name(runtime::FormulaRole r) { return r == runtime::FormulaRole::Event ? "event" : "eval"; }

// ---- check ---------------------------------------------------------------

int cmd_check(const std::string& spec_path) {
  auto spec = runtime::load_task_spec_file(spec_path);
  std::cout << "spec " << spec_path << ": ok\n";
  std::cout << "env " << spec.env_id;
  for (const auto& [k, v] : spec.env_params) std::cout << ' ' << k << '=' << fmt(v);
  std::cout << ", horizon " << spec.horizon << '\n';
  std::cout << "variables:\n";
  for (const auto& d : spec.variables.decls())
    std::cout << "  " << d.name << " [" << fmt(d.lo) << ", " << fmt(d.hi) << "]\n";
  std::cout << "formulas:\n";
  for (const auto& f : spec.formulas) {
    std::cout << "  " << f.name << "  role=" << role_name(f.role) << " horizon=" << f.horizon;
    if (f.role == runtime::FormulaRole::Event)
      std::cout << " atom=" << (f.kind == monitor::AtomKind::LowerAtLeast ? "lo>=" : "hi<=") << fmt(f.beta)
                << " mode=" << (f.mode == monitor::EvalMode::AtOrigin ? "origin" : "sliding");
    std::cout << "\n    " << f.formula.to_string() << '\n';
  }
  std::cout << "atoms:";
  for (std::size_t i = 0; i < spec.atom_names.size(); ++i) std::cout << ' ' << i << ':' << spec.atom_names[i];
  std::cout << '\n';
  std::cout << "machines:\n";
  for (const auto& m : spec.machines) {
    std::size_t terminal = 0;
    for (std::size_t s = 0; s < m.state_count(); ++s) terminal += m.is_terminal(s);
    std::cout << "  " << m.name() << ": " << m.state_count() << " states (" << terminal << " terminal), "
              << m.transitions().size() << " transitions, weight " << fmt(m.weight()) << '\n';
  }
  if (!spec.augment_atoms.empty()) {
    std::cout << "augment:";
    for (auto a : spec.augment_atoms) std::cout << ' ' << spec.atom_names[a];
    std::cout << " (clip " << fmt(spec.augment_clip) << ")\n";
  }
  for (const auto& w : spec.warnings) std::cout << "warning: " << w << '\n';
  return kOk;
}

// ---- monitor -------------------------------------------------------------

int cmd_monitor(const std::string& spec_path, const std::string& trace_path, std::vector<std::string> names,
                std::int64_t at, const std::string& out_path) {
  auto spec = runtime::load_task_spec_file(spec_path);
  if (names.empty())
    for (const auto& f : spec.formulas) names.push_back(f.name);
  std::vector<const runtime::FormulaSpec*> formulas;
  for (const auto& n : names) {
    const auto* f = spec.find_formula(n);
    if (!f) throw ValidationFailure("unknown formula '" + n + "'");
    formulas.push_back(f);
  }
  if (at < 0) throw ValidationFailure("--at must be non-negative");

  std::ifstream in(trace_path, std::ios::binary);
  if (!in) throw Error("cannot read trace '" + trace_path + "'");
  auto table = runtime::read_csv(in);
  auto full = runtime::signal_from_csv(table, spec.variables);

  std::ostringstream out;
  out << "samples";
  for (const auto* f : formulas) out << ',' << f->name << ".lo," << f->name << ".hi";
  out << '\n';
  // Interval at step `at` for every prefix length, starting from the empty signal.
  stl::Signal prefix(spec.variables);
  for (std::size_t tau = 0;; ++tau) {
    out << tau;
    for (const auto* f : formulas) {
      auto r = monitor::rob_interval(f->formula, prefix, at);
      out << ',' << fmt(r.lo) << ',' << fmt(r.hi);
    }
    out << '\n';
    if (tau == full.length()) break;
    prefix.append(full.sample(tau));
  }
  if (out_path.empty()) {
    std::cout << out.str();
  } else {
    auto o = open_out(out_path);
    o << out.str();
  }
  for (const auto* f : formulas) {
    std::cerr << f->name << " at step " << at << ": ";
    if (at + f->horizon < static_cast<std::int64_t>(full.length()))
      std::cerr << "exact robustness " << fmt(monitor::rob_offline(f->formula, full, at)) << '\n';
    else
      std::cerr << "horizon " << f->horizon << " not covered by " << full.length() << " samples\n";
  }
  return kOk;
}

// ---- run -----------------------------------------------------------------

std::unique_ptr<runtime::Policy> make_policy(const std::string& name) {
  if (name.starts_with("qtable:")) {
    std::ifstream in(name.substr(7), std::ios::binary);
    if (!in) throw ValidationFailure("cannot read q-table '" + name.substr(7) + "'");
    return std::make_unique<learner::QTablePolicy>(learner::QModel::load(in));
  }
  auto p = runtime::make_builtin_policy(name);
  if (!p) throw ValidationFailure("unknown policy '" + name + "' (random, const:<a>, scripted:<name>, qtable:<path>)");
  return p;
}

int cmd_run(const std::string& spec_path, const std::string& policy_name, std::int64_t episodes, std::uint64_t seed,
            const std::string& out_dir) {
  auto spec = runtime::load_task_spec_file(spec_path);
  if (episodes < 1) throw ValidationFailure("--episodes must be positive");
  std::unique_ptr<runtime::Policy> policy;
  try {
    policy = make_policy(policy_name);
  } catch (const ValidationFailure&) {
    throw;
  } catch (const Error& e) {
    throw ValidationFailure(e.what());
  }
  seed = effective_seed(seed);
  ensure_dir(out_dir);
  auto metrics = open_out(fs::path(out_dir) / "metrics.jsonl");
  double sum = 0;
  for (std::int64_t i = 0; i < episodes; ++i) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
    auto trace = runtime::run_episode(spec, *policy, s);
    char name[32];
    std::snprintf(name, sizeof(name), "trace-%04lld.csv", static_cast<long long>(i));
    auto csv = open_out(fs::path(out_dir) / name);
    runtime::write_trace_csv(csv, spec, trace);
    metrics << runtime::metrics_line(spec, trace) << '\n';
    sum += trace.total_reward();
    std::cout << "episode " << i << " seed " << s << ": length " << trace.length() << ", reward "
              << fmt(trace.total_reward()) << ", " << runtime::to_string(trace.cause()) << '\n';
  }
  std::cout << "mean reward " << fmt(sum / static_cast<double>(episodes)) << " over " << episodes << " episodes\n";
  return kOk;
}

// ---- train ---------------------------------------------------------------

int cmd_train(const std::string& spec_path, const std::string& config_path, const std::string& out_dir,
              std::uint64_t seed_flag, bool seed_given) {
  auto spec = runtime::load_task_spec_file(spec_path);
  learner::LearnerConfig cfg;
  if (config_path.empty()) {
    cfg.defaults = true;
  } else {
    cfg = learner::load_learner_config_file(config_path);
  }
  if (seed_given || std::getenv("RMSTL_SEED")) cfg.seed = effective_seed(seed_flag);
  // Discretizability is a runtime property of (spec, config): exit 2.
  learner::make_discretizer(spec, cfg);

  if (cfg.defaults) std::cout << "no --config given: using default learner settings\n";
  for (const auto& w : learner::config_warnings(spec, cfg)) std::cout << "warning: " << w << '\n';

  ensure_dir(out_dir);
  auto curve = open_out(fs::path(out_dir) / "curve.jsonl");
  auto result = learner::train(spec, cfg, [&](const learner::EpisodeStats& s) {
    nlohmann::ordered_json j;
    j["episode"] = s.episode;
    j["total_reward"] = s.total_reward;
    j["env_return"] = s.env_return;
    j["length"] = s.length;
    j["terminal_cause"] = runtime::to_string(s.cause);
    curve << j.dump() << '\n';
  });
  {
    auto q = open_out(fs::path(out_dir) / "qtable.txt");
    result.model.save(q);
  }
  auto summary = learner::evaluate_greedy(spec, result.model, cfg.eval_episodes, cfg.eval_seed);
  std::cout << "trained " << cfg.episodes << " episodes, " << result.model.table.size() << " table entries\n";
  std::cout << "greedy evaluation over " << summary.episodes << " episodes:\n";
  std::cout << "  mean reward " << fmt(summary.env_return.mean) << " +- " << fmt(summary.env_return.std)
            << " (environment reward)\n";
  std::cout << "  mean machine reward " << fmt(summary.reward.mean) << " +- " << fmt(summary.reward.std) << '\n';
  std::cout << "  mean length " << fmt(summary.length.mean) << " +- " << fmt(summary.length.std) << '\n';
  std::cout << "  env-terminal rate " << fmt(summary.env_terminal_rate) << '\n';
  return kOk;
}

// ---- eval ----------------------------------------------------------------

int cmd_eval(const std::string& spec_path, const std::string& traces_dir, const std::string& out_dir) {
  auto spec = runtime::load_task_spec_file(spec_path);
  if (!fs::is_directory(traces_dir)) throw ValidationFailure("'" + traces_dir + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(traces_dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ValidationFailure("no .csv traces in '" + traces_dir + "'");
  if (spec.eval_formulas.empty()) throw ValidationFailure("spec declares no evaluation formulas");

  struct Tally {
    std::size_t satisfied = 0, boundary = 0, truncated = 0;
    double sum = 0, min = 1e300, max = -1e300;
  };
  std::vector<Tally> tally(spec.eval_formulas.size());
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot read '" + file.string() + "'");
    runtime::CsvTable table;
    try {
      table = runtime::read_csv(in);
    } catch (const Error& e) {
      throw Error(file.string() + ": " + e.what());
    }
    if (table.rows.empty()) throw Error(file.string() + ": empty trace");
    auto results = runtime::eval_signal(spec, runtime::signal_from_csv(table, spec.variables));
    for (std::size_t i = 0; i < results.size(); ++i) {
      auto& t = tally[i];
      t.satisfied += results[i].satisfied;
      t.boundary += results[i].boundary;
      t.truncated += results[i].truncated;
      t.sum += results[i].robustness;
      t.min = std::min(t.min, results[i].robustness);
      t.max = std::max(t.max, results[i].robustness);
    }
  }
  const double n = static_cast<double>(files.size());
  nlohmann::ordered_json j;
  j["traces"] = files.size();
  std::ostringstream csv;
  csv << "formula,satisfaction_rate,mean_robustness,min_robustness,max_robustness,boundary,truncated\n";
  std::cout << files.size() << " traces\n";
  for (std::size_t i = 0; i < tally.size(); ++i) {
    const auto& name = spec.formulas[spec.eval_formulas[i]].name;
    const auto& t = tally[i];
    j["formulas"][name] = {{"satisfaction_rate", t.satisfied / n}, {"mean_robustness", t.sum / n},
                           {"min_robustness", t.min},          {"max_robustness", t.max},
                           {"boundary", t.boundary},           {"truncated", t.truncated}};
    csv << name << ',' << fmt(t.satisfied / n) << ',' << fmt(t.sum / n) << ',' << fmt(t.min) << ',' << fmt(t.max)
        << ',' << t.boundary << ',' << t.truncated << '\n';
    std::cout << "  " << name << ": satisfied " << t.satisfied << "/" << files.size() << ", mean robustness "
              << fmt(t.sum / n);
    if (t.truncated) std::cout << ", " << t.truncated << " truncated-horizon";
    if (t.boundary) std::cout << ", " << t.boundary << " at robustness 0";
    std::cout << '\n';
  }
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    open_out(fs::path(out_dir) / "eval.json") << j.dump(2) << '\n';
    open_out(fs::path(out_dir) / "eval.csv") << csv.str();
  } else {
    std::cout << j.dump(2) << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RM-STL toolkit: STL-monitored reward machines over simulated environments"};
  app.require_subcommand(1);

  std::string spec, trace, policy = "random", out, config, traces;
  std::vector<std::string> formulas;
  std::int64_t at = 0, episodes = 1;
  std::uint64_t seed = 0;

  auto* check = app.add_subcommand("check", "Validate a task spec and report its contents");
  check->add_option("spec", spec, "Task spec file")->required();

  auto* mon = app.add_subcommand("monitor", "Replay a trace CSV and print robustness intervals per prefix");
  mon->add_option("spec", spec, "Task spec file")->required();
  mon->add_option("trace", trace, "Trace CSV")->required();
  mon->add_option("--formula,-f", formulas, "Formula names (default: all)");
  mon->add_option("--at", at, "Evaluation step");
  mon->add_option("--out", out, "Write the interval table here instead of stdout");

  auto* run = app.add_subcommand("run", "Run episodes and write traces and metrics");
  run->add_option("spec", spec, "Task spec file")->required();
  run->add_option("--policy", policy, "random | const:<a> | scripted:<name> | qtable:<path>");
  run->add_option("--episodes", episodes, "Number of episodes");
  run->add_option("--seed", seed, "First episode seed (RMSTL_SEED overrides)");
  run->add_option("--out", out, "Output directory")->required();

  auto* train = app.add_subcommand("train", "Tabular Q-learning; writes curve.jsonl and qtable.txt");
  train->add_option("spec", spec, "Task spec file")->required();
  train->add_option("--config", config, "Learner config file");
  auto* train_seed = train->add_option("--seed", seed, "Learner seed (RMSTL_SEED overrides)");
  train->add_option("--out", out, "Output directory")->required();

  auto* ev = app.add_subcommand("eval", "Evaluate formulas over a directory of trace CSVs");
  ev->add_option("spec", spec, "Task spec file")->required();
  ev->add_option("traces", traces, "Directory of trace CSVs")->required();
  ev->add_option("--out", out, "Write eval.json and eval.csv here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*check) return cmd_check(spec);
    if (*mon) return cmd_monitor(spec, trace, formulas, at, out);
    if (*run) return cmd_run(spec, policy, episodes, seed, out);
    if (*train) return cmd_train(spec, config, out, seed, train_seed->count() > 0);
    if (*ev) return cmd_eval(spec, traces, out);
  } catch (const SpecValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ValidationFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}
