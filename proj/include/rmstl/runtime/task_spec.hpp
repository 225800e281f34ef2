#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rmstl/config/document.hpp"
#include "rmstl/env/registry.hpp"
#include "rmstl/monitor/atoms.hpp"
#include "rmstl/rm/machine.hpp"
#include "rmstl/stl/parser.hpp"

namespace rmstl::runtime {

enum class FormulaRole { Event, Eval };

struct FormulaSpec {
  std::string name;
  std::string text;
  stl::Formula formula;
  FormulaRole role = FormulaRole::Event;
  monitor::AtomKind kind = monitor::AtomKind::LowerAtLeast;
  double beta = 0.0;
  monitor::EvalMode mode = monitor::EvalMode::SlidingWindow;
  std::int64_t horizon = 0;
  int line = 0;
};

/// Validated task: environment, signal variables, formulas, machines and
/// observation augmentation.
struct TaskSpec {
  std::string source;
  std::string env_id;
  env::EnvParams env_params;
  /// Maximum number of actions per episode.
  std::int64_t horizon = 1500;

  stl::VariableTable variables;
  /// Observation component feeding each variable.
  std::vector<std::size_t> variable_source;

  std::map<std::string, double, std::less<>> params;
  std::vector<FormulaSpec> formulas;

  /// Event formulas, in declaration order, as guard atoms.
  std::vector<monitor::PredicateAtom> atoms;
  std::vector<std::string> atom_names;
  /// Indices into `formulas` of role-eval formulas.
  std::vector<std::size_t> eval_formulas;

  std::vector<rm::RewardMachine> machines;

  /// Atom indices whose lower robustness bound is appended to the observation.
  std::vector<std::size_t> augment_atoms;
  double augment_clip = 10.0;

  std::vector<std::string> warnings;

  std::unique_ptr<env::Environment> make_environment() const { return env::make_environment(env_id, env_params); }

  const FormulaSpec* find_formula(std::string_view name) const {
    for (const auto& f : formulas)
      if (f.name == name) return &f;
    return nullptr;
  }
};

namespace detail {

inline void check_keys(const config::Document& doc, const config::Table& t,
                       std::initializer_list<std::string_view> allowed) {
  for (const auto& [k, v] : t.entries) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == k;
    if (!ok) doc.fail(v.line, "unknown key '" + k + "' in [" + t.name + "]");
  }
}

inline void check_keys(const config::Document& doc, const config::Entries& e, std::string_view where,
                       std::initializer_list<std::string_view> allowed) {
  for (const auto& [k, v] : e) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == k;
    if (!ok) doc.fail(v.line, "unknown key '" + k + "' in " + std::string(where));
  }
}

inline const config::Value* find(const config::Entries& e, std::string_view key) {
  for (const auto& [k, v] : e)
    if (k == key) return &v;
  return nullptr;
}

inline std::vector<std::string> string_list(const config::Document& doc, const config::Value& v,
                                            std::string_view what) {
  std::vector<std::string> out;
  for (const auto& item : doc.array(v, what)) out.push_back(doc.string(item, what));
  return out;
}

inline void load_env(const config::Document& doc, TaskSpec& spec) {
  const auto* t = doc.find("env");
  if (!t) doc.fail(1, "missing [env] section");
  const auto* id = t->find("id");
  if (!id) doc.fail(t->line, "[env] needs an 'id'");
  spec.env_id = doc.string(*id, "env.id");
  for (const auto& [k, v] : t->entries) {
    if (k == "id") continue;
    if (k == "horizon") {
      spec.horizon = doc.integer(v, "env.horizon");
      if (spec.horizon < 1) doc.fail(v.line, "env.horizon must be positive");
      continue;
    }
    spec.env_params.emplace(k, doc.number(v, "env." + k));
  }
  try {
    spec.make_environment();
  } catch (const Error& e) {
    doc.fail(t->line, e.what());
  }
}

inline void load_signals(const config::Document& doc, TaskSpec& spec, const env::Environment& env) {
  const auto* t = doc.find("signals");
  if (!t) doc.fail(1, "missing [signals] section");
  for (const auto& [name, v] : t->entries) {
    if (!env.has_observation(name))
      doc.fail(v.line, "environment '" + spec.env_id + "' does not produce a variable named '" + name + "'");
    double lo = -stl::kDefaultBound, hi = stl::kDefaultBound;
    const auto& arr = doc.array(v, "signal bounds");
    if (arr.size() == 2) {
      lo = doc.number(arr[0], "signal lower bound");
      hi = doc.number(arr[1], "signal upper bound");
    } else if (!arr.empty()) {
      doc.fail(v.line, "signal bounds must be [lo, hi] or [] for the defaults");
    }
    try {
      spec.variables.add(name, lo, hi);
    } catch (const Error& e) {
      doc.fail(v.line, e.what());
    }
    spec.variable_source.push_back(env.observation_index(name));
  }
  if (spec.variables.empty()) doc.fail(t->line, "[signals] declares no variables");
}

inline void load_params(const config::Document& doc, TaskSpec& spec) {
  const auto* t = doc.find("params");
  if (!t) return;
  for (const auto& [k, v] : t->entries) spec.params.emplace(k, doc.number(v, "param " + k));
}

inline void load_formulas(const config::Document& doc, TaskSpec& spec) {
  const auto* t = doc.find("formulas");
  if (!t) return;
  stl::FormulaDefinitions defs;
  for (const auto& [name, v] : t->entries) {
    FormulaSpec f;
    f.name = name;
    f.line = v.line;
    if (spec.variables.find(name)) doc.fail(v.line, "formula name '" + name + "' shadows a signal variable");
    if (v.is_string()) {
      f.text = doc.string(v, "formula");
    } else {
      const auto& e = doc.table(v, "formula '" + name + "'");
      check_keys(doc, e, "formula '" + name + "'", {"text", "role", "kind", "beta", "mode"});
      const auto* text = find(e, "text");
      if (!text) doc.fail(v.line, "formula '" + name + "' needs a 'text'");
      f.text = doc.string(*text, "formula text");
      if (const auto* r = find(e, "role")) {
        const auto& s = doc.string(*r, "role");
        if (s == "event") f.role = FormulaRole::Event;
        else if (s == "eval") f.role = FormulaRole::Eval;
        else doc.fail(r->line, "role must be \"event\" or \"eval\"");
      }
      if (const auto* k = find(e, "kind")) {
        const auto& s = doc.string(*k, "kind");
        if (s == "lower") f.kind = monitor::AtomKind::LowerAtLeast;
        else if (s == "upper") f.kind = monitor::AtomKind::UpperAtMost;
        else doc.fail(k->line, "kind must be \"lower\" or \"upper\"");
      }
      if (const auto* b = find(e, "beta")) f.beta = doc.number(*b, "beta");
      if (const auto* m = find(e, "mode")) {
        const auto& s = doc.string(*m, "mode");
        if (s == "sliding") f.mode = monitor::EvalMode::SlidingWindow;
        else if (s == "origin") f.mode = monitor::EvalMode::AtOrigin;
        else doc.fail(m->line, "mode must be \"sliding\" or \"origin\"");
      }
    }
    try {
      f.formula = stl::parse_formula(f.text, spec.variables, &defs);
      // Equality predicates are rejected here rather than mid-episode.
      monitor::rob_interval(f.formula, stl::Signal(spec.variables), 0);
    } catch (const Error& e) {
      doc.fail(v.line, "formula '" + name + "': " + e.what());
    }
    f.horizon = stl::formula_horizon(f.formula);
    defs.emplace(name, f.formula);
    if (f.role == FormulaRole::Event) {
      spec.atoms.push_back(monitor::PredicateAtom::make(name, f.formula, f.kind, f.beta, f.mode));
      spec.atom_names.push_back(name);
    } else {
      spec.eval_formulas.push_back(spec.formulas.size());
    }
    spec.formulas.push_back(std::move(f));
  }
}

inline rm::RewardSpec reward_spec(const config::Document& doc, const TaskSpec& spec, const config::Value& v) {
  if (v.is_number()) return rm::RewardSpec::constant(doc.number(v, "reward"));
  const auto& s = doc.string(v, "reward");
  if (s == "env") return rm::RewardSpec::env();
  auto it = spec.params.find(s);
  if (it == spec.params.end()) doc.fail(v.line, "reward '" + s + "' is neither a number, \"env\", nor a [params] entry");
  return rm::RewardSpec::constant(it->second);
}

inline void load_machines(const config::Document& doc, TaskSpec& spec) {
  for (const auto& t : doc.tables) {
    if (!t.name.starts_with("machine.")) continue;
    check_keys(doc, t, {"states", "initial", "terminal", "weight", "transitions"});
    rm::MachineDefinition def;
    def.name = t.name.substr(8);
    if (def.name.empty()) doc.fail(t.line, "machine section needs a name: [machine.<name>]");
    const auto* states = t.find("states");
    if (!states) doc.fail(t.line, "machine '" + def.name + "' needs 'states'");
    def.states = string_list(doc, *states, "states");
    if (const auto* i = t.find("initial")) def.initial = doc.string(*i, "initial");
    if (const auto* term = t.find("terminal")) def.terminal = string_list(doc, *term, "terminal");
    if (const auto* w = t.find("weight")) def.weight = doc.number(*w, "weight");
    int line = t.line;
    if (const auto* tr = t.find("transitions")) {
      line = tr->line;
      for (const auto& row : doc.array(*tr, "transitions")) {
        const auto& cells = doc.array(row, "transition");
        if (cells.size() != 4) doc.fail(row.line, "transition must be [from, guard, to, reward]");
        def.transitions.push_back({doc.string(cells[0], "transition source"), doc.string(cells[1], "guard"),
                                   doc.string(cells[2], "transition target"), reward_spec(doc, spec, cells[3])});
      }
    }
    for (const auto& m : spec.machines)
      if (m.name() == def.name) doc.fail(t.line, "duplicate machine '" + def.name + "'");
    try {
      spec.machines.push_back(rm::load_machine(def, spec.atom_names));
    } catch (const Error& e) {
      doc.fail(line, "machine '" + def.name + "': " + e.what());
    }
    for (auto& w : spec.machines.back().overlap_warnings(spec.atom_names)) spec.warnings.push_back(std::move(w));
  }
}

inline void load_augment(const config::Document& doc, TaskSpec& spec) {
  const auto* t = doc.find("augment");
  if (!t) return;
  check_keys(doc, *t, {"robustness", "clip"});
  if (const auto* r = t->find("robustness")) {
    for (const auto& item : doc.array(*r, "augment.robustness")) {
      const auto& name = doc.string(item, "augment.robustness");
      auto it = std::find(spec.atom_names.begin(), spec.atom_names.end(), name);
      if (it == spec.atom_names.end()) doc.fail(item.line, "augment.robustness: '" + name + "' is not an event formula");
      spec.augment_atoms.push_back(static_cast<std::size_t>(it - spec.atom_names.begin()));
    }
  }
  if (const auto* c = t->find("clip")) {
    spec.augment_clip = doc.number(*c, "augment.clip");
    if (!(spec.augment_clip > 0)) doc.fail(c->line, "augment.clip must be positive");
  }
}

}  // namespace detail

/// Builds a TaskSpec from a parsed document. Every error is a
/// SpecValidationError whose message starts with "<source>:<line>:".
inline TaskSpec load_task_spec(const config::Document& doc) {
  for (const auto& t : doc.tables) {
    if (t.name.empty()) {
      if (!t.entries.empty()) doc.fail(t.entries.front().second.line, "key outside of any section");
      continue;
    }
    if (t.name != "env" && t.name != "signals" && t.name != "params" && t.name != "formulas" &&
        t.name != "augment" && !t.name.starts_with("machine."))
      doc.fail(t.line, "unknown section [" + t.name + "]");
  }
  TaskSpec spec;
  spec.source = doc.source;
  detail::load_env(doc, spec);
  auto env = spec.make_environment();
  detail::load_signals(doc, spec, *env);
  detail::load_params(doc, spec);
  detail::load_formulas(doc, spec);
  detail::load_machines(doc, spec);
  detail::load_augment(doc, spec);
  return spec;
}

inline TaskSpec load_task_spec(std::string_view text, std::string source) {
  return load_task_spec(config::parse_document(text, std::move(source)));
}

inline TaskSpec load_task_spec_file(const std::string& path) {
  std::string text;
  try {
    text = config::read_file(path);
  } catch (const Error& e) {
    throw SpecValidationError(e.what());
  }
  return load_task_spec(text, path);
}

}  // namespace rmstl::runtime
