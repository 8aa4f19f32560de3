// duffgrape command-line front end. Links only against the C API.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <regex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "duffgrape/duffgrape.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNotConverged = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses "lo:hi:Nlog", "lo:hi:Nlin" or a comma-separated list.
std::vector<double> parse_grid(const std::string& text, const std::string& field) {
  static const std::regex range(R"(^\s*([-+0-9.eE]+)\s*:\s*([-+0-9.eE]+)\s*:\s*(\d+)\s*(log|lin)?\s*$)");
  std::smatch m;
  std::vector<double> out;
  try {
    if (std::regex_match(text, m, range)) {
      const double lo = std::stod(m[1].str());
      const double hi = std::stod(m[2].str());
      const int n = std::stoi(m[3].str());
      const bool log = m[4].str() != "lin";
      if (n < 1 || !(hi >= lo) || (log && !(lo > 0.0))) throw std::invalid_argument("bad range");
      for (int i = 0; i < n; ++i) {
        const double s = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        out.push_back(log ? lo * std::pow(hi / lo, s) : lo + (hi - lo) * s);
      }
      if (n > 1) out.back() = hi;
      return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("trailing text");
    }
  } catch (const std::exception&) {
    throw UsageError("field '" + field + "': cannot parse grid '" + text + "' (expected lo:hi:Nlog or a,b,c)");
  }
  if (out.empty()) throw UsageError("field '" + field + "': empty grid");
  return out;
}

std::vector<double> grid_from_json(const json& v, const std::string& field) {
  if (v.is_string()) return parse_grid(v.get<std::string>(), field);
  if (v.is_array()) {
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw UsageError("field '" + field + "': array entries must be numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  throw UsageError("field '" + field + "': expected a grid string or an array of numbers");
}

// Resolved parameter set for one subcommand: defaults, then config file, then flags.
class Settings {
 public:
  explicit Settings(json defaults) : values_(std::move(defaults)) {}

  void merge_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("config: cannot open '" + path + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw UsageError("config '" + path + "': " + e.what());
    }
    if (!doc.is_object()) throw UsageError("config '" + path + "': top level must be an object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      if (!values_.contains(it.key())) throw UsageError("config '" + path + "': unknown key '" + it.key() + "'");
      const json& def = values_[it.key()];
      const bool compatible = (def.is_number() && it.value().is_number()) ||
                              (def.is_string() && (it.value().is_string() || it.value().is_array())) ||
                              def.type() == it.value().type();
      if (!compatible)
        throw UsageError("config '" + path + "': field '" + it.key() + "' has type " + it.value().type_name() +
                         ", expected " + def.type_name());
      if (def.is_number_integer() && !it.value().is_number_integer())
        throw UsageError("config '" + path + "': field '" + it.key() + "' must be an integer");
      values_[it.key()] = it.value();
    }
  }

  void set(const std::string& key, json value) { values_[key] = std::move(value); }

  double num(const std::string& k) const { return values_.at(k).get<double>(); }
  int integer(const std::string& k) const { return values_.at(k).get<int>(); }
  std::uint64_t u64(const std::string& k) const { return values_.at(k).get<std::uint64_t>(); }
  std::string str(const std::string& k) const { return values_.at(k).get<std::string>(); }
  std::vector<double> grid(const std::string& k) const { return grid_from_json(values_.at(k), k); }
  const json& all() const { return values_; }

 private:
  json values_;
};

std::pair<int, int> parse_transition(const std::string& text) {
  static const std::regex re(R"(^\s*(\d+)\s*(?:->|-|_)\s*(\d+)\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw UsageError("field 'transition': expected e.g. 0-1, got '" + text + "'");
  return {std::stoi(m[1].str()), std::stoi(m[2].str())};
}

int exit_code(dg_status s) {
  switch (s) {
    case DG_OK:
      return kExitOk;
    case DG_NOT_CONVERGED:
      return kExitNotConverged;
    default:
      return kExitInvalid;
  }
}

int report(dg_status s, const std::string& dir) {
  if (s == DG_OK) {
    std::cout << "artifacts written to " << dir << "\n";
  } else if (s == DG_NOT_CONVERGED) {
    std::cerr << "warning: goal not reached; artifacts written to " << dir << " with converged=false\n";
  } else {
    std::cerr << "error: " << dg_last_error() << "\n";
  }
  return exit_code(s);
}

dg_oscillator oscillator_from(const Settings& s) {
  dg_oscillator o;
  dg_oscillator_default(&o);
  o.delta = s.num("delta");
  o.omega0 = s.num("omega0");
  o.levels = s.integer("levels");
  o.buffer_levels = s.integer("buffer_levels");
  o.basis_levels = s.integer("basis_levels");
  return o;
}

dg_sweep_options sweep_from(const Settings& s) {
  dg_sweep_options o;
  dg_sweep_options_default(&o);
  o.fidelity_goal = s.num("fidelity_goal");
  o.time_tolerance = s.num("tolerance");
  o.max_slice_width = s.num("max_slice_width");
  o.min_slices = s.integer("min_slices");
  o.seed = s.u64("seed");
  o.jobs = s.integer("jobs");
  if (s.all().contains("t_lo")) o.t_lo = s.num("t_lo");
  if (s.all().contains("t_hi")) o.t_hi = s.num("t_hi");
  if (s.all().contains("max_iterations")) o.max_iterations = s.integer("max_iterations");
  if (s.all().contains("restarts")) o.restarts = s.integer("restarts");
  return o;
}

json common_defaults() {
  dg_oscillator o;
  dg_oscillator_default(&o);
  return {{"delta", o.delta},   {"omega0", o.omega0}, {"levels", o.levels}, {"buffer_levels", o.buffer_levels},
          {"basis_levels", o.basis_levels},
          {"seed", std::uint64_t{1}},          {"jobs", 1},          {"output_dir", ""}};
}

json sweep_defaults(double goal) {
  dg_sweep_options s;
  dg_sweep_options_default(&s);
  json j = common_defaults();
  j.update({{"fidelity_goal", goal},
            {"tolerance", s.time_tolerance},
            {"max_slice_width", s.max_slice_width},
            {"min_slices", s.min_slices}});
  return j;
}

struct Flag {
  std::string key;
  CLI::Option* option;
  CLI::App* owner;
};

// Converts a command-line string to the JSON type of the key's default value.
json typed_value(const json& def, const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    json out;
    if (def.is_number_unsigned()) {
      out = std::stoull(text, &used);
    } else if (def.is_number_integer()) {
      out = std::stoll(text, &used);
    } else if (def.is_number()) {
      out = std::stod(text, &used);
    } else {
      return text;
    }
    if (used != text.size()) throw std::invalid_argument("trailing text");
    return out;
  } catch (const std::exception&) {
    throw UsageError("flag for '" + key + "': cannot parse '" + text + "' as " + def.type_name());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GRAPE control pulses for Fock states of a Duffing oscillator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dg_version()));

  std::map<std::string, std::string> raw;
  std::string config_path;
  std::string result_path;
  std::vector<Flag> flags;

  auto flag = [&](CLI::App* sub, const std::string& name, const std::string& key, const std::string& help) {
    flags.push_back(Flag{key, sub->add_option(name, raw[sub->get_name() + "/" + key], help), sub});
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file (flags override it)");
    flag(sub, "--delta", "delta", "anharmonicity");
    flag(sub, "--omega0", "omega0", "harmonic frequency");
    flag(sub, "--levels", "levels", "truncation dimension");
    flag(sub, "--buffer-levels", "buffer_levels", "extra levels for the quartic term");
    flag(sub, "--basis-levels", "basis_levels", "bare states diagonalized before truncation");
    flag(sub, "--seed", "seed", "random seed");
    flag(sub, "--jobs", "jobs", "worker threads for sweeps");
    flag(sub, "--output-dir", "output_dir", "artifact directory");
  };
  auto add_sweep = [&](CLI::App* sub) {
    add_common(sub);
    flag(sub, "--fidelity-goal", "fidelity_goal", "target fidelity");
    flag(sub, "--tolerance", "tolerance", "relative time resolution of the bisection");
    flag(sub, "--max-slice-width", "max_slice_width", "largest slice width");
    flag(sub, "--min-slices", "min_slices", "smallest slice count");
  };
  auto add_optimizer = [&](CLI::App* sub) {
    flag(sub, "--max-iterations", "max_iterations", "iterations per attempt");
    flag(sub, "--restarts", "restarts", "randomized restarts");
  };

  CLI::App* prepare = app.add_subcommand("prepare", "optimize a pulse preparing |target> from |0>");
  add_common(prepare);
  add_optimizer(prepare);
  flag(prepare, "--fidelity-goal", "fidelity_goal", "target fidelity");
  flag(prepare, "--target", "target", "Fock level to prepare");
  flag(prepare, "--time", "time", "pulse duration T");
  flag(prepare, "--slices", "slices", "number of slices N");

  CLI::App* scaling = app.add_subcommand("scaling", "minimal-time power law over delta");
  add_sweep(scaling);
  add_optimizer(scaling);
  flag(scaling, "--transition", "transition", "level pair, e.g. 0-1");
  flag(scaling, "--deltas", "deltas", "delta grid, lo:hi:Nlog or a,b,c");
  flag(scaling, "--t-lo", "t_lo", "initial lower time bracket");
  flag(scaling, "--t-hi", "t_hi", "initial upper time bracket");

  CLI::App* baseline = app.add_subcommand("baseline", "minimal time of an unshaped resonant pi-pulse");
  add_sweep(baseline);
  flag(baseline, "--deltas", "deltas", "delta grid, lo:hi:Nlog or a,b,c");

  CLI::App* evt = app.add_subcommand("error-vs-time", "best reachable error versus pulse duration");
  add_sweep(evt);
  add_optimizer(evt);
  flag(evt, "--transition", "transition", "level pair, e.g. 0-1");
  flag(evt, "--times", "times", "duration grid, lo:hi:Nlin or a,b,c");

  CLI::App* check = app.add_subcommand("spectrum-check", "rotating-wave versus exact eigenenergy ratios");
  flag(check, "--deltas", "deltas", "delta values");
  flag(check, "--omega0", "omega0", "harmonic frequency");
  flag(check, "--n-max", "n_max", "highest level");
  flag(check, "--output-dir", "output_dir", "artifact directory");
  check->add_option("--config", config_path, "JSON config file (flags override it)");

  CLI::App* replay = app.add_subcommand("replay", "re-propagate the pulse stored in a result.json");
  replay->add_option("result", result_path, "path to result.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInvalid;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();

    if (sub == replay) {
      double fid = 0.0;
      const dg_status s = dg_replay_result(result_path.c_str(), &fid);
      if (s != DG_OK) return report(s, "");
      std::printf("%.17g\n", fid);
      return kExitOk;
    }

    json defaults;
    if (sub == prepare) {
      defaults = common_defaults();
      dg_grape_config g;
      dg_grape_config_default(&g);
      defaults.update({{"target", 2},
                       {"time", 0.0},
                       {"slices", 201},
                       {"fidelity_goal", 0.9999},
                       {"max_iterations", 20000},
                       {"restarts", g.restarts}});
    } else if (sub == scaling) {
      defaults = sweep_defaults(0.99999);
      dg_sweep_options s;
      dg_sweep_options_default(&s);
      defaults.update({{"transition", "0-1"},
                       {"deltas", "0.05:0.3:6log"},
                       {"t_lo", s.t_lo},
                       {"t_hi", s.t_hi},
                       {"max_iterations", s.max_iterations},
                       {"restarts", s.restarts}});
    } else if (sub == baseline) {
      defaults = sweep_defaults(0.99999);
      defaults["deltas"] = "0.05:0.3:6log";
    } else if (sub == evt) {
      defaults = sweep_defaults(0.99999);
      dg_sweep_options s;
      dg_sweep_options_default(&s);
      defaults.update({{"transition", "0-1"},
                       {"times", "4:18:15lin"},
                       {"max_iterations", s.max_iterations},
                       {"restarts", s.restarts}});
    } else {
      defaults = {{"deltas", "0.01,0.1"}, {"omega0", 1.0}, {"n_max", 8}, {"output_dir", ""}};
    }

    Settings settings(defaults);
    if (!config_path.empty()) settings.merge_file(config_path);
    for (const auto& f : flags) {
      if (f.owner != sub || f.option->count() == 0) continue;
      settings.set(f.key, typed_value(defaults.at(f.key), f.key, raw.at(name + "/" + f.key)));
    }

    std::string dir = settings.str("output_dir");
    if (dir.empty()) dir = "out/" + name;
    settings.set("output_dir", dir);
    const std::string echo = settings.all().dump();

    if (sub == prepare) {
      dg_prepare_job job;
      job.oscillator = oscillator_from(settings);
      dg_grape_config_default(&job.grape);
      job.grape.target_level = settings.integer("target");
      double t = settings.num("time");
      if (t <= 0.0) {
        t = dg_default_preparation_time(job.grape.target_level);
        settings.set("time", t);
      }
      job.grape.total_time = t;
      job.grape.n_slices = settings.integer("slices");
      job.grape.fidelity_goal = settings.num("fidelity_goal");
      job.grape.max_iterations = settings.integer("max_iterations");
      job.grape.restarts = settings.integer("restarts");
      job.grape.seed = settings.u64("seed");
      const std::string resolved = settings.all().dump();
      return report(dg_run_prepare(&job, dir.c_str(), resolved.c_str()), dir);
    }
    if (sub == scaling) {
      const auto deltas = settings.grid("deltas");
      const auto [i, k] = parse_transition(settings.str("transition"));
      const dg_oscillator o = oscillator_from(settings);
      const dg_sweep_options opts = sweep_from(settings);
      return report(dg_run_scaling(&o, deltas.data(), deltas.size(), i, k, &opts, dir.c_str(), echo.c_str()), dir);
    }
    if (sub == baseline) {
      const auto deltas = settings.grid("deltas");
      const dg_oscillator o = oscillator_from(settings);
      const dg_sweep_options opts = sweep_from(settings);
      return report(dg_run_baseline(&o, deltas.data(), deltas.size(), &opts, dir.c_str(), echo.c_str()), dir);
    }
    if (sub == evt) {
      const auto times = settings.grid("times");
      const auto [i, k] = parse_transition(settings.str("transition"));
      const dg_oscillator o = oscillator_from(settings);
      const dg_sweep_options opts = sweep_from(settings);
      return report(
          dg_run_error_vs_time(&o, times.data(), times.size(), i, k, &opts, dir.c_str(), echo.c_str()), dir);
    }
    const auto deltas = settings.grid("deltas");
    return report(dg_run_spectrum_check(deltas.data(), deltas.size(), settings.num("omega0"),
                                        settings.integer("n_max"), dir.c_str(), echo.c_str()),
                  dir);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}
