#include "duffgrape/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <regex>
#include <stdexcept>
#include <thread>

namespace duffgrape {

namespace {

constexpr std::uint64_t kProbeSeedStride = 1000003;

// Parallel-for over [0, count) with a static number of workers; each index is
// processed exactly once and writes only its own slot.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

OscillatorSpec with_delta(OscillatorSpec spec, double delta) {
  spec.delta = delta;
  return spec;
}

}  // namespace

std::string LevelPair::label() const { return std::to_string(initial) + "-" + std::to_string(target); }

LevelPair LevelPair::parse(const std::string& text) {
  static const std::regex separated(R"(^\s*(\d+)\s*(?:->|-|_)\s*(\d+)\s*$)");
  static const std::regex packed(R"(^\s*(\d)(\d)\s*$)");
  std::smatch m;
  if (!std::regex_match(text, m, separated) && !std::regex_match(text, m, packed))
    throw std::invalid_argument("transition: cannot parse '" + text + "', expected e.g. 0-1");
  return LevelPair{std::stoi(m[1].str()), std::stoi(m[2].str())};
}

int SlicePolicy::slices_for(double total_time) const {
  if (!(total_time > 0.0)) throw std::invalid_argument("slice policy: duration must be positive");
  return std::max(min_slices, static_cast<int>(std::ceil(total_time / max_slice_width - 1e-9)));
}

GrapeConfig default_grape_settings() {
  GrapeConfig c;
  c.step_size = 0.05;
  c.momentum = 0.95;
  c.max_iterations = 3000;
  c.restarts = 3;
  return c;
}

ControlPulse rescale_pulse(const ControlPulse& pulse, double total_time, int n_slices) {
  validate(pulse);
  ControlPulse out = ControlPulse::zeros(total_time, n_slices);
  const double gain = pulse.total_time / total_time;
  for (int j = 0; j < n_slices; ++j) {
    const double s = (j + 0.5) / n_slices;
    const int src = std::min(pulse.n_slices() - 1, static_cast<int>(s * pulse.n_slices()));
    out.amplitudes[j] = gain * pulse.amplitudes[src];
  }
  return out;
}

ControlPulse zero_pad_pulse(const ControlPulse& pulse, double total_time, int n_slices) {
  validate(pulse);
  if (total_time < pulse.total_time) throw std::invalid_argument("zero_pad_pulse: new duration is shorter");
  ControlPulse out = ControlPulse::zeros(total_time, n_slices);
  const double width = total_time / n_slices;
  for (int j = 0; j < n_slices; ++j) {
    const double t = (j + 0.5) * width;
    if (t >= pulse.total_time) break;
    out.amplitudes[j] = pulse.amplitudes[static_cast<int>(t / pulse.slice_width())];
  }
  return out;
}

double default_preparation_time(int target_level) {
  static const std::map<int, double> times{{0, 10.0}, {1, 50.0}, {2, 115.0}, {3, 150.0}};
  const auto it = times.find(target_level);
  return it != times.end() ? it->second : 50.0 * target_level;
}

PreparationRun prepare_fock(const OscillatorSpec& spec, int target_level, double total_time, int n_slices,
                            std::uint64_t seed, const GrapeConfig& settings) {
  const ModelMatrices model = build_model(spec);
  GrapeConfig cfg = settings;
  cfg.initial_level = 0;
  cfg.target_level = target_level;
  cfg.total_time = total_time;
  cfg.n_slices = n_slices;
  cfg.seed = seed;
  PreparationRun run;
  run.result = optimize(cfg, spec, model);
  run.trajectory = propagate(model, run.result.pulse, fock_state(model, 0));
  run.populations = populations(model, run.trajectory);
  const int labels = std::max(1, std::min(target_level + 1, spec.levels - 2));
  run.spectrum = pulse_spectrum(run.result.pulse, transition_frequencies(spec, labels));
  return run;
}

double transfer_fidelity(const ModelMatrices& model, const ControlPulse& pulse, const LevelPair& pair) {
  return fidelity(propagate_final(model, pulse, fock_state(model, pair.initial)), fock_state(model, pair.target));
}

double truncation_check(const OscillatorSpec& spec, const ControlPulse& pulse, const LevelPair& pair,
                        const std::vector<int>& dims) {
  std::vector<double> fids;
  for (int d : dims) {
    if (d <= pair.target || d <= pair.initial)
      throw std::invalid_argument("truncation_check: dimension " + std::to_string(d) + " does not contain the states");
    OscillatorSpec s = spec;
    s.levels = d;
    fids.push_back(transfer_fidelity(build_model(s), pulse, pair));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < fids.size(); ++i)
    for (std::size_t j = i + 1; j < fids.size(); ++j) worst = std::max(worst, std::abs(fids[i] - fids[j]));
  return worst;
}

MinimalTimeResult minimal_time(const OscillatorSpec& spec, const LevelPair& pair, const MinimalTimeOptions& options,
                               std::uint64_t seed) {
  if (!(options.t_lo > 0.0) || !(options.t_hi > options.t_lo))
    throw std::invalid_argument("minimal_time: bracket must satisfy 0 < t_lo < t_hi");
  MinimalTimeResult out;
  if (options.fidelity_goal <= 0.0) {
    out.t_min = options.t_lo;
    return out;
  }
  const ModelMatrices model = build_model(spec);

  ControlPulse best_pulse;  // pulse at the current upper bracket
  bool have_success = false;
  std::uint64_t probe_index = 0;

  auto probe = [&](double t) {
    GrapeConfig cfg = options.grape;
    cfg.initial_level = pair.initial;
    cfg.target_level = pair.target;
    cfg.total_time = t;
    cfg.n_slices = options.slices.slices_for(t);
    cfg.fidelity_goal = options.fidelity_goal;
    cfg.seed = seed + kProbeSeedStride * probe_index++;
    GrapeResult r = optimize(cfg, spec, model);
    int restarts = r.attempts - 1;
    if (!r.converged && have_success) {
      GrapeConfig warm = cfg;
      warm.restarts = 0;
      GrapeResult w = optimize(warm, spec, model, rescale_pulse(best_pulse, t, cfg.n_slices));
      restarts += w.attempts;
      if (w.fidelity > r.fidelity) r = std::move(w);
    }
    out.probes.push_back({t, r.fidelity, r.converged});
    if (r.converged) {
      best_pulse = r.pulse;
      have_success = true;
      out.t_min = t;
      out.fidelity = r.fidelity;
      out.restarts_used = restarts;
      out.pulse = r.pulse;
    }
    return r.converged;
  };

  double lo = options.t_lo;
  double hi = options.t_hi;
  int expansions = 0;
  while (!probe(hi)) {
    if (++expansions > options.max_expansions)
      throw std::runtime_error("minimal_time: no success up to T = " + std::to_string(hi) + " for " + pair.label() +
                               " at delta = " + std::to_string(spec.delta));
    lo = hi;
    hi *= 2.0;
  }
  while (probe(lo)) {
    if (++expansions > options.max_expansions)
      throw std::runtime_error("minimal_time: optimization succeeds down to T = " + std::to_string(lo));
    hi = lo;
    lo *= 0.5;
  }
  while (hi - lo > options.time_tolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid))
      hi = mid;
    else
      lo = mid;
  }
  return out;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw std::invalid_argument("log_spaced: invalid range");
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    if (count == 1) {
      out.push_back(lo);
      break;
    }
    out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  }
  out.back() = hi;
  return out;
}

ScalingCurve run_sweep(const std::vector<double>& deltas, const std::string& label, double fidelity_goal,
                       double tolerance, const ScalingCell& cell, int jobs) {
  std::vector<double> sorted = deltas;
  std::sort(sorted.begin(), sorted.end());
  ScalingCurve curve;
  curve.transition = label;
  curve.fidelity_goal = fidelity_goal;
  curve.search_tolerance = tolerance;
  curve.points.resize(sorted.size());
  parallel_for(sorted.size(), jobs, [&](std::size_t i) {
    try {
      curve.points[i] = cell(sorted[i]);
    } catch (const std::exception& e) {
      curve.points[i] = ScalingPoint{sorted[i], 0.0, 0.0, 0, false, e.what()};
    }
    curve.points[i].delta = sorted[i];
  });
  std::vector<std::pair<double, double>> ok;
  for (const auto& p : curve.points)
    if (p.ok) ok.emplace_back(p.delta, p.t_min);
  if (ok.size() >= 3) {
    curve.fit = fit_power_law(ok);
    curve.fit_valid = true;
  }
  return curve;
}

ScalingCurve scaling_sweep(const OscillatorSpec& base, const std::vector<double>& deltas, const LevelPair& pair,
                           const MinimalTimeOptions& options, std::uint64_t seed, int jobs) {
  if (deltas.size() < 3) throw std::invalid_argument("scaling_sweep: need at least 3 delta values");
  return run_sweep(
      deltas, pair.label(), options.fidelity_goal, options.time_tolerance,
      [&](double delta) {
        const MinimalTimeResult r = minimal_time(with_delta(base, delta), pair, options, seed);
        return ScalingPoint{delta, r.t_min, r.fidelity, r.restarts_used, true, {}};
      },
      jobs);
}

ControlPulse rabi_pulse(const ModelMatrices& model, double total_time, int n_slices) {
  const double w10 = model.energies(1) - model.energies(0);
  const double coupling = std::abs(model.control(1, 0));
  const double amp = std::numbers::pi / (total_time * coupling);
  ControlPulse p = ControlPulse::zeros(total_time, n_slices);
  for (int j = 0; j < n_slices; ++j) p.amplitudes[j] = amp * std::cos(w10 * p.slice_time(j));
  return p;
}

BaselineResult rabi_baseline(const OscillatorSpec& spec, const BaselineOptions& options) {
  const ModelMatrices model = build_model(spec);
  const Eigen::VectorXcd psi0 = fock_state(model, 0);
  const Eigen::VectorXcd psi1 = fock_state(model, 1);
  const double goal_error = 1.0 - options.fidelity_goal;

  BaselineResult best{spec.delta, 0.0, 1.0, 0.0};
  auto probe = [&](double t) {
    const Eigen::VectorXcd out = propagate_final(model, rabi_pulse(model, t, options.slices.slices_for(t)), psi0);
    const double err = 1.0 - fidelity(out, psi1);
    if (err <= goal_error) {
      const double in_subspace = std::norm(psi0.dot(out)) + std::norm(psi1.dot(out));
      best = {spec.delta, t, err, std::clamp(1.0 - in_subspace, 0.0, 1.0)};
      return true;
    }
    return false;
  };

  double hi = options.t_start;
  int doublings = 0;
  while (!probe(hi)) {
    if (++doublings > options.max_doublings)
      throw std::runtime_error("rabi_baseline: goal not reached up to T = " + std::to_string(hi));
    hi *= 2.0;
  }
  double lo = hi * 0.5;
  if (doublings == 0) lo = 0.0;
  while (hi - lo > options.time_tolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid))
      hi = mid;
    else
      lo = mid;
  }
  probe(hi);
  return best;
}

BaselineSweep rabi_baseline_sweep(const OscillatorSpec& base, const std::vector<double>& deltas,
                                  const BaselineOptions& options, int jobs) {
  if (deltas.size() < 3) throw std::invalid_argument("rabi_baseline_sweep: need at least 3 delta values");
  std::vector<double> sorted = deltas;
  std::sort(sorted.begin(), sorted.end());
  BaselineSweep sweep;
  sweep.results.resize(sorted.size());
  parallel_for(sorted.size(), jobs,
               [&](std::size_t i) { sweep.results[i] = rabi_baseline(with_delta(base, sorted[i]), options); });
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : sweep.results) pts.emplace_back(r.delta, r.pulse_time);
  sweep.fit = fit_power_law(pts);
  return sweep;
}

std::vector<ErrorPoint> error_vs_time(const OscillatorSpec& spec, const LevelPair& pair,
                                      const std::vector<double>& times, const MinimalTimeOptions& options,
                                      std::uint64_t seed) {
  std::vector<double> order = times;
  std::sort(order.begin(), order.end(), std::greater<>());
  const ModelMatrices model = build_model(spec);
  std::vector<ErrorPoint> out;
  ControlPulse previous;
  std::vector<ControlPulse> pulses;
  bool have_previous = false;
  std::uint64_t index = 0;
  for (double t : order) {
    GrapeConfig cfg = options.grape;
    cfg.initial_level = pair.initial;
    cfg.target_level = pair.target;
    cfg.total_time = t;
    cfg.n_slices = options.slices.slices_for(t);
    cfg.fidelity_goal = options.fidelity_goal;
    cfg.seed = seed + kProbeSeedStride * index++;
    GrapeResult r = optimize(cfg, spec, model);
    if (!r.converged && have_previous) {
      GrapeConfig warm = cfg;
      warm.restarts = 0;
      GrapeResult w = optimize(warm, spec, model, rescale_pulse(previous, t, cfg.n_slices));
      if (w.fidelity > r.fidelity) r = std::move(w);
    }
    previous = r.pulse;
    have_previous = true;
    out.push_back({t, std::max(1.0 - r.fidelity, 0.0), r.converged});
    pulses.push_back(std::move(r.pulse));
  }
  std::reverse(out.begin(), out.end());
  std::reverse(pulses.begin(), pulses.end());

  // A shorter pulse followed by free evolution reaches the same fidelity, so the
  // best error cannot grow with T. Points that did worse restart from the padded neighbour.
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].converged || out[i].error <= out[i - 1].error) continue;
    GrapeConfig cfg = options.grape;
    cfg.initial_level = pair.initial;
    cfg.target_level = pair.target;
    cfg.total_time = out[i].total_time;
    cfg.n_slices = options.slices.slices_for(cfg.total_time);
    cfg.fidelity_goal = options.fidelity_goal;
    cfg.seed = seed + kProbeSeedStride * index++;
    cfg.restarts = 0;
    GrapeResult w = optimize(cfg, spec, model, zero_pad_pulse(pulses[i - 1], cfg.total_time, cfg.n_slices));
    const double err = std::max(1.0 - w.fidelity, 0.0);
    if (err < out[i].error) {
      out[i].error = err;
      out[i].converged = w.converged;
      pulses[i] = std::move(w.pulse);
    }
  }
  return out;
}

}  // namespace duffgrape
