#include "duffgrape/jobs.hpp"

#include <sstream>

#include "duffgrape/io.hpp"
#include "duffgrape/version.hpp"

namespace duffgrape::jobs {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json warnings_json(const OscillatorSpec& spec, const ControlPulse* pulse) {
  json w = json::array();
  for (auto& s : spec_warnings(spec)) w.push_back(s);
  if (pulse)
    for (auto& s : pulse_warnings(*pulse)) w.push_back(s);
  return w;
}

json options_json(const MinimalTimeOptions& o) {
  return {{"fidelity_goal", o.fidelity_goal},
          {"t_lo", o.t_lo},
          {"t_hi", o.t_hi},
          {"time_tolerance", o.time_tolerance},
          {"max_expansions", o.max_expansions},
          {"max_slice_width", o.slices.max_slice_width},
          {"min_slices", o.slices.min_slices},
          {"grape", io::to_json(o.grape)}};
}

}  // namespace

void write_manifest(const fs::path& dir, const std::string& command, const json& config) {
  io::write_json(dir / "manifest.json",
                 {{"tool", "duffgrape"}, {"version", kVersion}, {"command", command}, {"config", config}});
}

Outcome run_prepare(const PrepareJob& job, const fs::path& dir) {
  const PreparationRun run =
      prepare_fock(job.spec, job.target_level, job.total_time, job.n_slices, job.seed, job.grape);
  GrapeConfig cfg = job.grape;
  cfg.initial_level = 0;
  cfg.target_level = job.target_level;
  cfg.total_time = job.total_time;
  cfg.n_slices = job.n_slices;
  cfg.seed = job.seed;

  io::write_pulse_csv(dir / "pulse.csv", run.result.pulse);
  io::write_populations_csv(dir / "populations.csv", run.result.pulse, run.populations);
  io::write_spectrum_csv(dir / "spectrum.csv", run.spectrum);
  json result = io::to_json(run.result, cfg, job.spec);
  result["spectrum"] = io::to_json(run.spectrum);
  result["warnings"] = warnings_json(job.spec, &run.result.pulse);
  io::write_json(dir / "result.json", result);
  return run.result.converged ? Outcome::ok : Outcome::not_converged;
}

Outcome run_scaling(const ScalingJob& job, const fs::path& dir) {
  const ScalingCurve curve = scaling_sweep(job.spec, job.deltas, job.pair, job.options, job.seed, job.jobs);
  io::write_scaling_csv(dir / "scaling.csv", curve);
  json failures = json::array();
  for (const auto& p : curve.points)
    if (!p.ok) failures.push_back({{"delta", p.delta}, {"error", p.error}});
  json fit = curve.fit_valid ? io::to_json(curve.fit) : json(nullptr);
  io::write_json(dir / "fit.json", {{"transition", curve.transition},
                                    {"fidelity_goal", curve.fidelity_goal},
                                    {"search_tolerance", curve.search_tolerance},
                                    {"fit", fit},
                                    {"failures", failures},
                                    {"options", options_json(job.options)}});
  return curve.fit_valid ? Outcome::ok : Outcome::not_converged;
}

Outcome run_baseline(const BaselineJob& job, const fs::path& dir) {
  const BaselineSweep sweep = rabi_baseline_sweep(job.spec, job.deltas, job.options, job.jobs);
  std::ostringstream os;
  os << "delta,t_min,error,leakage\n";
  for (const auto& r : sweep.results)
    os << io::csv_number(r.delta) << ',' << io::csv_number(r.pulse_time) << ',' << io::csv_number(r.error) << ','
       << io::csv_number(r.leakage) << '\n';
  io::write_text(dir / "baseline.csv", os.str());
  io::write_json(dir / "fit.json", {{"transition", "0-1"},
                                    {"fidelity_goal", job.options.fidelity_goal},
                                    {"search_tolerance", job.options.time_tolerance},
                                    {"fit", io::to_json(sweep.fit)}});
  return Outcome::ok;
}

Outcome run_error_vs_time(const ErrorVsTimeJob& job, const fs::path& dir) {
  const auto points = error_vs_time(job.spec, job.pair, job.times, job.options, job.seed);
  std::ostringstream os;
  os << "t,error,converged\n";
  std::vector<std::pair<double, double>> short_regime;
  for (const auto& p : points) {
    os << io::csv_number(p.total_time) << ',' << io::csv_number(p.error) << ',' << (p.converged ? 1 : 0) << '\n';
    if (!p.converged && p.error > 0.0 && p.error < 1.0) short_regime.emplace_back(p.total_time, p.error);
  }
  io::write_text(dir / "error_vs_time.csv", os.str());
  json fit = nullptr;
  if (short_regime.size() >= 3) fit = io::to_json(fit_exponential_error(short_regime));
  io::write_json(dir / "fit.json", {{"transition", job.pair.label()},
                                    {"delta", job.spec.delta},
                                    {"fidelity_goal", job.options.fidelity_goal},
                                    {"fit", fit},
                                    {"options", options_json(job.options)}});
  return fit.is_null() ? Outcome::not_converged : Outcome::ok;
}

Outcome run_spectrum_check(const SpectrumCheckJob& job, const fs::path& dir) {
  std::vector<std::vector<double>> cols;
  for (double d : job.deltas) {
    OscillatorSpec s;
    s.delta = d;
    s.omega0 = job.omega0;
    cols.push_back(rwa_exact_ratio(s, job.n_max));
  }
  std::ostringstream os;
  os << 'n';
  for (double d : job.deltas) os << ",ratio_delta_" << io::csv_number(d);
  os << '\n';
  for (int n = 0; n <= job.n_max; ++n) {
    os << n;
    for (const auto& c : cols) os << ',' << io::csv_number(c[n]);
    os << '\n';
  }
  io::write_text(dir / "rwa_ratio.csv", os.str());
  return Outcome::ok;
}

}  // namespace duffgrape::jobs
