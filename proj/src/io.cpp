#include "duffgrape/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace duffgrape::io {

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::ios_base::failure("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) { write_text(path, doc.dump(2) + "\n"); }

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

void write_pulse_csv(const std::filesystem::path& path, const ControlPulse& pulse) {
  std::ostringstream os;
  os << "t,f\n";
  for (int j = 0; j < pulse.n_slices(); ++j)
    os << csv_number(pulse.slice_time(j)) << ',' << csv_number(pulse.amplitudes[j]) << '\n';
  write_text(path, os.str());
}

void write_populations_csv(const std::filesystem::path& path, const ControlPulse& pulse,
                           const Eigen::MatrixXd& populations) {
  std::ostringstream os;
  os << 't';
  for (Eigen::Index k = 0; k < populations.cols(); ++k) os << ",pop_" << k;
  os << '\n';
  for (Eigen::Index j = 0; j < populations.rows(); ++j) {
    os << csv_number(static_cast<double>(j) * pulse.slice_width());
    for (Eigen::Index k = 0; k < populations.cols(); ++k) os << ',' << csv_number(populations(j, k));
    os << '\n';
  }
  write_text(path, os.str());
}

void write_spectrum_csv(const std::filesystem::path& path, const PulseSpectrum& spectrum) {
  std::ostringstream os;
  os << "frequency,real_coeff,imag_coeff,magnitude\n";
  for (std::size_t k = 0; k < spectrum.frequencies.size(); ++k)
    os << csv_number(spectrum.frequencies[k]) << ',' << csv_number(spectrum.real_coeffs[k]) << ','
       << csv_number(spectrum.imag_coeffs[k]) << ',' << csv_number(spectrum.magnitude(k)) << '\n';
  write_text(path, os.str());
}

void write_scaling_csv(const std::filesystem::path& path, const ScalingCurve& curve) {
  std::ostringstream os;
  os << "delta,t_min,fidelity_achieved,restarts_used\n";
  for (const auto& p : curve.points) {
    if (!p.ok) continue;
    os << csv_number(p.delta) << ',' << csv_number(p.t_min) << ',' << csv_number(p.fidelity) << ','
       << p.restarts_used << '\n';
  }
  write_text(path, os.str());
}

nlohmann::json to_json(const OscillatorSpec& spec) {
  return {{"delta", spec.delta},
          {"omega0", spec.omega0},
          {"levels", spec.levels},
          {"buffer_levels", spec.buffer_levels},
          {"basis_levels", spec.basis_levels}};
}

nlohmann::json to_json(const GrapeConfig& c) {
  return {{"initial_level", c.initial_level},
          {"target_level", c.target_level},
          {"total_time", c.total_time},
          {"n_slices", c.n_slices},
          {"fidelity_goal", c.fidelity_goal},
          {"max_iterations", c.max_iterations},
          {"step_size", c.step_size},
          {"momentum", c.momentum},
          {"escape_boost_iters", c.escape_boost_iters},
          {"patience", c.patience},
          {"stall_tolerance", c.stall_tolerance},
          {"max_stalled_boosts", c.max_stalled_boosts},
          {"restarts", c.restarts},
          {"seed", c.seed}};
}

nlohmann::json to_json(const ControlPulse& pulse) {
  return {{"total_time", pulse.total_time},
          {"n_slices", pulse.n_slices()},
          {"slice_width", pulse.slice_width()},
          {"amplitudes", pulse.amplitudes}};
}

nlohmann::json to_json(const FitResult& fit) {
  return {{"exponent", fit.slope}, {"amplitude", fit.amplitude}, {"ci95", fit.ci95}, {"r2", fit.r2},
          {"n_points", fit.n_points}};
}

nlohmann::json to_json(const PulseSpectrum& spectrum) {
  nlohmann::json peaks = nlohmann::json::array();
  for (const auto& p : spectrum.peaks) {
    nlohmann::json peak = {{"frequency", p.frequency}, {"magnitude", p.magnitude}};
    if (p.nearest_transition >= 0) {
      peak["label"] = "w" + std::to_string(p.nearest_transition + 1) + std::to_string(p.nearest_transition);
      peak["label_frequency"] = p.label_frequency;
    }
    peaks.push_back(peak);
  }
  return {{"resolution", spectrum.resolution()}, {"peaks", peaks}};
}

nlohmann::json to_json(const GrapeResult& result, const GrapeConfig& config, const OscillatorSpec& spec) {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& h : result.history) history.push_back({h.fidelity, h.gradient_max, h.step});
  return {{"spec", to_json(spec)},
          {"config", to_json(config)},
          {"fidelity", result.fidelity},
          {"converged", result.converged},
          {"iterations_used", result.iterations_used},
          {"attempts", result.attempts},
          {"boosts_applied", result.boosts_applied},
          {"pulse", to_json(result.pulse)},
          {"history_columns", {"fidelity", "gradient_max", "step"}},
          {"history", history}};
}

OscillatorSpec spec_from_json(const nlohmann::json& j) {
  OscillatorSpec s;
  s.delta = j.at("delta").get<double>();
  s.omega0 = j.at("omega0").get<double>();
  s.levels = j.at("levels").get<int>();
  s.buffer_levels = j.at("buffer_levels").get<int>();
  s.basis_levels = j.at("basis_levels").get<int>();
  return s;
}

ControlPulse pulse_from_json(const nlohmann::json& j) {
  ControlPulse p;
  p.total_time = j.at("total_time").get<double>();
  p.amplitudes = j.at("amplitudes").get<std::vector<double>>();
  validate(p);
  return p;
}

double replay_result(const std::filesystem::path& result_json) {
  const nlohmann::json doc = read_json(result_json);
  const OscillatorSpec spec = spec_from_json(doc.at("spec"));
  const ControlPulse pulse = pulse_from_json(doc.at("pulse"));
  const LevelPair pair{doc.at("config").at("initial_level").get<int>(),
                       doc.at("config").at("target_level").get<int>()};
  return transfer_fidelity(build_model(spec), pulse, pair);
}

}  // namespace duffgrape::io
