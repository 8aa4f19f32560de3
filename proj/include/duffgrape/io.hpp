#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "duffgrape/analysis.hpp"
#include "duffgrape/experiments.hpp"

namespace duffgrape::io {

/// CSV numbers use 12 significant digits; JSON keeps full double precision.
std::string csv_number(double v);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

/// Columns t,f with t at slice midpoints.
void write_pulse_csv(const std::filesystem::path& path, const ControlPulse& pulse);
/// Columns t,pop_0..pop_{dim-1}; row j is the state after j slices.
void write_populations_csv(const std::filesystem::path& path, const ControlPulse& pulse,
                           const Eigen::MatrixXd& populations);
/// Columns frequency,real_coeff,imag_coeff,magnitude.
void write_spectrum_csv(const std::filesystem::path& path, const PulseSpectrum& spectrum);
/// Columns delta,t_min,fidelity_achieved,restarts_used (successful cells only).
void write_scaling_csv(const std::filesystem::path& path, const ScalingCurve& curve);

nlohmann::json to_json(const OscillatorSpec& spec);
nlohmann::json to_json(const GrapeConfig& config);
nlohmann::json to_json(const ControlPulse& pulse);
nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const PulseSpectrum& spectrum);
nlohmann::json to_json(const GrapeResult& result, const GrapeConfig& config, const OscillatorSpec& spec);

OscillatorSpec spec_from_json(const nlohmann::json& j);
ControlPulse pulse_from_json(const nlohmann::json& j);

/// Reloads a result.json, re-propagates its pulse and returns the transfer fidelity.
double replay_result(const std::filesystem::path& result_json);

}  // namespace duffgrape::io
