#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "duffgrape/experiments.hpp"

namespace duffgrape::jobs {

enum class Outcome { ok, not_converged };

/// Every job directory gets a manifest.json with the command, the resolved
/// configuration and the library version; no timestamps, so reruns are byte-identical.
void write_manifest(const std::filesystem::path& dir, const std::string& command, const nlohmann::json& config);

struct PrepareJob {
  OscillatorSpec spec;
  int target_level = 2;
  double total_time = 20.0;
  int n_slices = 201;
  std::uint64_t seed = 1;
  GrapeConfig grape = default_grape_settings();
};

/// pulse.csv, populations.csv, spectrum.csv and result.json.
Outcome run_prepare(const PrepareJob& job, const std::filesystem::path& dir);

struct ScalingJob {
  OscillatorSpec spec;
  std::vector<double> deltas;
  LevelPair pair;
  MinimalTimeOptions options;
  std::uint64_t seed = 1;
  int jobs = 1;
};

/// scaling.csv and fit.json. Not converged when fewer than 3 cells succeed.
Outcome run_scaling(const ScalingJob& job, const std::filesystem::path& dir);

struct BaselineJob {
  OscillatorSpec spec;
  std::vector<double> deltas;
  BaselineOptions options;
  int jobs = 1;
};

/// baseline.csv and fit.json.
Outcome run_baseline(const BaselineJob& job, const std::filesystem::path& dir);

struct ErrorVsTimeJob {
  OscillatorSpec spec;
  LevelPair pair;
  std::vector<double> times;
  MinimalTimeOptions options;
  std::uint64_t seed = 1;
};

/// error_vs_time.csv and fit.json; the exponential fit uses the points that
/// miss the fidelity goal (the short-time regime).
Outcome run_error_vs_time(const ErrorVsTimeJob& job, const std::filesystem::path& dir);

struct SpectrumCheckJob {
  std::vector<double> deltas{0.01, 0.1};
  double omega0 = 1.0;
  int n_max = 8;
};

/// rwa_ratio.csv with one ratio column per delta.
Outcome run_spectrum_check(const SpectrumCheckJob& job, const std::filesystem::path& dir);

}  // namespace duffgrape::jobs
