#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "duffgrape/analysis.hpp"
#include "duffgrape/dynamics.hpp"
#include "duffgrape/grape.hpp"
#include "duffgrape/oscillator.hpp"

namespace duffgrape {

/// A state transfer |initial> -> |target> between energy eigenstates.
struct LevelPair {
  int initial = 0;
  int target = 1;

  /// "0-1" style label.
  std::string label() const;
  /// Accepts "0-1", "0->1" or "01".
  static LevelPair parse(const std::string& text);
};

/// Slice count as a function of pulse duration: the slice width never exceeds
/// `max_slice_width` and at least `min_slices` slices are used.
struct SlicePolicy {
  double max_slice_width = 0.1;
  int min_slices = 101;

  int slices_for(double total_time) const;
};

/// Optimizer settings shared by all experiment drivers. Per-run fields of
/// GrapeConfig (levels, time, slices, goal, seed) are filled in by the drivers.
GrapeConfig default_grape_settings();

/// Resamples a pulse onto a new duration and slice count, rescaling amplitudes
/// by old_T / new_T so the pulse area is preserved.
ControlPulse rescale_pulse(const ControlPulse& pulse, double total_time, int n_slices);

/// Samples `pulse` on a longer grid and leaves the control off after its end.
ControlPulse zero_pad_pulse(const ControlPulse& pulse, double total_time, int n_slices);

/// Pulse duration used by default for |0> -> |target> at the reference anharmonicity 0.12.
double default_preparation_time(int target_level);

struct PreparationRun {
  GrapeResult result;
  Trajectory trajectory;
  Eigen::MatrixXd populations;
  PulseSpectrum spectrum;
};

/// Optimizes |0> -> |target>, then re-propagates the best pulse and computes its spectrum.
PreparationRun prepare_fock(const OscillatorSpec& spec, int target_level, double total_time, int n_slices,
                            std::uint64_t seed, const GrapeConfig& settings = default_grape_settings());

/// Re-propagates `pulse` at each truncation dimension and returns the largest
/// pairwise difference of the transfer fidelity. Dimensions below target + 3
/// are accepted so that under-truncation can be demonstrated.
double truncation_check(const OscillatorSpec& spec, const ControlPulse& pulse, const LevelPair& pair,
                        const std::vector<int>& dims);

/// Fidelity of `pulse` for `pair` in a given model.
double transfer_fidelity(const ModelMatrices& model, const ControlPulse& pulse, const LevelPair& pair);

struct Probe {
  double total_time = 0.0;
  double fidelity = 0.0;
  bool success = false;
};

struct MinimalTimeResult {
  double t_min = 0.0;
  double fidelity = 0.0;  // achieved at t_min
  int restarts_used = 0;
  ControlPulse pulse;     // optimized pulse at t_min
  std::vector<Probe> probes;
};

struct MinimalTimeOptions {
  double fidelity_goal = 0.99999;
  double t_lo = 1.0;
  double t_hi = 20.0;
  /// Bisection stops once hi - lo <= time_tolerance * hi.
  double time_tolerance = 0.01;
  int max_expansions = 12;
  SlicePolicy slices;
  GrapeConfig grape = default_grape_settings();
};

/// Bisection on pulse duration for the shortest time at which GRAPE reaches
/// the goal. Failed probes are retried from the rescaled pulse of the current
/// upper bracket before being accepted. Throws std::runtime_error if the
/// bracket cannot be established within max_expansions.
MinimalTimeResult minimal_time(const OscillatorSpec& spec, const LevelPair& pair, const MinimalTimeOptions& options,
                               std::uint64_t seed);

struct ScalingPoint {
  double delta = 0.0;
  double t_min = 0.0;
  double fidelity = 0.0;
  int restarts_used = 0;
  bool ok = false;
  std::string error;
};

struct ScalingCurve {
  std::string transition;
  std::vector<ScalingPoint> points;  // sorted by delta
  FitResult fit;
  bool fit_valid = false;
  double fidelity_goal = 0.0;
  double search_tolerance = 0.0;
};

/// Computes one sweep cell for a given delta.
using ScalingCell = std::function<ScalingPoint(double delta)>;

/// Runs `cell` over `deltas` on up to `jobs` threads and fits a power law to the
/// successful cells. Output order and content do not depend on `jobs`.
ScalingCurve run_sweep(const std::vector<double>& deltas, const std::string& label, double fidelity_goal,
                       double tolerance, const ScalingCell& cell, int jobs = 1);

/// Minimal-time sweep over delta for GRAPE-optimized pulses.
ScalingCurve scaling_sweep(const OscillatorSpec& base, const std::vector<double>& deltas, const LevelPair& pair,
                           const MinimalTimeOptions& options, std::uint64_t seed, int jobs = 1);

/// `count` log-spaced values covering [lo, hi].
std::vector<double> log_spaced(double lo, double hi, int count);

struct BaselineResult {
  double delta = 0.0;
  double pulse_time = 0.0;
  double error = 0.0;    // 1 - fidelity at pulse_time
  double leakage = 0.0;  // population outside {initial, target}
};

/// Constant-envelope resonant pi-pulse f(t) = Omega cos(w10 t) on the dressed
/// 0 <-> 1 transition, with Omega T |<1|x|0>| = pi.
ControlPulse rabi_pulse(const ModelMatrices& model, double total_time, int n_slices);

struct BaselineOptions {
  double fidelity_goal = 0.99999;
  double t_start = 1.0;
  double time_tolerance = 0.01;
  int max_doublings = 24;
  SlicePolicy slices;
};

/// Shortest Rabi-pulse duration meeting the goal for |0> -> |1>, found by
/// doubling from t_start followed by bisection.
BaselineResult rabi_baseline(const OscillatorSpec& spec, const BaselineOptions& options);

struct BaselineSweep {
  std::vector<BaselineResult> results;
  FitResult fit;
};

BaselineSweep rabi_baseline_sweep(const OscillatorSpec& base, const std::vector<double>& deltas,
                                  const BaselineOptions& options, int jobs = 1);

struct ErrorPoint {
  double total_time = 0.0;
  double error = 0.0;
  bool converged = false;
};

/// Best reachable error 1 - Phi for each duration, sweeping from the longest
/// duration down and warm-starting each point from its longer neighbour, then
/// enforcing that the error does not grow with T by restarting offending points
/// from the zero-padded pulse of their shorter neighbour.
std::vector<ErrorPoint> error_vs_time(const OscillatorSpec& spec, const LevelPair& pair,
                                      const std::vector<double>& times, const MinimalTimeOptions& options,
                                      std::uint64_t seed);

}  // namespace duffgrape
