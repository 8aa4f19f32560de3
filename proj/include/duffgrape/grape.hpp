#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "duffgrape/dynamics.hpp"
#include "duffgrape/oscillator.hpp"

namespace duffgrape {

struct GrapeConfig {
  int initial_level = 0;
  int target_level = 1;
  double total_time = 50.0;
  int n_slices = 201;
  double fidelity_goal = 0.9999;
  int max_iterations = 20000;
  /// Ascent step applied to the functional gradient dPhi/df(t) = g_j / dt,
  /// so the step does not depend on the slice count.
  double step_size = 0.05;
  double momentum = 0.0;
  /// Iterations an escape boost (step x2) stays active.
  int escape_boost_iters = 100;
  /// Window over which a relative improvement below `stall_tolerance` counts as a stall.
  int patience = 50;
  double stall_tolerance = 1e-8;
  /// An attempt is abandoned after this many consecutive boosts without progress.
  int max_stalled_boosts = 4;
  /// Extra randomized attempts after the first one fails.
  int restarts = 0;
  std::uint64_t seed = 1;
};

/// Throws std::invalid_argument when the config violates its invariants.
void validate(const GrapeConfig& config);

struct IterationRecord {
  double fidelity = 0.0;
  double gradient_max = 0.0;
  double step = 0.0;
};

struct GrapeResult {
  ControlPulse pulse;  // best iterate seen
  double fidelity = 0.0;
  int iterations_used = 0;
  int attempts = 0;
  std::vector<IterationRecord> history;
  bool converged = false;
  int boosts_applied = 0;
};

/// Constant-envelope resonant pi-pulse on the first rung above the initial level,
/// f_j = Omega_R cos(w t_j) at slice midpoints with Omega_R T sqrt(i + 1) = pi.
/// Returns a zero pulse when initial and target levels coincide.
ControlPulse initial_guess(const GrapeConfig& config, const OscillatorSpec& spec);

/// |<final|target>|^2.
double fidelity(const Eigen::VectorXcd& final_state, const Eigen::VectorXcd& target);

/// First-order GRAPE gradient from cached forward/adjoint passes:
/// g_j = 2 dt Im(<lambda_j|X|rho_j> <rho_j|lambda_j>), with rho_j and lambda_j
/// the forward and back-propagated states at the end of slice j.
std::vector<double> gradient(const Trajectory& forward, const AdjointTrajectory& adjoint,
                             const Eigen::MatrixXd& control_op, double slice_width);

std::vector<double> gradient(const ModelMatrices& model, const ControlPulse& pulse,
                             const Eigen::VectorXcd& psi_i, const Eigen::VectorXcd& psi_f);

/// Gradient ascent with step backoff, stall-triggered escape boosts and seeded restarts.
/// A non-converged run is reported through GrapeResult::converged, not an exception.
GrapeResult optimize(const GrapeConfig& config, const OscillatorSpec& spec);

GrapeResult optimize(const GrapeConfig& config, const OscillatorSpec& spec, const ModelMatrices& model,
                     std::optional<ControlPulse> start = std::nullopt);

}  // namespace duffgrape
