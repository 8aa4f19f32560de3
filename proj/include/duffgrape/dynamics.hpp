#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "duffgrape/oscillator.hpp"

namespace duffgrape {

/// Piecewise-constant drive f(t) on a uniform grid of n_slices() slices.
struct ControlPulse {
  double total_time = 0.0;
  std::vector<double> amplitudes;

  int n_slices() const { return static_cast<int>(amplitudes.size()); }
  double slice_width() const { return total_time / static_cast<double>(amplitudes.size()); }
  /// Midpoint of slice j (0-based).
  double slice_time(int j) const { return (j + 0.5) * slice_width(); }

  static ControlPulse zeros(double total_time, int n_slices);
};

/// Throws std::invalid_argument on an empty grid, non-positive T or non-finite amplitudes.
void validate(const ControlPulse& pulse);

/// Slice counts outside 101..401 are allowed but reported.
std::vector<std::string> pulse_warnings(const ControlPulse& pulse);

/// states[0] is the initial state, states[j] the state after slice j.
/// unitaries[j - 1] is the propagator of slice j.
struct Trajectory {
  std::vector<Eigen::VectorXcd> states;
  std::vector<Eigen::MatrixXcd> unitaries;

  const Eigen::VectorXcd& final_state() const { return states.back(); }
};

/// states[j] = U_{j+1}^dag ... U_N^dag psi_f, so states[N] == psi_f.
struct AdjointTrajectory {
  std::vector<Eigen::VectorXcd> states;
};

/// Reusable evaluator of slice propagators exp(-i (drift + f control) dt).
/// Checks hermiticity of the model once; holds solver workspace, so one
/// instance must not be shared between threads.
class SliceExponentiator {
 public:
  explicit SliceExponentiator(const ModelMatrices& model);
  Eigen::MatrixXcd operator()(double amplitude, double slice_width);

 private:
  const ModelMatrices* model_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver_;
};

/// exp(-i (drift + amplitude * control) dt) through a symmetric eigendecomposition.
Eigen::MatrixXcd slice_unitary(const ModelMatrices& model, double amplitude, double slice_width);

Trajectory propagate(const ModelMatrices& model, const ControlPulse& pulse, const Eigen::VectorXcd& psi0);

/// Final state only; skips storing the per-slice unitaries.
Eigen::VectorXcd propagate_final(const ModelMatrices& model, const ControlPulse& pulse,
                                 const Eigen::VectorXcd& psi0);

AdjointTrajectory back_propagate(const ModelMatrices& model, const ControlPulse& pulse,
                                 const Eigen::VectorXcd& psi_f);

/// Reuses the unitaries cached in a forward trajectory.
AdjointTrajectory back_propagate(const Trajectory& forward, const Eigen::VectorXcd& psi_f);

/// Row j holds |<k|psi_j>|^2 over the energy eigenstates |k> of the model.
Eigen::MatrixXd populations(const ModelMatrices& model, const Trajectory& trajectory);

}  // namespace duffgrape
