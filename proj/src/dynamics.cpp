#include "duffgrape/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace duffgrape {

namespace {

using cd = std::complex<double>;

constexpr double kNormAbortTolerance = 1e-8;

void check_state(const ModelMatrices& model, const Eigen::VectorXcd& psi, const char* what) {
  if (psi.size() != model.dim)
    throw std::invalid_argument(std::string(what) + ": state dimension " + std::to_string(psi.size()) +
                                " does not match model dimension " + std::to_string(model.dim));
  if (std::abs(psi.norm() - 1.0) > kNormAbortTolerance)
    throw std::invalid_argument(std::string(what) + ": state is not normalized");
}

void check_norm(const Eigen::VectorXcd& psi, int slice) {
  if (!(std::abs(psi.norm() - 1.0) <= kNormAbortTolerance))
    throw std::runtime_error("propagate: norm drift " + std::to_string(std::abs(psi.norm() - 1.0)) +
                             " after slice " + std::to_string(slice));
}

}  // namespace

ControlPulse ControlPulse::zeros(double total_time, int n_slices) {
  ControlPulse p;
  p.total_time = total_time;
  p.amplitudes.assign(static_cast<std::size_t>(std::max(n_slices, 0)), 0.0);
  return p;
}

void validate(const ControlPulse& pulse) {
  if (pulse.amplitudes.empty()) throw std::invalid_argument("pulse: at least one slice required");
  if (!std::isfinite(pulse.total_time) || pulse.total_time < 0.0)
    throw std::invalid_argument("pulse: total time must be finite and non-negative");
  for (double f : pulse.amplitudes)
    if (!std::isfinite(f)) throw std::invalid_argument("pulse: non-finite amplitude");
}

std::vector<std::string> pulse_warnings(const ControlPulse& pulse) {
  std::vector<std::string> out;
  if (pulse.n_slices() < 101 || pulse.n_slices() > 401)
    out.push_back("slice count " + std::to_string(pulse.n_slices()) + " outside the usual 101..401 range");
  return out;
}

SliceExponentiator::SliceExponentiator(const ModelMatrices& model) : model_(&model), solver_(model.dim) {
  const double scale = 1.0 + model.drift.cwiseAbs().maxCoeff();
  if ((model.drift - model.drift.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale ||
      (model.control - model.control.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("slice_unitary: Hamiltonian is not Hermitian");
}

Eigen::MatrixXcd SliceExponentiator::operator()(double amplitude, double slice_width) {
  if (!(slice_width >= 0.0)) throw std::invalid_argument("slice_unitary: slice width must be >= 0");
  const int n = model_->dim;
  if (slice_width == 0.0) return Eigen::MatrixXcd::Identity(n, n);
  solver_.compute(model_->drift + amplitude * model_->control);
  if (solver_.info() != Eigen::Success) throw std::runtime_error("slice_unitary: diagonalization failed");
  const Eigen::MatrixXd& v = solver_.eigenvectors();
  const Eigen::ArrayXd phase = -slice_width * solver_.eigenvalues().array();
  // exp(-iH dt) = V cos(E dt) V^T - i V sin(E dt) V^T for real symmetric H.
  Eigen::MatrixXcd u(n, n);
  u.real().noalias() = v * phase.cos().matrix().asDiagonal() * v.transpose();
  u.imag().noalias() = v * phase.sin().matrix().asDiagonal() * v.transpose();
  return u;
}

Eigen::MatrixXcd slice_unitary(const ModelMatrices& model, double amplitude, double slice_width) {
  return SliceExponentiator(model)(amplitude, slice_width);
}

Trajectory propagate(const ModelMatrices& model, const ControlPulse& pulse, const Eigen::VectorXcd& psi0) {
  validate(pulse);
  check_state(model, psi0, "propagate");
  const double dt = pulse.slice_width();
  SliceExponentiator expm(model);
  Trajectory traj;
  traj.states.reserve(pulse.amplitudes.size() + 1);
  traj.unitaries.reserve(pulse.amplitudes.size());
  traj.states.push_back(psi0);
  for (int j = 0; j < pulse.n_slices(); ++j) {
    traj.unitaries.push_back(expm(pulse.amplitudes[j], dt));
    traj.states.push_back(traj.unitaries.back() * traj.states.back());
    check_norm(traj.states.back(), j + 1);
  }
  return traj;
}

Eigen::VectorXcd propagate_final(const ModelMatrices& model, const ControlPulse& pulse,
                                 const Eigen::VectorXcd& psi0) {
  validate(pulse);
  check_state(model, psi0, "propagate");
  const double dt = pulse.slice_width();
  SliceExponentiator expm(model);
  Eigen::VectorXcd psi = psi0;
  for (int j = 0; j < pulse.n_slices(); ++j) {
    psi = expm(pulse.amplitudes[j], dt) * psi;
    check_norm(psi, j + 1);
  }
  return psi;
}

AdjointTrajectory back_propagate(const Trajectory& forward, const Eigen::VectorXcd& psi_f) {
  const std::size_t n = forward.unitaries.size();
  if (n == 0 || psi_f.size() != forward.unitaries.front().rows())
    throw std::invalid_argument("back_propagate: target dimension does not match trajectory");
  if (std::abs(psi_f.norm() - 1.0) > kNormAbortTolerance)
    throw std::invalid_argument("back_propagate: target state is not normalized");
  AdjointTrajectory adj;
  adj.states.resize(n + 1);
  adj.states[n] = psi_f;
  for (std::size_t j = n; j > 0; --j) {
    adj.states[j - 1] = forward.unitaries[j - 1].adjoint() * adj.states[j];
    check_norm(adj.states[j - 1], static_cast<int>(j));
  }
  return adj;
}

AdjointTrajectory back_propagate(const ModelMatrices& model, const ControlPulse& pulse,
                                 const Eigen::VectorXcd& psi_f) {
  validate(pulse);
  check_state(model, psi_f, "back_propagate");
  const double dt = pulse.slice_width();
  const std::size_t n = pulse.amplitudes.size();
  SliceExponentiator expm(model);
  AdjointTrajectory adj;
  adj.states.resize(n + 1);
  adj.states[n] = psi_f;
  for (std::size_t j = n; j > 0; --j) {
    adj.states[j - 1] = expm(pulse.amplitudes[j - 1], dt).adjoint() * adj.states[j];
    check_norm(adj.states[j - 1], static_cast<int>(j));
  }
  return adj;
}

Eigen::MatrixXd populations(const ModelMatrices& model, const Trajectory& trajectory) {
  Eigen::MatrixXd pops(static_cast<Eigen::Index>(trajectory.states.size()), model.dim);
  for (std::size_t j = 0; j < trajectory.states.size(); ++j)
    pops.row(static_cast<Eigen::Index>(j)) = trajectory.states[j].cwiseAbs2().transpose();
  return pops;
}

}  // namespace duffgrape
