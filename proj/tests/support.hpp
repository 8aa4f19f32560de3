#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "duffgrape/dynamics.hpp"
#include "duffgrape/grape.hpp"

namespace testing_support {

using namespace duffgrape;

// Reference exponential exp(-i H dt): Taylor series of the given order with
// scaling and squaring. Independent of the eigendecomposition used by the library.
inline Eigen::MatrixXcd expm_reference(const Eigen::MatrixXd& h, double dt, int order = 4) {
  const Eigen::MatrixXcd a = std::complex<double>(0.0, -dt) * h.cast<std::complex<double>>();
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::ldexp(1.0, squarings) > 1e-3) ++squarings;
  const Eigen::MatrixXcd small = a / std::ldexp(1.0, squarings);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(h.rows(), h.cols());
  Eigen::MatrixXcd term = id;
  Eigen::MatrixXcd sum = id;
  for (int k = 1; k <= order; ++k) {
    term = term * small / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

inline ControlPulse random_pulse(std::uint64_t seed, double total_time, int n_slices, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  ControlPulse p = ControlPulse::zeros(total_time, n_slices);
  for (double& f : p.amplitudes) f = u(rng);
  return p;
}

inline double transfer(const ModelMatrices& m, const ControlPulse& p, const Eigen::VectorXcd& psi_i,
                       const Eigen::VectorXcd& psi_f) {
  return fidelity(propagate_final(m, p, psi_i), psi_f);
}

// Central finite differences of the transfer fidelity in each slice amplitude.
inline std::vector<double> fd_gradient(const ModelMatrices& m, const ControlPulse& p, const Eigen::VectorXcd& psi_i,
                                       const Eigen::VectorXcd& psi_f, double h = 1e-6) {
  std::vector<double> g(p.amplitudes.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    ControlPulse up = p, down = p;
    up.amplitudes[j] += h;
    down.amplitudes[j] -= h;
    g[j] = (transfer(m, up, psi_i, psi_f) - transfer(m, down, psi_i, psi_f)) / (2.0 * h);
  }
  return g;
}

inline double max_abs(const std::vector<double>& v) {
  double out = 0.0;
  for (double x : v) out = std::max(out, std::abs(x));
  return out;
}

}  // namespace testing_support
