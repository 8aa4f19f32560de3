#include "duffgrape/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace duffgrape {

namespace {

constexpr double kMaxPerturbativeDelta = 0.5;

// Exact (levels x levels) block of w0 (n + 1/2) + (delta/12) X^4, with X^4
// formed on levels + buffer states before truncation.
Eigen::MatrixXd full_hamiltonian(double delta, double omega0, int levels, int buffer) {
  const int big = levels + buffer;
  const Eigen::MatrixXd a = lowering_operator(big);
  const Eigen::MatrixXd x = a + a.transpose();
  const Eigen::MatrixXd x2 = x * x;
  const Eigen::MatrixXd x4 = x2 * x2;
  Eigen::MatrixXd h = (delta / 12.0) * x4.topLeftCorner(levels, levels);
  for (int n = 0; n < levels; ++n) h(n, n) += omega0 * (n + 0.5);
  return h;
}

Eigen::VectorXd exact_levels(const OscillatorSpec& spec, int count, int buffer) {
  const Eigen::MatrixXd h = full_hamiltonian(spec.delta, spec.omega0, count + buffer, 4);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().head(count);
}

}  // namespace

void validate(const OscillatorSpec& spec) {
  if (!std::isfinite(spec.delta) || !std::isfinite(spec.omega0))
    throw std::invalid_argument("oscillator: delta and omega0 must be finite");
  if (spec.delta < 0.0)
    throw std::invalid_argument("oscillator: delta must be non-negative (hard nonlinearity only)");
  if (spec.omega0 <= 0.0) throw std::invalid_argument("oscillator: omega0 must be positive");
  if (spec.levels < 2) throw std::invalid_argument("oscillator: levels must be at least 2");
  if (spec.buffer_levels < 0) throw std::invalid_argument("oscillator: buffer_levels must be >= 0");
  if (spec.basis_levels < spec.levels) throw std::invalid_argument("oscillator: basis_levels must be >= levels");
}

std::vector<std::string> spec_warnings(const OscillatorSpec& spec) {
  std::vector<std::string> out;
  if (spec.delta > kMaxPerturbativeDelta)
    out.emplace_back("delta above 0.5: rotating-wave level ordering is no longer reliable");
  if (spec.delta == 0.0) out.emplace_back("delta = 0: harmonic limit, Fock states are not individually addressable");
  if (spec.buffer_levels < 4)
    out.emplace_back("buffer_levels < 4: top rows of the quartic term are truncated");
  return out;
}

Eigen::MatrixXd lowering_operator(int dim) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

ModelMatrices build_model(const OscillatorSpec& spec) {
  validate(spec);
  ModelMatrices m;
  m.dim = spec.levels;
  m.h_full = full_hamiltonian(spec.delta, spec.omega0, spec.levels, spec.buffer_levels);

  const double w = spec.omega();
  m.h_rwa = Eigen::MatrixXd::Zero(m.dim, m.dim);
  for (int n = 0; n < m.dim; ++n) m.h_rwa(n, n) = w * n + 0.5 * spec.delta * n * (n - 1);

  const Eigen::MatrixXd a = lowering_operator(m.dim);
  m.x_op = a + a.transpose();

  const int basis = spec.basis_levels;
  const Eigen::MatrixXd h_basis = full_hamiltonian(spec.delta, spec.omega0, basis, spec.buffer_levels);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h_basis);
  if (solver.info() != Eigen::Success) throw std::runtime_error("oscillator: diagonalization failed");
  m.energies = solver.eigenvalues().head(m.dim);
  m.eigenstates = solver.eigenvectors().leftCols(m.dim);
  for (int k = 0; k < m.dim; ++k) {
    if (m.eigenstates(k, k) < 0.0) m.eigenstates.col(k) *= -1.0;
  }

  const Eigen::MatrixXd a_basis = lowering_operator(basis);
  const Eigen::MatrixXd x_basis = a_basis + a_basis.transpose();
  const Eigen::MatrixXd projected = m.eigenstates.transpose() * x_basis * m.eigenstates;
  m.control = 0.5 * (projected + projected.transpose());
  m.drift = m.energies.asDiagonal();
  return m;
}

Eigen::VectorXcd fock_state(const ModelMatrices& model, int level) {
  if (level < 0 || level >= model.dim)
    throw std::out_of_range("fock_state: level " + std::to_string(level) + " outside basis of dimension " +
                            std::to_string(model.dim));
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(model.dim);
  v(level) = 1.0;
  return v;
}

std::vector<double> transition_frequencies(const OscillatorSpec& spec, int n_max) {
  validate(spec);
  if (n_max < 0 || n_max >= spec.levels - 1)
    throw std::out_of_range("transition_frequencies: n_max must lie in [0, levels - 2]");
  std::vector<double> out;
  out.reserve(n_max + 1);
  for (int n = 0; n <= n_max; ++n) out.push_back(spec.omega() + spec.delta * n);
  return out;
}

std::vector<double> exact_transition_frequencies(const ModelMatrices& model, int n_max) {
  if (n_max < 0 || n_max >= model.dim - 1)
    throw std::out_of_range("exact_transition_frequencies: n_max must lie in [0, dim - 2]");
  std::vector<double> out;
  for (int n = 0; n <= n_max; ++n) out.push_back(model.energies(n + 1) - model.energies(n));
  return out;
}

std::vector<double> rwa_exact_ratio(const OscillatorSpec& spec, int n_max) {
  validate(spec);
  if (n_max < 0 || n_max > 8) throw std::out_of_range("rwa_exact_ratio: n_max must lie in [0, 8]");
  const int count = n_max + 1;
  const int buffer = std::max({spec.buffer_levels, 5 * n_max, 8});
  const Eigen::VectorXd exact = exact_levels(spec, count, buffer);
  const Eigen::VectorXd wider = exact_levels(spec, count, buffer + (buffer + 1) / 2);
  for (int n = 0; n < count; ++n) {
    if (std::abs(exact(n) - wider(n)) > 1e-10 * std::abs(wider(n)))
      throw std::runtime_error("rwa_exact_ratio: buffer of " + std::to_string(buffer) +
                               " levels too small for level " + std::to_string(n));
  }
  std::vector<double> out;
  out.reserve(count);
  for (int n = 0; n < count; ++n) {
    const double rwa = spec.omega0 * (n + 0.5) + 0.25 * spec.delta * (2.0 * n * n + 2.0 * n + 1.0);
    out.push_back(rwa / exact(n));
  }
  return out;
}

}  // namespace duffgrape
