#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace duffgrape {

/// Parameters of the dimensionless Duffing oscillator
/// H = w0 (n + 1/2) + (delta/12) (a + a^dag)^4, with hbar = 1.
struct OscillatorSpec {
  double delta = 0.12;
  double omega0 = 1.0;
  int levels = 10;
  /// Extra levels used when forming the quartic term so the retained block is exact.
  int buffer_levels = 8;
  /// Bare Fock states diagonalized before the spectrum is cut to the lowest
  /// `levels` eigenstates. Setting it equal to `levels` truncates the bare ladder instead.
  int basis_levels = 80;

  /// Frequency of the 0 <-> 1 transition in the rotating-wave picture.
  double omega() const { return omega0 + delta; }
};

/// Throws std::invalid_argument when the OscillatorSpec violates its invariants.
void validate(const OscillatorSpec& spec);

/// Non-fatal diagnostics (e.g. delta outside the perturbative range).
std::vector<std::string> spec_warnings(const OscillatorSpec& spec);

/// Operators of the truncated oscillator.
///
/// `h_full`, `h_rwa` and `x_op` are the levels x levels blocks in the bare Fock
/// basis. Dynamics run in the energy basis: the Hamiltonian is diagonalized on
/// `basis_levels` bare states and only the lowest `levels` eigenstates are kept,
/// giving `drift` = diag(energies) and `control` = the drive x projected onto them.
/// Column k of `eigenstates` holds the bare-basis coefficients of |k>, with the
/// sign chosen so that the overlap with the bare state |k> is positive.
struct ModelMatrices {
  Eigen::MatrixXd h_full;
  Eigen::MatrixXd h_rwa;
  Eigen::MatrixXd x_op;
  Eigen::VectorXd energies;
  Eigen::MatrixXd eigenstates;
  Eigen::MatrixXd drift;
  Eigen::MatrixXd control;
  int dim = 0;
};

ModelMatrices build_model(const OscillatorSpec& spec);

/// Bare ladder operator a on `dim` levels.
Eigen::MatrixXd lowering_operator(int dim);

/// Energy eigenstate |level> of the model as a state vector in the energy basis.
Eigen::VectorXcd fock_state(const ModelMatrices& model, int level);

/// Rotating-wave transition frequencies w + delta * n for n = 0..n_max.
std::vector<double> transition_frequencies(const OscillatorSpec& spec, int n_max);

/// Transition frequencies E_{n+1} - E_n of the truncated exact Hamiltonian.
std::vector<double> exact_transition_frequencies(const ModelMatrices& model, int n_max);

/// Ratio of rotating-wave to exact eigenenergies for levels 0..n_max.
///
/// Both energy sets keep the zero-point and constant terms so the n = 0 ratio
/// is finite. Exact energies come from a diagonalization with at least
/// 5 * n_max buffer levels; throws std::runtime_error if enlarging that buffer
/// by half moves any eigenvalue by more than 1e-10 relative.
std::vector<double> rwa_exact_ratio(const OscillatorSpec& spec, int n_max);

}  // namespace duffgrape
