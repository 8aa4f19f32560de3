#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "duffgrape/oscillator.hpp"

using namespace duffgrape;

namespace {

OscillatorSpec make_spec(double delta, int levels, int buffer = 8) {
  OscillatorSpec s;
  s.delta = delta;
  s.levels = levels;
  s.buffer_levels = buffer;
  return s;
}

// Lowest nine eigenvalues of w0 (n + 1/2) + (0.01/12) X^4 on a dense 60-level basis.
const double kDelta001Levels[9] = {0.50247157576942,  1.512279425575077, 2.531689143492298,
                                   3.560454005943742, 4.598343109352671, 5.645139791413118,
                                   6.700640262041354, 7.764652409727265, 8.83699475558927};

}  // namespace

TEST(Oscillator, HarmonicRwaDiagonal) {
  const auto m = build_model(make_spec(0.0, 4));
  for (int n = 0; n < 4; ++n) EXPECT_DOUBLE_EQ(m.h_rwa(n, n), n);
}

TEST(Oscillator, RwaSecondSpacing) {
  const auto m = build_model(make_spec(0.12, 10));
  EXPECT_NEAR(m.h_rwa(2, 2) - m.h_rwa(1, 1), 1.24, 1e-14);
}

TEST(Oscillator, DenseEigenvalueFixture) {
  const auto wide = build_model(make_spec(0.01, 40, 20));
  for (int n = 0; n < 9; ++n) EXPECT_NEAR(wide.energies(n), kDelta001Levels[n], 1e-11) << n;

  // With only ten retained levels the low part of the ladder is still converged.
  const auto narrow = build_model(make_spec(0.01, 10, 50));
  for (int n = 0; n < 4; ++n) EXPECT_NEAR(narrow.energies(n), kDelta001Levels[n], 1e-8) << n;
}

TEST(Oscillator, TransitionFrequencies) {
  const auto w = transition_frequencies(make_spec(0.12, 10), 2);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_NEAR(w[0], 1.12, 1e-14);
  EXPECT_NEAR(w[1], 1.24, 1e-14);
  EXPECT_NEAR(w[2], 1.36, 1e-14);

  for (double v : transition_frequencies(make_spec(0.0, 10), 5)) EXPECT_DOUBLE_EQ(v, 1.0);

  const auto single = transition_frequencies(make_spec(0.01, 10), 0);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_NEAR(single[0], 1.01, 1e-15);
}

TEST(Oscillator, TransitionFrequenciesRejectsLargeNMax) {
  EXPECT_THROW(transition_frequencies(make_spec(0.12, 10), 9), std::out_of_range);
  EXPECT_THROW(transition_frequencies(make_spec(0.12, 10), -1), std::out_of_range);
}

TEST(Oscillator, ExactTransitionsSitBelowRwaValues) {
  const auto m = build_model(make_spec(0.12, 10));
  const auto exact = exact_transition_frequencies(m, 2);
  EXPECT_NEAR(exact[0], 1.1000, 5e-4);
  EXPECT_NEAR(exact[1], 1.1848, 5e-4);
  EXPECT_NEAR(exact[2], 1.2559, 5e-4);
}

TEST(Oscillator, RwaRatioHarmonicLimit) {
  for (double r : rwa_exact_ratio(make_spec(1e-9, 10), 8)) EXPECT_NEAR(r, 1.0, 1e-8);
}

TEST(Oscillator, RwaRatioSmallDeltaDriftsMonotonically) {
  const auto r = rwa_exact_ratio(make_spec(0.01, 10), 8);
  ASSERT_EQ(r.size(), 9u);
  for (double v : r) EXPECT_NEAR(v, 1.0, 0.02);
  for (std::size_t n = 1; n < r.size(); ++n) EXPECT_GT(r[n], r[n - 1]) << n;
}

TEST(Oscillator, RwaRatioDeviationGrowsWithDelta) {
  const auto small = rwa_exact_ratio(make_spec(0.01, 10), 8);
  const auto large = rwa_exact_ratio(make_spec(0.1, 10), 8);
  for (std::size_t n = 0; n < small.size(); ++n) EXPECT_GT(std::abs(large[n] - 1.0), std::abs(small[n] - 1.0)) << n;
}

TEST(Oscillator, RwaRatioRejectsTooManyLevels) {
  EXPECT_THROW(rwa_exact_ratio(make_spec(0.1, 10), 9), std::out_of_range);
}

TEST(Oscillator, Hermiticity) {
  for (double delta : {0.0, 0.01, 0.12, 0.3, 0.5}) {
    for (int levels : {2, 5, 10, 16}) {
      const auto m = build_model(make_spec(delta, levels));
      EXPECT_LE((m.h_full - m.h_full.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    }
  }
}

TEST(Oscillator, LadderSelectionRule) {
  const auto m = build_model(make_spec(0.12, 12));
  for (int r = 0; r < m.dim; ++r) {
    for (int c = 0; c < m.dim; ++c) {
      if (std::abs(r - c) != 1) EXPECT_EQ(m.x_op(r, c), 0.0);
    }
  }
  for (int n = 0; n + 1 < m.dim; ++n) EXPECT_EQ(m.x_op(n + 1, n), std::sqrt(n + 1.0));
}

TEST(Oscillator, RetainedBlockIndependentOfBuffer) {
  for (int b = 4; b <= 8; ++b) {
    const auto lo = build_model(make_spec(0.12, 10, b));
    const auto hi = build_model(make_spec(0.12, 10, b + 10));
    EXPECT_LE((lo.h_full - hi.h_full).cwiseAbs().maxCoeff(), 1e-14) << b;
  }
  // Too small a buffer corrupts the top rows.
  const auto none = build_model(make_spec(0.12, 10, 0));
  const auto ref = build_model(make_spec(0.12, 10, 8));
  EXPECT_GT((none.h_full - ref.h_full).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Oscillator, RwaMatchesFirstOrderDiagonal) {
  for (double delta : {0.01, 0.12, 0.4}) {
    const auto s = make_spec(delta, 10);
    const auto m = build_model(s);
    const double constant = 0.5 * s.omega0 + 0.25 * delta;
    for (int n = 0; n < m.dim; ++n) EXPECT_NEAR(m.h_full(n, n) - constant, m.h_rwa(n, n), 1e-12) << n;
  }
}

TEST(Oscillator, EigenstateSignConvention) {
  const auto m = build_model(make_spec(0.12, 10));
  for (int k = 0; k < m.dim; ++k) {
    EXPECT_GT(m.eigenstates(k, k), 0.0);
    const auto v = fock_state(m, k);
    EXPECT_NEAR(v.norm(), 1.0, 1e-14);
  }
  EXPECT_THROW(fock_state(m, 10), std::out_of_range);
}

TEST(Oscillator, EnergyBasisOperators) {
  const auto m = build_model(make_spec(0.12, 10));
  ASSERT_EQ(m.drift.rows(), 10);
  ASSERT_EQ(m.control.rows(), 10);
  EXPECT_LE((m.drift - Eigen::MatrixXd(m.energies.asDiagonal())).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE((m.control - m.control.transpose()).cwiseAbs().maxCoeff(), 0.0);
  // Parity: the drive only connects states of opposite parity.
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 10; ++c)
      if ((r + c) % 2 == 0) EXPECT_LE(std::abs(m.control(r, c)), 1e-12) << r << " " << c;
  EXPECT_GT(std::abs(m.control(1, 0)), 0.9);
}

TEST(Oscillator, BasisEqualToLevelsIsBareTruncation) {
  auto s = make_spec(0.12, 10);
  s.basis_levels = 10;
  const auto m = build_model(s);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.h_full);
  EXPECT_LE((m.energies - solver.eigenvalues()).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::MatrixXd projected = m.eigenstates.transpose() * m.x_op * m.eigenstates;
  EXPECT_LE((m.control - projected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Oscillator, RetainedSpectrumIndependentOfLevels) {
  const auto small = build_model(make_spec(0.12, 10));
  const auto large = build_model(make_spec(0.12, 14));
  for (int n = 0; n < 10; ++n) EXPECT_NEAR(small.energies(n), large.energies(n), 1e-12) << n;
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 10; ++c) EXPECT_NEAR(std::abs(small.control(r, c)), std::abs(large.control(r, c)), 1e-12);
}

TEST(Oscillator, DefaultBasisIsConverged) {
  for (double delta : {0.05, 0.3, 0.5}) {
    auto s = make_spec(delta, 14);
    const auto m = build_model(s);
    s.basis_levels = 96;
    const auto wide = build_model(s);
    EXPECT_LE((m.energies - wide.energies).cwiseAbs().maxCoeff(), 1e-9) << delta;
    EXPECT_LE((m.control.cwiseAbs() - wide.control.cwiseAbs()).cwiseAbs().maxCoeff(), 1e-9) << delta;
  }
}

TEST(Oscillator, Validation) {
  {
    auto s = make_spec(0.1, 10);
    s.basis_levels = 9;
    EXPECT_THROW(build_model(s), std::invalid_argument);
  }
  EXPECT_THROW(build_model(make_spec(-0.1, 10)), std::invalid_argument);
  EXPECT_THROW(build_model(make_spec(0.1, 1)), std::invalid_argument);
  EXPECT_THROW(build_model(make_spec(std::nan(""), 10)), std::invalid_argument);
  OscillatorSpec s;
  s.omega0 = 0.0;
  EXPECT_THROW(validate(s), std::invalid_argument);
  EXPECT_TRUE(spec_warnings(OscillatorSpec{}).empty());
  EXPECT_EQ(spec_warnings(make_spec(0.7, 10)).size(), 1u);
}
