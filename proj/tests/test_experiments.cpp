#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "duffgrape/experiments.hpp"
#include "support.hpp"

using namespace duffgrape;

namespace {

OscillatorSpec spec_with(double delta) {
  OscillatorSpec s;
  s.delta = delta;
  return s;
}

double area(const ControlPulse& p) {
  return std::accumulate(p.amplitudes.begin(), p.amplitudes.end(), 0.0) * p.slice_width();
}

}  // namespace

TEST(LevelPair, ParseAndLabel) {
  for (const char* text : {"0-1", "0->1", "01", " 0 - 1 "}) {
    const auto p = LevelPair::parse(text);
    EXPECT_EQ(p.initial, 0) << text;
    EXPECT_EQ(p.target, 1) << text;
  }
  EXPECT_EQ(LevelPair::parse("1-2").label(), "1-2");
  EXPECT_THROW(LevelPair::parse("a-b"), std::invalid_argument);
  EXPECT_THROW(LevelPair::parse("1-1-2"), std::invalid_argument);
}

TEST(SlicePolicy, WidthAndMinimum) {
  const SlicePolicy p;
  EXPECT_EQ(p.slices_for(3.0), 101);
  EXPECT_EQ(p.slices_for(10.1), 101);
  EXPECT_EQ(p.slices_for(20.0), 200);
  EXPECT_EQ(p.slices_for(20.05), 201);
  for (double t : {11.0, 33.3, 150.0}) EXPECT_LE(t / p.slices_for(t), 0.1 + 1e-15);
}

TEST(RescalePulse, PreservesArea) {
  ControlPulse p = ControlPulse::zeros(10.0, 101);
  for (int j = 0; j < 101; ++j) p.amplitudes[j] = std::sin(0.3 * j) + 0.2;
  const auto q = rescale_pulse(p, 7.0, 150);
  EXPECT_EQ(q.n_slices(), 150);
  EXPECT_DOUBLE_EQ(q.total_time, 7.0);
  EXPECT_NEAR(area(q), area(p), 0.02 * std::abs(area(p)));
  const auto same = rescale_pulse(p, 10.0, 101);
  for (int j = 0; j < 101; ++j) EXPECT_NEAR(same.amplitudes[j], p.amplitudes[j], 1e-14);
}

TEST(LogSpaced, Endpoints) {
  const auto v = log_spaced(0.05, 0.3, 6);
  ASSERT_EQ(v.size(), 6u);
  EXPECT_EQ(v.front(), 0.05);
  EXPECT_EQ(v.back(), 0.3);
  for (std::size_t i = 2; i < v.size(); ++i) EXPECT_NEAR(v[i] / v[i - 1], v[1] / v[0], 1e-12);
  EXPECT_THROW(log_spaced(0.0, 1.0, 3), std::invalid_argument);
}

TEST(Prepare, GroundStateIsTrivial) {
  const auto run = prepare_fock(spec_with(0.12), 0, 10.0, 101, 1);
  EXPECT_TRUE(run.result.converged);
  EXPECT_EQ(run.result.iterations_used, 0);
  for (int j = 0; j < run.populations.rows(); ++j) EXPECT_NEAR(run.populations(j, 0), 1.0, 1e-12);
}

TEST(Prepare, FirstExcitedState) {
  const auto run = prepare_fock(spec_with(0.12), 1, default_preparation_time(1), 201, 1);
  EXPECT_TRUE(run.result.converged);
  EXPECT_GE(run.result.fidelity, 0.9999);
  const auto last = run.populations.rows() - 1;
  EXPECT_NEAR(run.populations(last, 1), run.result.fidelity, 1e-12);
  ASSERT_FALSE(run.spectrum.peaks.empty());
  EXPECT_EQ(run.spectrum.peaks.front().nearest_transition, 0);
}

TEST(Truncation, IdenticalDimensionsAgree) {
  const auto pulse = initial_guess(GrapeConfig{}, spec_with(0.12));
  EXPECT_EQ(truncation_check(spec_with(0.12), pulse, LevelPair{0, 1}, {10, 10}), 0.0);
}

TEST(Truncation, SecondStatePulseInsensitiveToExtraLevels) {
  const auto run = prepare_fock(spec_with(0.12), 2, default_preparation_time(2), 201, 1);
  ASSERT_TRUE(run.result.converged);
  EXPECT_LE(truncation_check(spec_with(0.12), run.result.pulse, LevelPair{0, 2}, {10, 14}), 1e-6);
}

TEST(Truncation, UnderTruncatedThirdStatePulse) {
  const auto run = prepare_fock(spec_with(0.12), 3, default_preparation_time(3), 201, 1);
  ASSERT_TRUE(run.result.converged);
  EXPECT_GT(truncation_check(spec_with(0.12), run.result.pulse, LevelPair{0, 3}, {4, 10}), 1e-2);
  EXPECT_THROW(truncation_check(spec_with(0.12), run.result.pulse, LevelPair{0, 3}, {3, 10}), std::invalid_argument);
}

TEST(MinimalTime, ZeroGoalReturnsLowerBracket) {
  MinimalTimeOptions o;
  o.fidelity_goal = 0.0;
  o.t_lo = 2.5;
  EXPECT_EQ(minimal_time(spec_with(0.12), LevelPair{0, 1}, o, 1).t_min, 2.5);
  o.t_hi = 1.0;
  EXPECT_THROW(minimal_time(spec_with(0.12), LevelPair{0, 1}, o, 1), std::invalid_argument);
}

TEST(MinimalTime, WeakerGoalNeedsNoMoreTime) {
  MinimalTimeOptions o;
  o.t_lo = 2.0;
  o.t_hi = 6.0;
  o.time_tolerance = 0.05;
  o.grape.max_iterations = 1500;
  o.grape.restarts = 1;
  o.fidelity_goal = 0.999;
  const auto weak = minimal_time(spec_with(0.3), LevelPair{0, 1}, o, 3);
  o.fidelity_goal = 0.99999;
  const auto strong = minimal_time(spec_with(0.3), LevelPair{0, 1}, o, 3);
  EXPECT_LE(weak.t_min, strong.t_min);
  EXPECT_GE(strong.fidelity, 0.99999);
  EXPECT_GE(weak.fidelity, 0.999);
  EXPECT_EQ(strong.pulse.total_time, strong.t_min);
  for (const auto& p : strong.probes) {
    if (p.success) EXPECT_GE(p.total_time, strong.t_min);
  }
}

TEST(Sweep, SyntheticInverseLaw) {
  const auto deltas = log_spaced(0.05, 0.3, 6);
  auto cell = [](double d) { return ScalingPoint{d, 1.0 / d, 1.0, 0, true, {}}; };
  const auto curve = run_sweep(deltas, "0-1", 0.99999, 0.01, cell, 1);
  ASSERT_TRUE(curve.fit_valid);
  EXPECT_NEAR(curve.fit.slope, -1.0, 1e-12);
  EXPECT_EQ(curve.points.size(), 6u);
}

TEST(Sweep, OrderIndependentOfJobCount) {
  const std::vector<double> deltas{0.3, 0.05, 0.12, 0.2, 0.08};
  auto cell = [](double d) {
    if (d == 0.2) throw std::runtime_error("bracket failure");
    return ScalingPoint{d, 2.0 * std::pow(d, -0.7), 1.0, 1, true, {}};
  };
  const auto a = run_sweep(deltas, "1-2", 0.99999, 0.01, cell, 1);
  const auto b = run_sweep(deltas, "1-2", 0.99999, 0.01, cell, 4);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].delta, b.points[i].delta);
    EXPECT_EQ(a.points[i].t_min, b.points[i].t_min);
    EXPECT_EQ(a.points[i].ok, b.points[i].ok);
    if (i > 0) EXPECT_LT(a.points[i - 1].delta, a.points[i].delta);
  }
  EXPECT_FALSE(a.points[3].ok);
  EXPECT_EQ(a.points[3].error, "bracket failure");
  EXPECT_EQ(a.fit.slope, b.fit.slope);
  EXPECT_NEAR(a.fit.slope, -0.7, 1e-12);
  EXPECT_EQ(a.fit.n_points, 4);
}

TEST(Sweep, TooFewPointsRejected) {
  EXPECT_THROW(scaling_sweep(OscillatorSpec{}, {0.1, 0.2}, LevelPair{0, 1}, MinimalTimeOptions{}, 1),
               std::invalid_argument);
}

TEST(Baseline, RabiPulseCalibration) {
  const auto m = build_model(spec_with(0.12));
  const double t = 300.0;
  const auto p = rabi_pulse(m, t, 3000);
  const double coupling = std::abs(m.control(1, 0));
  double peak = 0.0;
  for (double f : p.amplitudes) peak = std::max(peak, std::abs(f));
  EXPECT_NEAR(peak * t * coupling, std::numbers::pi, 1e-3);
  const double w10 = m.energies(1) - m.energies(0);
  EXPECT_NEAR(p.amplitudes[0], peak * std::cos(w10 * p.slice_time(0)), 1e-9);
}

TEST(Baseline, ShorterAtLargerAnharmonicity) {
  BaselineOptions o;
  o.fidelity_goal = 0.999;
  o.time_tolerance = 0.05;
  const auto small = rabi_baseline(spec_with(0.05), o);
  const auto large = rabi_baseline(spec_with(0.5), o);
  EXPECT_LT(large.pulse_time, 0.5 * small.pulse_time);
  EXPECT_LE(small.error, 1e-3);
  EXPECT_LE(large.error, 1e-3);
  EXPECT_GE(small.leakage, 0.0);
}

TEST(ZeroPad, KeepsFidelityOfEigenstateTransfer) {
  const auto spec = spec_with(0.12);
  const auto m = build_model(spec);
  const auto p = testing_support::random_pulse(9, 12.0, 120, 0.8);
  const auto padded = zero_pad_pulse(p, 20.0, 200);
  for (int j = 0; j < 120; ++j) EXPECT_EQ(padded.amplitudes[j], p.amplitudes[j]);
  for (int j = 120; j < 200; ++j) EXPECT_EQ(padded.amplitudes[j], 0.0);
  EXPECT_NEAR(transfer_fidelity(m, padded, LevelPair{0, 1}), transfer_fidelity(m, p, LevelPair{0, 1}), 1e-12);
  EXPECT_THROW(zero_pad_pulse(p, 10.0, 100), std::invalid_argument);
}

TEST(ErrorVsTime, ErrorDoesNotGrowWithTime) {
  MinimalTimeOptions o;
  o.grape.max_iterations = 300;
  o.grape.restarts = 0;
  o.slices.min_slices = 2;  // equal slice widths make the padding exact
  const auto pts = error_vs_time(spec_with(0.12), LevelPair{0, 1}, {4.0, 6.0, 8.0, 10.0}, o, 1);
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (!pts[i].converged) EXPECT_LE(pts[i].error, pts[i - 1].error) << pts[i].total_time;
}

TEST(ErrorVsTime, ShorterPulsesAreWorse) {
  MinimalTimeOptions o;
  o.grape.max_iterations = 800;
  o.grape.restarts = 0;
  const auto pts = error_vs_time(spec_with(0.12), LevelPair{0, 1}, {2.0, 8.0, 14.0}, o, 1);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[0].total_time, 2.0);
  EXPECT_GT(pts[0].error, pts[2].error);
  for (const auto& p : pts) EXPECT_FALSE(p.converged);
}
