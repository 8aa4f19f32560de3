#include "duffgrape/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

namespace duffgrape {

double PulseSpectrum::magnitude(std::size_t k) const { return std::hypot(real_coeffs.at(k), imag_coeffs.at(k)); }

PulseSpectrum pulse_spectrum(const ControlPulse& pulse, const std::vector<double>& transition_labels,
                             double peak_threshold) {
  validate(pulse);
  const int n = pulse.n_slices();
  if (n < 2) throw std::invalid_argument("pulse_spectrum: at least two slices required");
  const double two_pi = 2.0 * std::numbers::pi;
  const int bins = n / 2 + 1;

  PulseSpectrum spec;
  spec.frequencies.resize(bins);
  spec.real_coeffs.resize(bins);
  spec.imag_coeffs.resize(bins);
  for (int k = 0; k < bins; ++k) {
    const double w = two_pi * k / pulse.total_time;
    double re = 0.0, im = 0.0;
    for (int j = 0; j < n; ++j) {
      // Phase taken from the exact integer product so the sum is reproducible.
      const double phase = two_pi * std::fmod(static_cast<double>(k) * (2 * j + 1), 2.0 * n) / (2.0 * n);
      re += pulse.amplitudes[j] * std::cos(phase);
      im -= pulse.amplitudes[j] * std::sin(phase);
    }
    const bool edge = (k == 0) || (n % 2 == 0 && k == n / 2);
    const double norm = std::sqrt((edge ? 1.0 : 2.0) / n);
    spec.frequencies[k] = w;
    spec.real_coeffs[k] = re * norm;
    spec.imag_coeffs[k] = im * norm;
  }

  double global_max = 0.0;
  for (int k = 0; k < bins; ++k) global_max = std::max(global_max, spec.magnitude(k));
  if (global_max == 0.0) return spec;

  for (int k = 0; k < bins; ++k) {
    const double m = spec.magnitude(k);
    const double left = k > 0 ? spec.magnitude(k - 1) : -1.0;
    const double right = k + 1 < bins ? spec.magnitude(k + 1) : -1.0;
    if (m < peak_threshold * global_max || m <= left || m < right) continue;
    SpectralPeak peak{spec.frequencies[k], m, -1, 0.0};
    for (std::size_t t = 0; t < transition_labels.size(); ++t) {
      if (peak.nearest_transition < 0 ||
          std::abs(transition_labels[t] - peak.frequency) < std::abs(peak.label_frequency - peak.frequency)) {
        peak.nearest_transition = static_cast<int>(t);
        peak.label_frequency = transition_labels[t];
      }
    }
    spec.peaks.push_back(peak);
  }
  std::stable_sort(spec.peaks.begin(), spec.peaks.end(),
                   [](const SpectralPeak& a, const SpectralPeak& b) { return a.magnitude > b.magnitude; });
  return spec;
}

double student_t95(int dof) {
  if (dof < 1) throw std::invalid_argument("student_t95: need at least one degree of freedom");
  boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 0.975);
}

FitResult linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 3) throw std::invalid_argument("linear_fit: need at least 3 paired points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("linear_fit: abscissae are all equal");

  FitResult fit;
  fit.n_points = static_cast<int>(n);
  fit.slope = sxy / sxx;
  fit.amplitude = my - fit.slope * mx;  // intercept; callers transform
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.amplitude + fit.slope * x[i]);
    sse += r * r;
  }
  const double se = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  fit.ci95 = student_t95(static_cast<int>(n - 2)) * se;
  fit.r2 = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 0.0;
  return fit;
}

FitResult fit_power_law(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("fit_power_law: need at least 3 points");
  std::vector<double> lx, ly;
  for (const auto& [d, t] : points) {
    if (!(d > 0.0) || !(t > 0.0) || !std::isfinite(d) || !std::isfinite(t))
      throw std::invalid_argument("fit_power_law: points must be strictly positive");
    lx.push_back(std::log(d));
    ly.push_back(std::log(t));
  }
  FitResult fit = linear_fit(lx, ly);
  fit.amplitude = std::exp(fit.amplitude);
  return fit;
}

FitResult fit_exponential_error(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("fit_exponential_error: need at least 3 points");
  std::vector<double> ts, ly;
  for (const auto& [t, e] : points) {
    if (!(e > 0.0) || !(e < 1.0) || !std::isfinite(t))
      throw std::invalid_argument("fit_exponential_error: errors must lie in (0, 1)");
    ts.push_back(t);
    ly.push_back(std::log(e));
  }
  FitResult fit = linear_fit(ts, ly);
  fit.amplitude = std::exp(fit.amplitude);
  return fit;
}

}  // namespace duffgrape
