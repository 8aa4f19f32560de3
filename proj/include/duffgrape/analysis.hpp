#pragma once

#include <utility>
#include <vector>

#include "duffgrape/dynamics.hpp"

namespace duffgrape {

struct SpectralPeak {
  double frequency = 0.0;
  double magnitude = 0.0;
  /// Index n of the nearest labeling frequency (w_{n+1,n}); -1 when no labels were given.
  int nearest_transition = -1;
  double label_frequency = 0.0;
};

/// One-sided discrete Fourier decomposition of a piecewise-constant pulse.
///
/// Bin k sits at w_k = 2 pi k / T for k = 0..N/2. Coefficients are the DFT of
/// the amplitude sequence referenced to slice midpoints, scaled by sqrt(w_k / N)
/// with w_k = 1 for the DC and Nyquist bins and 2 otherwise, so that
/// sum_k |c_k|^2 == sum_j f_j^2. No window is applied.
struct PulseSpectrum {
  std::vector<double> frequencies;
  std::vector<double> real_coeffs;
  std::vector<double> imag_coeffs;
  std::vector<SpectralPeak> peaks;  // sorted by descending magnitude

  double magnitude(std::size_t k) const;
  double resolution() const { return frequencies.size() > 1 ? frequencies[1] : 0.0; }
};

/// Peaks are local maxima of the magnitude at or above `peak_threshold` times
/// the global maximum, each labeled with the nearest entry of `transition_labels`.
PulseSpectrum pulse_spectrum(const ControlPulse& pulse, const std::vector<double>& transition_labels = {},
                             double peak_threshold = 0.1);

struct FitResult {
  double slope = 0.0;      // power-law exponent or exponential rate
  double amplitude = 0.0;  // prefactor
  double ci95 = 0.0;       // 95% half-width on the slope
  double r2 = 0.0;
  int n_points = 0;
};

/// Ordinary least squares y = a + b x with Student-t 95% interval on b.
/// r2 is 0 when y has no variance.
FitResult linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// t = A * delta^alpha fitted on (log delta, log t). Requires >= 3 strictly positive points.
FitResult fit_power_law(const std::vector<std::pair<double, double>>& points);

/// error = A * exp(rate * t) fitted on (t, log error). Errors must lie in (0, 1).
FitResult fit_exponential_error(const std::vector<std::pair<double, double>>& points);

/// Two-sided 95% Student-t quantile for the given degrees of freedom.
double student_t95(int dof);

}  // namespace duffgrape
