#include "duffgrape/grape.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace duffgrape {

namespace {

using cd = std::complex<double>;

constexpr int kSuccessesBeforeRestore = 5;
constexpr double kMinStepFraction = 1e-12;

struct Evaluation {
  Trajectory forward;
  double fidelity = 0.0;
};

Evaluation evaluate(const ModelMatrices& model, const ControlPulse& pulse, const Eigen::VectorXcd& psi_i,
                    const Eigen::VectorXcd& psi_f) {
  Evaluation ev{propagate(model, pulse, psi_i), 0.0};
  ev.fidelity = fidelity(ev.forward.final_state(), psi_f);
  if (!std::isfinite(ev.fidelity)) throw std::runtime_error("optimize: objective evaluated to NaN");
  return ev;
}

// Functional gradient dPhi/df(t), i.e. the per-slice gradient divided by dt.
std::vector<double> ascent_direction(const ModelMatrices& model, const Evaluation& ev,
                                     const Eigen::VectorXcd& psi_f, double dt) {
  auto g = gradient(ev.forward, back_propagate(ev.forward, psi_f), model.control, dt);
  for (double& v : g) v /= dt;
  return g;
}

double rabi_amplitude(const GrapeConfig& config) {
  return std::numbers::pi / (config.total_time * std::sqrt(config.initial_level + 1.0));
}

struct Attempt {
  ControlPulse best;
  double best_fidelity = -1.0;
  bool converged = false;
  int steps = 0;
  int boosts = 0;
};

Attempt ascend(const GrapeConfig& config, const ModelMatrices& model, const Eigen::VectorXcd& psi_i,
               const Eigen::VectorXcd& psi_f, ControlPulse pulse, std::vector<IterationRecord>& history) {
  const double dt = pulse.slice_width();
  const double base = config.step_size;
  Evaluation current = evaluate(model, pulse, psi_i, psi_f);
  std::vector<double> grad = ascent_direction(model, current, psi_f, dt);

  Attempt out;
  out.best = pulse;
  out.best_fidelity = current.fidelity;

  double step = base;
  int successes = 0;
  int boost_left = 0;
  int boost_level = 0;
  int stalled_boosts = 0;
  int quiet_since = 0;  // first iteration of the current stall-detection window
  double best_at_last_boost = current.fidelity;
  std::vector<double> trace;
  std::vector<double> velocity(grad.size(), 0.0);

  for (int it = 0;; ++it) {
    const double gmax = std::abs(*std::max_element(grad.begin(), grad.end(), [](double a, double b) {
      return std::abs(a) < std::abs(b);
    }));
    const double factor = boost_left > 0 ? std::ldexp(1.0, boost_level) : 1.0;
    history.push_back({current.fidelity, gmax, step * factor});
    trace.push_back(current.fidelity);

    if (current.fidelity >= config.fidelity_goal) {
      out.converged = true;
      break;
    }
    if (it >= config.max_iterations) break;

    if (boost_left == 0 && it - quiet_since >= config.patience) {
      const double before = trace[static_cast<std::size_t>(it - config.patience)];
      const double rel = (current.fidelity - before) / std::max(before, 1e-300);
      if (rel < config.stall_tolerance) {
        if (out.best_fidelity > best_at_last_boost * (1.0 + config.stall_tolerance)) {
          stalled_boosts = 0;
          boost_level = 0;
        }
        if (stalled_boosts >= config.max_stalled_boosts) break;
        best_at_last_boost = out.best_fidelity;
        ++boost_level;
        ++stalled_boosts;
        ++out.boosts;
        boost_left = config.escape_boost_iters;
        step = base;
        successes = 0;
      }
    }

    const double scale = step * (boost_left > 0 ? std::ldexp(1.0, boost_level) : 1.0);
    ControlPulse candidate = pulse;
    std::vector<double> update(grad.size());
    for (std::size_t j = 0; j < grad.size(); ++j) {
      update[j] = config.momentum * velocity[j] + scale * grad[j];
      candidate.amplitudes[j] += update[j];
    }
    Evaluation next = evaluate(model, candidate, psi_i, psi_f);
    ++out.steps;

    bool accept = false;
    if (boost_left > 0) {
      accept = true;
      if (--boost_left == 0) quiet_since = it + 1;
    } else if (next.fidelity >= current.fidelity) {
      accept = true;
      if (++successes >= kSuccessesBeforeRestore && step < base) {
        step = std::min(base, 2.0 * step);
        successes = 0;
      }
    } else {
      step *= 0.5;
      successes = 0;
      std::fill(velocity.begin(), velocity.end(), 0.0);
      if (step < base * kMinStepFraction) break;
    }

    if (accept) {
      velocity = std::move(update);
      pulse = std::move(candidate);
      current = std::move(next);
      grad = ascent_direction(model, current, psi_f, dt);
      if (current.fidelity > out.best_fidelity) {
        out.best_fidelity = current.fidelity;
        out.best = pulse;
      }
    }
  }
  return out;
}

}  // namespace

void validate(const GrapeConfig& config) {
  if (!(config.fidelity_goal > 0.0 && config.fidelity_goal < 1.0))
    throw std::invalid_argument("grape: fidelity_goal must lie in (0, 1)");
  if (config.n_slices < 1) throw std::invalid_argument("grape: n_slices must be >= 1");
  if (!(config.step_size > 0.0) || !std::isfinite(config.step_size))
    throw std::invalid_argument("grape: step_size must be positive");
  if (!(config.total_time > 0.0) || !std::isfinite(config.total_time))
    throw std::invalid_argument("grape: total_time must be positive");
  if (config.initial_level < 0 || config.target_level < 0)
    throw std::invalid_argument("grape: levels must be non-negative");
  if (config.max_iterations < 0 || config.restarts < 0 || config.escape_boost_iters < 0 || config.patience < 1 ||
      config.max_stalled_boosts < 0)
    throw std::invalid_argument("grape: iteration counts must be non-negative");
}

ControlPulse initial_guess(const GrapeConfig& config, const OscillatorSpec& spec) {
  ControlPulse pulse = ControlPulse::zeros(config.total_time, config.n_slices);
  if (config.initial_level == config.target_level) return pulse;
  const double carrier = spec.omega() + spec.delta * config.initial_level;
  const double amp = rabi_amplitude(config);
  for (int j = 0; j < pulse.n_slices(); ++j) pulse.amplitudes[j] = amp * std::cos(carrier * pulse.slice_time(j));
  return pulse;
}

double fidelity(const Eigen::VectorXcd& final_state, const Eigen::VectorXcd& target) {
  return std::min(1.0, std::norm(target.dot(final_state)));
}

std::vector<double> gradient(const Trajectory& forward, const AdjointTrajectory& adjoint,
                             const Eigen::MatrixXd& control_op, double slice_width) {
  const std::size_t n = forward.unitaries.size();
  if (adjoint.states.size() != n + 1 || forward.states.size() != n + 1)
    throw std::invalid_argument("gradient: forward and adjoint trajectories differ in length");
  std::vector<double> g(n);
  for (std::size_t j = 1; j <= n; ++j) {
    const Eigen::VectorXcd& rho = forward.states[j];
    const Eigen::VectorXcd& lambda = adjoint.states[j];
    const cd x_elem = lambda.dot(control_op * rho);
    const cd overlap = rho.dot(lambda);
    g[j - 1] = 2.0 * slice_width * (x_elem * overlap).imag();
  }
  return g;
}

std::vector<double> gradient(const ModelMatrices& model, const ControlPulse& pulse, const Eigen::VectorXcd& psi_i,
                             const Eigen::VectorXcd& psi_f) {
  const Trajectory forward = propagate(model, pulse, psi_i);
  return gradient(forward, back_propagate(forward, psi_f), model.control, pulse.slice_width());
}

GrapeResult optimize(const GrapeConfig& config, const OscillatorSpec& spec) {
  return optimize(config, spec, build_model(spec));
}

GrapeResult optimize(const GrapeConfig& config, const OscillatorSpec& spec, const ModelMatrices& model,
                     std::optional<ControlPulse> start) {
  validate(config);
  if (spec.levels < config.target_level + 3 || spec.levels < config.initial_level + 3)
    throw std::invalid_argument("optimize: levels must exceed target level by at least 3");
  const Eigen::VectorXcd psi_i = fock_state(model, config.initial_level);
  const Eigen::VectorXcd psi_f = fock_state(model, config.target_level);
  const ControlPulse guess = start ? *start : initial_guess(config, spec);
  if (guess.n_slices() != config.n_slices) throw std::invalid_argument("optimize: start pulse has wrong slice count");

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  const double noise_amp = 0.1 * rabi_amplitude(config);

  GrapeResult result;
  result.pulse = guess;
  result.fidelity = -1.0;
  for (int attempt = 0; attempt <= config.restarts; ++attempt) {
    ControlPulse seed_pulse = guess;
    if (attempt > 0)
      for (double& f : seed_pulse.amplitudes) f += noise_amp * noise(rng);
    Attempt a = ascend(config, model, psi_i, psi_f, std::move(seed_pulse), result.history);
    ++result.attempts;
    result.iterations_used += a.steps;
    result.boosts_applied += a.boosts;
    if (a.best_fidelity > result.fidelity) {
      result.fidelity = a.best_fidelity;
      result.pulse = std::move(a.best);
    }
    if (a.converged) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace duffgrape
