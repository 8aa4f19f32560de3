#include "duffgrape/duffgrape.h"

#include <filesystem>
#include <ios>
#include <stdexcept>
#include <string>

#include "duffgrape/io.hpp"
#include "duffgrape/jobs.hpp"
#include "duffgrape/version.hpp"

struct dg_model {
  duffgrape::OscillatorSpec spec;
  duffgrape::ModelMatrices matrices;
};

struct dg_result {
  duffgrape::GrapeResult result;
};

namespace {

using namespace duffgrape;

thread_local std::string g_last_error;

dg_status fail(dg_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
dg_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const std::invalid_argument& e) {
    return fail(DG_INVALID_ARGUMENT, e.what());
  } catch (const std::out_of_range& e) {
    return fail(DG_INVALID_ARGUMENT, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(DG_INVALID_ARGUMENT, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(DG_IO_ERROR, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(DG_IO_ERROR, e.what());
  } catch (const std::runtime_error& e) {
    return fail(DG_NUMERICAL_ERROR, e.what());
  } catch (const std::exception& e) {
    return fail(DG_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(DG_INTERNAL_ERROR, "unknown error");
  }
}

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

OscillatorSpec to_spec(const dg_oscillator* s) {
  require(s != nullptr, "oscillator spec is null");
  return OscillatorSpec{s->delta, s->omega0, s->levels, s->buffer_levels, s->basis_levels};
}

GrapeConfig to_config(const dg_grape_config* c) {
  require(c != nullptr, "grape config is null");
  GrapeConfig g = default_grape_settings();
  g.initial_level = c->initial_level;
  g.target_level = c->target_level;
  g.total_time = c->total_time;
  g.n_slices = c->n_slices;
  g.fidelity_goal = c->fidelity_goal;
  g.max_iterations = c->max_iterations;
  g.step_size = c->step_size;
  g.momentum = c->momentum;
  g.escape_boost_iters = c->escape_boost_iters;
  g.restarts = c->restarts;
  g.seed = c->seed;
  return g;
}

MinimalTimeOptions to_options(const dg_sweep_options* o) {
  require(o != nullptr, "sweep options are null");
  MinimalTimeOptions m;
  m.fidelity_goal = o->fidelity_goal;
  m.t_lo = o->t_lo;
  m.t_hi = o->t_hi;
  m.time_tolerance = o->time_tolerance;
  m.slices.max_slice_width = o->max_slice_width;
  m.slices.min_slices = o->min_slices;
  m.grape.max_iterations = o->max_iterations;
  m.grape.restarts = o->restarts;
  require(m.slices.max_slice_width > 0.0 && m.slices.min_slices >= 1, "invalid slice policy");
  require(m.time_tolerance > 0.0, "time tolerance must be positive");
  return m;
}

std::vector<double> to_vector(const double* data, size_t n, const char* what) {
  require(data != nullptr || n == 0, what);
  return std::vector<double>(data, data + n);
}

ControlPulse to_pulse(const double* amplitudes, size_t n, double total_time) {
  require(amplitudes != nullptr && n > 0, "amplitudes must be non-empty");
  ControlPulse p;
  p.total_time = total_time;
  p.amplitudes.assign(amplitudes, amplitudes + n);
  validate(p);
  return p;
}

std::filesystem::path to_dir(const char* output_dir) {
  require(output_dir != nullptr && *output_dir != '\0', "output directory is empty");
  std::filesystem::path dir(output_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

nlohmann::json to_echo(const char* config_json) {
  if (config_json == nullptr) return nlohmann::json::object();
  return nlohmann::json::parse(config_json);
}

dg_status to_status(jobs::Outcome o) { return o == jobs::Outcome::ok ? DG_OK : DG_NOT_CONVERGED; }

dg_status copy_out(const std::vector<double>& values, double* out, size_t cap) {
  require(out != nullptr, "output buffer is null");
  if (cap < values.size())
    return fail(DG_INVALID_ARGUMENT, "output buffer holds " + std::to_string(cap) + " values, need " +
                                         std::to_string(values.size()));
  std::copy(values.begin(), values.end(), out);
  return DG_OK;
}

}  // namespace

extern "C" {

const char* dg_version(void) { return kVersion; }

const char* dg_last_error(void) { return g_last_error.c_str(); }

void dg_oscillator_default(dg_oscillator* spec) {
  if (!spec) return;
  const OscillatorSpec d;
  *spec = dg_oscillator{d.delta, d.omega0, d.levels, d.buffer_levels, d.basis_levels};
}

dg_status dg_model_create(const dg_oscillator* spec, dg_model** out) {
  return guarded([&] {
    require(out != nullptr, "output handle is null");
    const OscillatorSpec s = to_spec(spec);
    *out = new dg_model{s, build_model(s)};
    return DG_OK;
  });
}

void dg_model_destroy(dg_model* model) { delete model; }

int dg_model_dim(const dg_model* model) { return model ? model->matrices.dim : 0; }

dg_status dg_model_energies(const dg_model* model, double* out, size_t cap) {
  return guarded([&] {
    require(model != nullptr, "model is null");
    const auto& e = model->matrices.energies;
    return copy_out(std::vector<double>(e.data(), e.data() + e.size()), out, cap);
  });
}

dg_status dg_transition_frequencies(const dg_model* model, int n_max, double* out, size_t cap) {
  return guarded([&] {
    require(model != nullptr, "model is null");
    return copy_out(transition_frequencies(model->spec, n_max), out, cap);
  });
}

dg_status dg_rwa_exact_ratio(const dg_oscillator* spec, int n_max, double* out, size_t cap) {
  return guarded([&] { return copy_out(rwa_exact_ratio(to_spec(spec), n_max), out, cap); });
}

dg_status dg_transfer_fidelity(const dg_model* model, const double* amplitudes, size_t n_slices, double total_time,
                               int initial_level, int target_level, double* fidelity) {
  return guarded([&] {
    require(model != nullptr && fidelity != nullptr, "null argument");
    *fidelity = transfer_fidelity(model->matrices, to_pulse(amplitudes, n_slices, total_time),
                                  LevelPair{initial_level, target_level});
    return DG_OK;
  });
}

dg_status dg_gradient(const dg_model* model, const double* amplitudes, size_t n_slices, double total_time,
                      int initial_level, int target_level, double* gradient_out) {
  return guarded([&] {
    require(model != nullptr, "model is null");
    const auto& m = model->matrices;
    const auto g = gradient(m, to_pulse(amplitudes, n_slices, total_time), fock_state(m, initial_level),
                            fock_state(m, target_level));
    return copy_out(g, gradient_out, n_slices);
  });
}

void dg_grape_config_default(dg_grape_config* config) {
  if (!config) return;
  const GrapeConfig g = default_grape_settings();
  *config = dg_grape_config{g.initial_level, g.target_level, g.total_time,         g.n_slices,
                            g.fidelity_goal, g.max_iterations, g.step_size,        g.momentum,
                            g.escape_boost_iters, g.restarts, g.seed};
}

dg_status dg_optimize(const dg_model* model, const dg_grape_config* config, dg_result** out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    auto* r = new dg_result{optimize(to_config(config), model->spec, model->matrices)};
    *out = r;
    return r->result.converged ? DG_OK : DG_NOT_CONVERGED;
  });
}

void dg_result_destroy(dg_result* result) { delete result; }

double dg_result_fidelity(const dg_result* result) { return result ? result->result.fidelity : 0.0; }

int dg_result_converged(const dg_result* result) { return result && result->result.converged ? 1 : 0; }

int dg_result_iterations(const dg_result* result) { return result ? result->result.iterations_used : 0; }

size_t dg_result_slices(const dg_result* result) { return result ? result->result.pulse.amplitudes.size() : 0; }

dg_status dg_result_amplitudes(const dg_result* result, double* out, size_t cap) {
  return guarded([&] {
    require(result != nullptr, "result is null");
    return copy_out(result->result.pulse.amplitudes, out, cap);
  });
}

double dg_default_preparation_time(int target_level) { return default_preparation_time(target_level); }

dg_status dg_run_prepare(const dg_prepare_job* job, const char* output_dir, const char* config_json) {
  return guarded([&] {
    require(job != nullptr, "job is null");
    jobs::PrepareJob j;
    j.spec = to_spec(&job->oscillator);
    j.grape = to_config(&job->grape);
    j.target_level = job->grape.target_level;
    j.total_time = job->grape.total_time;
    j.n_slices = job->grape.n_slices;
    j.seed = job->grape.seed;
    const auto dir = to_dir(output_dir);
    jobs::write_manifest(dir, "prepare", to_echo(config_json));
    return to_status(jobs::run_prepare(j, dir));
  });
}

void dg_sweep_options_default(dg_sweep_options* options) {
  if (!options) return;
  const MinimalTimeOptions m;
  *options = dg_sweep_options{m.fidelity_goal,
                              m.t_lo,
                              m.t_hi,
                              m.time_tolerance,
                              m.slices.max_slice_width,
                              m.slices.min_slices,
                              m.grape.max_iterations,
                              m.grape.restarts,
                              1,
                              1};
}

dg_status dg_run_scaling(const dg_oscillator* base, const double* deltas, size_t n_deltas, int initial_level,
                         int target_level, const dg_sweep_options* options, const char* output_dir,
                         const char* config_json) {
  return guarded([&] {
    jobs::ScalingJob j;
    j.spec = to_spec(base);
    j.deltas = to_vector(deltas, n_deltas, "deltas are null");
    j.pair = LevelPair{initial_level, target_level};
    j.options = to_options(options);
    j.seed = options->seed;
    j.jobs = options->jobs;
    const auto dir = to_dir(output_dir);
    jobs::write_manifest(dir, "scaling", to_echo(config_json));
    return to_status(jobs::run_scaling(j, dir));
  });
}

dg_status dg_run_baseline(const dg_oscillator* base, const double* deltas, size_t n_deltas,
                          const dg_sweep_options* options, const char* output_dir, const char* config_json) {
  return guarded([&] {
    require(options != nullptr, "sweep options are null");
    jobs::BaselineJob j;
    j.spec = to_spec(base);
    j.deltas = to_vector(deltas, n_deltas, "deltas are null");
    j.options.fidelity_goal = options->fidelity_goal;
    j.options.time_tolerance = options->time_tolerance;
    j.options.slices.max_slice_width = options->max_slice_width;
    j.options.slices.min_slices = options->min_slices;
    j.jobs = options->jobs;
    const auto dir = to_dir(output_dir);
    jobs::write_manifest(dir, "baseline", to_echo(config_json));
    return to_status(jobs::run_baseline(j, dir));
  });
}

dg_status dg_run_error_vs_time(const dg_oscillator* spec, const double* times, size_t n_times, int initial_level,
                               int target_level, const dg_sweep_options* options, const char* output_dir,
                               const char* config_json) {
  return guarded([&] {
    jobs::ErrorVsTimeJob j;
    j.spec = to_spec(spec);
    j.pair = LevelPair{initial_level, target_level};
    j.times = to_vector(times, n_times, "times are null");
    j.options = to_options(options);
    j.seed = options->seed;
    const auto dir = to_dir(output_dir);
    jobs::write_manifest(dir, "error-vs-time", to_echo(config_json));
    return to_status(jobs::run_error_vs_time(j, dir));
  });
}

dg_status dg_run_spectrum_check(const double* deltas, size_t n_deltas, double omega0, int n_max,
                                const char* output_dir, const char* config_json) {
  return guarded([&] {
    jobs::SpectrumCheckJob j;
    j.deltas = to_vector(deltas, n_deltas, "deltas are null");
    j.omega0 = omega0;
    j.n_max = n_max;
    const auto dir = to_dir(output_dir);
    jobs::write_manifest(dir, "spectrum-check", to_echo(config_json));
    return to_status(jobs::run_spectrum_check(j, dir));
  });
}

dg_status dg_replay_result(const char* result_json_path, double* fidelity) {
  return guarded([&] {
    require(result_json_path != nullptr && fidelity != nullptr, "null argument");
    *fidelity = io::replay_result(result_json_path);
    return DG_OK;
  });
}

}  // extern "C"
