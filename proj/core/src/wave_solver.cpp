#include "seabed/wave_solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

#include "seabed/cg.hpp"
#include "seabed/error.hpp"

namespace seabed {

void SolverConfig::validate() const {
  require(dt > 0.0, ErrorKind::config, "dt must be > 0");
  require(t_max >= dt, ErrorKind::config, "t_max must be >= dt");
  require(cg_tol > 0.0 && cg_tol < 1.0, ErrorKind::config, "cg_tol must lie in (0, 1)");
  require(cg_max_iter > 0, ErrorKind::config, "cg_max_iter must be > 0");
  require(!frequencies.empty(), ErrorKind::config, "at least one frequency is required");
  for (double f : frequencies) require(f > 0.0, ErrorKind::config, "frequencies must be > 0");
  require(record_stride >= 1, ErrorKind::config, "record_stride must be >= 1");
  require(num_records() >= 1, ErrorKind::config, "no snapshot would be recorded");
  require(threads >= 0, ErrorKind::config, "threads must be >= 0");
}

int SolverConfig::num_steps() const { return static_cast<int>(std::lround(t_max / dt)); }

WaveState zero_state(int size) {
  WaveState s;
  s.u.assign(size, 0.0);
  s.v.assign(size, 0.0);
  return s;
}

Stepper::Stepper(const OperatorSet& ops, double dt, double cg_tol, int cg_max_iter,
                 double amplitude)
    : ops_(ops), dt_(dt), tol_(cg_tol), max_iter_(cg_max_iter), amplitude_(amplitude) {
  require(dt > 0.0, ErrorKind::config, "dt must be > 0");
  inv_diag_ = ops.R.diagonal();
  for (double& d : inv_diag_) {
    require(d > 0.0, ErrorKind::domain, "R must have a positive diagonal");
    d = 1.0 / d;
  }
  const auto n = static_cast<std::size_t>(ops.size());
  rhs_.assign(n, 0.0);
  tmp_.assign(n, 0.0);
  kick1_.assign(n, 0.0);
  kick2_.assign(n, 0.0);
  vhalf_.assign(n, 0.0);
}

void Stepper::kick(const std::vector<double>& u, std::span<const double> v, double f,
                   std::vector<double>& delta) {
  const double h = 0.5 * dt_;
  ops_.D.multiply(u, rhs_);
  if (ops_.absorbing) {
    ops_.C.multiply(v, tmp_);
    for (std::size_t i = 0; i < rhs_.size(); ++i) rhs_[i] += tmp_[i];
  }
  for (std::size_t i = 0; i < rhs_.size(); ++i) rhs_[i] = h * (f * ops_.b[i] - rhs_[i]);
  // The previous step's increment is the starting guess.
  const auto res = cg_solve(ops_.R, rhs_, delta, tol_, max_iter_, inv_diag_);
  cg_iterations_ += res.iterations;
}

void Stepper::step(WaveState& s, double f0) {
  const auto n = static_cast<std::size_t>(ops_.size());
  require(s.u.size() == n && s.v.size() == n, ErrorKind::shape,
          "state does not match the operators");
  const double t0 = s.n * dt_;
  const double f_now = amplitude_ * source_time(f0, t0);
  const double f_next = amplitude_ * source_time(f0, t0 + dt_);

  kick(s.u, s.v, f_now, kick1_);
  for (std::size_t i = 0; i < n; ++i) vhalf_[i] = s.v[i] + kick1_[i];
  double umax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s.u[i] += dt_ * vhalf_[i];
    umax = std::max(umax, std::abs(s.u[i]));
  }
  if (!(umax <= 1e6)) {
    fail(ErrorKind::instability,
         "displacement left the stable range at step " + std::to_string(s.n + 1));
  }
  kick(s.u, vhalf_, f_next, kick2_);
  for (std::size_t i = 0; i < n; ++i) s.v[i] = vhalf_[i] + kick2_[i];
  ++s.n;
}

WaveState step(const WaveState& state, const OperatorSet& ops, double f0, double dt,
               double cg_tol, int cg_max_iter) {
  Stepper stepper(ops, dt, cg_tol, cg_max_iter);
  WaveState next = state;
  stepper.step(next, f0);
  return next;
}

double energy(const WaveState& s, const OperatorSet& ops) {
  const auto rv = ops.R * s.v;
  const auto du = ops.D * s.u;
  double e = 0.0;
  for (std::size_t i = 0; i < rv.size(); ++i) e += s.v[i] * rv[i] + s.u[i] * du[i];
  return 0.5 * e;
}

double modified_energy(const WaveState& s, const OperatorSet& ops, double dt, double cg_tol) {
  const auto du = ops.D * s.u;
  const auto w = cg_solve(ops.R, du, cg_tol, 10 * ops.size() + 100);
  double corr = 0.0;
  for (std::size_t i = 0; i < du.size(); ++i) corr += du[i] * w[i];
  return energy(s, ops) - dt * dt / 8.0 * corr;
}

std::vector<double> run_channel(const OperatorSet& ops, const Mesh& mesh,
                                const SolverConfig& cfg, double f0,
                                const StepObserver& observer, long* cg_iterations) {
  cfg.validate();
  require(ops.size() == mesh.num_nodes(), ErrorKind::shape, "operators do not match the mesh");
  const auto top = mesh.top_nodes();
  const int steps = cfg.num_steps();
  const int records = cfg.num_records();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(records) * top.size());

  Stepper stepper(ops, cfg.dt, cfg.cg_tol, cfg.cg_max_iter, cfg.source_amplitude);
  WaveState state = zero_state(ops.size());
  for (int n = 0; n < steps; ++n) {
    stepper.step(state, f0);
    if (observer) observer(state);
    if (state.n % cfg.record_stride == 0 && state.n / cfg.record_stride <= records) {
      for (int node : top) out.push_back(state.u[node]);
    }
  }
  if (cg_iterations) *cg_iterations = stepper.cg_iterations();
  return out;
}

int default_thread_count() {
  if (const char* env = std::getenv("SEABED_NUM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    warn("ignoring invalid SEABED_NUM_THREADS='" + std::string(env) + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Traces simulate(const OperatorSet& ops, const Mesh& mesh, const SolverConfig& cfg) {
  cfg.validate();
  Traces tr;
  tr.top_nodes = mesh.top_nodes();
  for (int node : tr.top_nodes) tr.top_xs.push_back(mesh.x[node]);
  tr.frequencies = cfg.frequencies;
  tr.dt_record = cfg.record_interval();
  tr.t_max = cfg.t_max;
  tr.n_time = cfg.num_records();
  tr.mesh_nx = mesh.nx;
  tr.mesh_ny = mesh.ny;
  tr.record_stride = cfg.record_stride;
  tr.sources = cfg.sources;
  const auto nf = cfg.frequencies.size();
  tr.data.resize(nf);

  std::vector<long> iters(nf, 0);
  std::vector<std::exception_ptr> errors(nf);
  auto work = [&](std::size_t i) {
    try {
      tr.data[i] = run_channel(ops, mesh, cfg, cfg.frequencies[i], {}, &iters[i]);
    } catch (const Error& e) {
      errors[i] = std::make_exception_ptr(
          Error(e.kind(), "frequency " + std::to_string(i) + ": " + e.what()));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const int requested = cfg.threads > 0 ? cfg.threads : default_thread_count();
  const auto workers = std::min<std::size_t>(nf, static_cast<std::size_t>(requested));
  if (workers <= 1) {
    for (std::size_t i = 0; i < nf; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < nf; i = next++) work(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (long it : iters) tr.cg_iterations += it;
  return tr;
}

double check_cfl(const Mesh& mesh, const MaterialField& material, double dt) {
  double cmax = 0.0;
  for (double c : material.c) cmax = std::max(cmax, c);
  const double courant = cmax * dt / mesh.min_spacing();
  if (courant > 0.5) {
    warn("Courant number " + std::to_string(courant) +
         " exceeds 0.5; time stepping may be unstable");
  }
  return courant;
}

Traces simulate(const SeabedCurve& h, const SolverConfig& cfg, const Mesh& mesh,
                const MaterialConstants& constants, MaterialSampling sampling) {
  cfg.validate();
  const auto material = coeff_fields(h, mesh, constants, sampling);
  check_cfl(mesh, material, cfg.dt);
  const auto ops = assemble(mesh, material, cfg.sources, cfg.absorbing);
  return simulate(ops, mesh, cfg);
}

Measurement observe(const Traces& tr, std::span<const double> sensor_xs) {
  require(!sensor_xs.empty(), ErrorKind::config, "no sensors given");
  const auto ntop = tr.top_xs.size();
  require(ntop >= 2, ErrorKind::shape, "traces carry no surface nodes");
  const double spacing = (tr.top_xs.back() - tr.top_xs.front()) / static_cast<double>(ntop - 1);
  std::vector<std::size_t> cols;
  cols.reserve(sensor_xs.size());
  for (double x : sensor_xs) {
    const auto it = std::lower_bound(tr.top_xs.begin(), tr.top_xs.end(), x - 1e-9 * spacing);
    if (it == tr.top_xs.end() || std::abs(*it - x) > 1e-9 * spacing) {
      fail(ErrorKind::alignment, "sensor at x=" + std::to_string(x) + " is not a mesh node");
    }
    cols.push_back(static_cast<std::size_t>(it - tr.top_xs.begin()));
  }
  Measurement m(static_cast<int>(tr.data.size()), static_cast<int>(cols.size()), tr.n_time);
  for (int i = 0; i < m.n_freq; ++i) {
    require(tr.data[i].size() == static_cast<std::size_t>(tr.n_time) * ntop, ErrorKind::shape,
            "trace history has the wrong length");
    for (int l = 0; l < m.n_time; ++l) {
      auto snap = m.snapshot(i, l);
      const double* row = tr.data[i].data() + static_cast<std::size_t>(l) * ntop;
      for (std::size_t k = 0; k < cols.size(); ++k) snap[k] = row[cols[k]];
    }
  }
  m.meta.dt = tr.dt_record;
  m.meta.t_max = tr.t_max;
  m.meta.sensor_xs.assign(sensor_xs.begin(), sensor_xs.end());
  m.meta.frequencies = tr.frequencies;
  m.meta.mesh_nx = tr.mesh_nx;
  m.meta.mesh_ny = tr.mesh_ny;
  m.meta.record_stride = tr.record_stride;
  m.meta.source_xs = tr.sources.xs;
  m.meta.source_depth = tr.sources.depth;
  m.meta.source_width = tr.sources.width;
  return m;
}

}  // namespace seabed
