#pragma once

// Fully discrete Stormer-Verlet stepping of
//   R dv/dt + D u + C v = f(t) b,   du/dt = v
// in kick-drift-kick form with half kicks of dt / 2. Only R is inverted; the
// damping term is evaluated at the latest available velocity.

#include <functional>
#include <span>
#include <vector>

#include "seabed/assembly.hpp"
#include "seabed/kl_prior.hpp"
#include "seabed/material.hpp"
#include "seabed/measurement.hpp"
#include "seabed/mesh.hpp"

namespace seabed {

struct SolverConfig {
  double dt = 0.0019;
  double t_max = 3.95;
  double cg_tol = 1e-10;
  int cg_max_iter = 500;
  std::vector<double> frequencies{4.0};
  SourceLayout sources;
  /// Empty means default_sensor_xs for the mesh.
  std::vector<double> sensor_xs;
  /// Record every `record_stride` steps.
  int record_stride = 1;
  bool absorbing = true;
  /// Scales f(t) b; zero gives a source-free run.
  double source_amplitude = 1.0;
  /// Worker threads across frequencies; 0 reads SEABED_NUM_THREADS, then
  /// falls back to the hardware concurrency.
  int threads = 0;

  void validate() const;
  /// N_t = round(t_max / dt).
  int num_steps() const;
  int num_records() const { return num_steps() / record_stride; }
  double record_interval() const { return dt * record_stride; }
};

struct WaveState {
  std::vector<double> u;
  std::vector<double> v;
  int n = 0;
};

WaveState zero_state(int size);

/// Reusable stepper holding the Jacobi preconditioner and CG warm starts.
class Stepper {
 public:
  Stepper(const OperatorSet& ops, double dt, double cg_tol, int cg_max_iter,
          double amplitude = 1.0);

  /// Advances `state` from t_n = n dt to t_{n+1}.
  void step(WaveState& state, double f0);

  /// Total CG iterations so far.
  long cg_iterations() const { return cg_iterations_; }

 private:
  void kick(const std::vector<double>& u, std::span<const double> v, double f,
            std::vector<double>& delta);

  const OperatorSet& ops_;
  double dt_;
  double tol_;
  int max_iter_;
  double amplitude_;
  std::vector<double> inv_diag_;
  std::vector<double> rhs_, tmp_, kick1_, kick2_, vhalf_;
  long cg_iterations_ = 0;
};

/// One step of the scheme without persistent workspace.
WaveState step(const WaveState& state, const OperatorSet& ops, double f0, double dt,
               double cg_tol = 1e-10, int cg_max_iter = 500);

/// E = v'Rv / 2 + u'Du / 2.
double energy(const WaveState& state, const OperatorSet& ops);

/// Energy exactly conserved by the scheme when C = 0 and f = 0:
/// E - dt^2 / 8 (Du)' R^{-1} (Du).
double modified_energy(const WaveState& state, const OperatorSet& ops, double dt,
                       double cg_tol = 1e-12);

/// Surface displacement histories, one row per recorded step.
struct Traces {
  std::vector<double> top_xs;
  std::vector<int> top_nodes;
  std::vector<double> frequencies;
  double dt_record = 0.0;
  double t_max = 0.0;
  int n_time = 0;
  int mesh_nx = 0;
  int mesh_ny = 0;
  int record_stride = 1;
  SourceLayout sources;
  /// data[i][l * top_xs.size() + k]
  std::vector<std::vector<double>> data;
  long cg_iterations = 0;
};

/// Called after every step with the step index n (state time n dt).
using StepObserver = std::function<void(const WaveState&)>;

/// Runs one frequency channel on pre-assembled operators.
std::vector<double> run_channel(const OperatorSet& ops, const Mesh& mesh,
                                const SolverConfig& cfg, double f0,
                                const StepObserver& observer = {},
                                long* cg_iterations = nullptr);

Traces simulate(const OperatorSet& ops, const Mesh& mesh, const SolverConfig& cfg);

Traces simulate(const SeabedCurve& h, const SolverConfig& cfg, const Mesh& mesh,
                const MaterialConstants& constants,
                MaterialSampling sampling = MaterialSampling::cell_average);

/// Extracts sensor readings from the surface traces; alignment error when a
/// sensor is not on a surface node.
Measurement observe(const Traces& traces, std::span<const double> sensor_xs);

/// Warns through the library sink when c_max dt / h_min exceeds 0.5.
/// Returns the Courant number.
double check_cfl(const Mesh& mesh, const MaterialField& material, double dt);

/// SEABED_NUM_THREADS if set, else the hardware concurrency (at least 1).
int default_thread_count();

}  // namespace seabed
