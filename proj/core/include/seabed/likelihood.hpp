#pragma once

#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "seabed/assembly.hpp"
#include "seabed/kl_prior.hpp"
#include "seabed/material.hpp"
#include "seabed/measurement.hpp"
#include "seabed/mesh.hpp"
#include "seabed/wave_solver.hpp"

namespace seabed {

enum class SigmaConvention {
  /// sigma is a standard deviation; prefactor 1 / (2 sigma^2).
  variance,
  /// prefactor 1 / (2 sigma) with sigma used as written.
  literal,
};

struct NoiseModel {
  double rel_level = 0.01;
  SigmaConvention convention = SigmaConvention::variance;

  void validate() const;
  double prefactor(double sigma) const;
};

/// sigma_i = rel_level * max_l ||snapshot_{i,l}||_2; degenerate error when a
/// channel is identically zero.
std::vector<double> noise_sigma(const Measurement& clean, double rel_level);

/// Adds i.i.d. N(0, sigma_i^2) to channel i; records sigma in the result.
Measurement add_noise(const Measurement& clean, std::span<const double> sigma, Rng& rng);

/// Trapezoidal weights of the surface measure at the sensors (half spacing at
/// the two outermost sensors). Works for any sensor order.
std::vector<double> boundary_weights(std::span<const double> sensor_xs);

/// sum_k w_k (y_obs - y_pred)_k^2
double nll_snapshot(std::span<const double> y_obs, std::span<const double> y_pred,
                    std::span<const double> weights);

struct LogLikelihoodValue {
  double total = 0.0;
  std::vector<double> per_frequency;
};

/// Phi = sum_i prefactor(sigma_i) sum_l nll_snapshot(obs_il, pred_il).
LogLikelihoodValue misfit(const Measurement& obs, const Measurement& pred,
                          std::span<const double> sigma, std::span<const double> weights,
                          const NoiseModel& noise);

/// Unweighted-by-sigma snapshot terms of channel i.
std::vector<double> misfit_per_snapshot(const Measurement& obs, const Measurement& pred, int i,
                                        std::span<const double> weights);

/// Everything needed to map a seabed curve to predicted sensor data.
struct ForwardContext {
  Mesh mesh;
  SolverConfig solver;
  MaterialConstants constants;
  MaterialSampling sampling = MaterialSampling::cell_average;
  KlConfig kl;
  double mean_offset = 0.0;
  StaticOperators fixed;
  std::vector<double> sensor_xs;

  static std::shared_ptr<const ForwardContext> create(
      const Mesh& mesh, const SolverConfig& solver, const MaterialConstants& constants,
      const KlConfig& kl, double mean_offset = 0.0,
      MaterialSampling sampling = MaterialSampling::cell_average);

  Measurement predict(const SeabedCurve& h) const;
  /// Config error unless dt, snapshot count, sensors and frequencies agree.
  void check_compatible(const Measurement& obs) const;
};

class Likelihood {
 public:
  /// `observed.sigma` must be populated (it is written by the data generator).
  Likelihood(std::shared_ptr<const ForwardContext> ctx, Measurement observed,
             NoiseModel noise = {});

  LogLikelihoodValue evaluate(const SeabedCurve& h, Measurement* prediction = nullptr) const;

  /// Phi(beta, s) on whitened KL coefficients; +inf for curves leaving the
  /// vertical extent of the domain.
  double potential(std::span<const double> beta, double s) const;

  const ForwardContext& context() const { return *ctx_; }
  const Measurement& observed() const { return observed_; }
  const std::vector<double>& weights() const { return weights_; }
  const NoiseModel& noise() const { return noise_; }

 private:
  std::shared_ptr<const ForwardContext> ctx_;
  Measurement observed_;
  NoiseModel noise_;
  std::vector<double> weights_;
};

LogLikelihoodValue nll_total(const Measurement& y_obs, const SeabedCurve& h,
                             const ForwardContext& ctx, const NoiseModel& noise = {});

/// log acceptance ratio Phi_current - Phi_proposed.
inline double log_posterior_ratio(double phi_current, double phi_proposed) {
  return phi_current - phi_proposed;
}

inline constexpr double kInfinitePotential = std::numeric_limits<double>::infinity();

}  // namespace seabed
