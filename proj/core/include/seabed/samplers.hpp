#pragma once

// MCMC on whitened KL coefficients beta ~ N(0, I) and the regularity s.
// The potential Phi(beta, s) is the negative log-likelihood; the prior on
// beta is handled by the pCN kernel, the prior on s is uniform on its bounds.

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "seabed/kl_prior.hpp"

namespace seabed {

using Potential = std::function<double(std::span<const double> beta, double s)>;

enum class Phase { warmup, online };

struct SamplerConfig {
  double beta_h = 0.1;
  double beta_s = 0.1;
  int n_sample = 0;
  int n_inner_h = 1;
  int n_inner_s = 1;
  Phase phase = Phase::online;
  double target_accept = 0.234;
  /// Adaptation gain kappa_t = kappa0 / sqrt(t).
  double kappa0 = 1.0;
  std::uint64_t seed = 0;
  RegularityBounds bounds;

  void validate() const;
};

struct ChainSample {
  int iteration = 0;
  /// Walker index for ensemble runs, -1 otherwise.
  int walker = -1;
  std::vector<double> coeffs;
  double s = 0.0;
  double phi = 0.0;
  bool accepted_h = false;
  bool accepted_s = false;
  double rate_h = 0.0;
  double rate_s = 0.0;
};

struct ChainState {
  std::vector<double> coeffs;
  double s = 0.0;
  /// NaN means "evaluate before the first step".
  double phi = std::numeric_limits<double>::quiet_NaN();
};

struct SampleSet {
  std::string sampler = "gibbs";
  int n_kl = 0;
  std::vector<ChainSample> samples;
  long proposed_h = 0;
  long accepted_h = 0;
  long proposed_s = 0;
  long accepted_s = 0;
  /// Step sizes at the end of the run (equal to the inputs when online).
  double beta_h = 0.0;
  double beta_s = 0.0;
  /// Ensemble stretch scale at the end of the run (ensemble runs only).
  double stretch = 0.0;
  long proposed_stretch = 0;
  long accepted_stretch = 0;
  /// State after the last update, one per walker for ensemble runs.
  std::vector<ChainState> final_states;

  std::vector<double> coefficient(int j) const;
  std::vector<double> s_chain() const;
  std::vector<double> phi_chain() const;
};

/// sqrt(1 - beta_h^2) coeffs + beta_h xi, xi ~ N(0, I).
std::vector<double> pcn_propose(std::span<const double> coeffs, double beta_h, Rng& rng);

/// Metropolis test with probability min(1, exp(log_ratio)) from one uniform draw.
bool metropolis_accept(double log_ratio, Rng& rng);

/// Accepts with probability min(1, exp(phi_current - phi_proposed)).
bool accept_h(double phi_current, double phi_proposed, Rng& rng);

/// s + beta_s z, z ~ N(0, 1). Callers reject proposals outside the bounds.
double mh_propose_s(double s, double beta_s, Rng& rng);

/// beta exp(kappa_t (rate - target)), capped at `cap`.
double adapt_step(double beta, double rate, double target, double kappa_t,
                  double cap = std::numeric_limits<double>::infinity());

/// Metropolis-within-Gibbs: per outer iteration, n_inner_h pCN updates of
/// beta at fixed s, then n_inner_s random-walk updates of s at fixed beta.
/// In the warm-up phase both step sizes adapt after their inner loop.
SampleSet gibbs_run(const SamplerConfig& cfg, const Potential& phi, ChainState init);

}  // namespace seabed
