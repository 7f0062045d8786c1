#pragma once

// Ensemble baseline: affine-invariant stretch moves on the leading KL modes
// combined with pCN updates of the remaining modes, at fixed s.

#include <vector>

#include "seabed/samplers.hpp"

namespace seabed {

struct FesConfig {
  int n_low_modes = 10;
  int n_walkers = 40;
  /// Stretch scale a; z is drawn on [1/a, a] with density proportional to 1/sqrt(z).
  double stretch = 2.0;
  double stretch_floor = 1.2;

  void validate(int n_kl) const;
};

/// Draws z with density proportional to 1/sqrt(z) on [1/a, a].
double sample_stretch(double a, Rng& rng);

/// One sweep visits walkers in order; for each: one stretch move on the low
/// modes against a uniformly chosen partner, then sampler.n_inner_h pCN
/// updates of the complementary modes. sampler.n_sample counts sweeps. In the
/// warm-up phase beta_h and the stretch scale adapt once per sweep; the
/// stretch never drops below its floor. Samples pool all walkers.
SampleSet fes_run(const FesConfig& fes, const SamplerConfig& sampler, const Potential& phi,
                  std::vector<ChainState> walkers);

}  // namespace seabed
