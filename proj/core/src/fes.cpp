#include "seabed/fes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seabed/error.hpp"

namespace seabed {

void FesConfig::validate(int n_kl) const {
  require(n_low_modes >= 1 && n_low_modes <= n_kl, ErrorKind::config,
          "n_low_modes must lie in [1, n_kl]");
  require(n_walkers >= 2 * n_low_modes, ErrorKind::config,
          "n_walkers must be at least 2 * n_low_modes");
  require(stretch_floor > 1.0, ErrorKind::config, "stretch floor must be > 1");
  require(stretch >= stretch_floor, ErrorKind::config, "stretch below its floor");
}

double sample_stretch(double a, Rng& rng) {
  require(a > 1.0, ErrorKind::domain, "stretch scale must be > 1");
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  const double r = (a - 1.0) * u + 1.0;
  return r * r / a;
}

namespace {

bool ensemble_collapsed(const std::vector<ChainState>& walkers, int d) {
  for (std::size_t k = 1; k < walkers.size(); ++k) {
    for (int j = 0; j < d; ++j) {
      if (walkers[k].coeffs[j] != walkers[0].coeffs[j]) return false;
    }
  }
  return true;
}

double half_norm2(const std::vector<double>& v, int d) {
  double s = 0.0;
  for (int j = 0; j < d; ++j) s += v[j] * v[j];
  return 0.5 * s;
}

}  // namespace

SampleSet fes_run(const FesConfig& fes, const SamplerConfig& cfg, const Potential& phi,
                  std::vector<ChainState> walkers) {
  cfg.validate();
  require(!walkers.empty(), ErrorKind::config, "no walkers given");
  const int n_kl = static_cast<int>(walkers.front().coeffs.size());
  fes.validate(n_kl);
  require(static_cast<int>(walkers.size()) == fes.n_walkers, ErrorKind::config,
          "walker count differs from n_walkers");
  const int d = fes.n_low_modes;
  const int nw = fes.n_walkers;

  auto evaluate = [&](std::span<const double> beta, double s, int sweep, int walker) {
    try {
      return phi(beta, s);
    } catch (const Error& e) {
      fail(e.kind(), "walker " + std::to_string(walker) + " at sweep " +
                         std::to_string(sweep) + ": " + e.what());
    }
  };
  for (int k = 0; k < nw; ++k) {
    auto& w = walkers[k];
    require(static_cast<int>(w.coeffs.size()) == n_kl, ErrorKind::shape,
            "walkers differ in dimension");
    require(w.s == walkers.front().s, ErrorKind::config, "walkers must share s");
    if (std::isnan(w.phi)) w.phi = evaluate(w.coeffs, w.s, 0, k);
    require(std::isfinite(w.phi), ErrorKind::config,
            "walker " + std::to_string(k) + " starts with a non-finite potential");
  }

  Rng rng(cfg.seed);
  std::uniform_int_distribution<int> partner(0, nw - 2);
  SampleSet out;
  out.sampler = "fes";
  out.n_kl = n_kl;
  out.beta_h = cfg.beta_h;
  out.beta_s = cfg.beta_s;
  out.stretch = fes.stretch;
  out.samples.reserve(static_cast<std::size_t>(cfg.n_sample) * nw);
  const bool adapt = cfg.phase == Phase::warmup;
  const int n_high = n_kl - d;

  for (int t = 1; t <= cfg.n_sample; ++t) {
    if (ensemble_collapsed(walkers, d)) {
      fail(ErrorKind::degenerate, "all walkers coincide in the ensemble modes at sweep " +
                                      std::to_string(t));
    }
    const double kappa = cfg.kappa0 / std::sqrt(static_cast<double>(t));
    int sweep_stretch_acc = 0;
    int sweep_pcn_acc = 0;

    for (int k = 0; k < nw; ++k) {
      auto& w = walkers[k];
      int j = partner(rng);
      if (j >= k) ++j;
      const auto& other = walkers[j];

      const double z = sample_stretch(out.stretch, rng);
      std::vector<double> proposal = w.coeffs;
      for (int m = 0; m < d; ++m) proposal[m] = other.coeffs[m] + z * (w.coeffs[m] - other.coeffs[m]);
      const double phi_new = evaluate(proposal, w.s, t, k);
      const double log_ratio = (d - 1) * std::log(z) + (w.phi + half_norm2(w.coeffs, d)) -
                               (phi_new + half_norm2(proposal, d));
      int accepted = 0;
      if (metropolis_accept(log_ratio, rng)) {
        w.coeffs = std::move(proposal);
        w.phi = phi_new;
        ++accepted;
        ++sweep_stretch_acc;
      }

      int pcn_acc = 0;
      if (n_high > 0) {
        for (int it = 0; it < cfg.n_inner_h; ++it) {
          const auto high = pcn_propose(std::span<const double>(w.coeffs).subspan(d),
                                        out.beta_h, rng);
          std::vector<double> prop = w.coeffs;
          std::copy(high.begin(), high.end(), prop.begin() + d);
          const double phi_p = evaluate(prop, w.s, t, k);
          if (accept_h(w.phi, phi_p, rng)) {
            w.coeffs = std::move(prop);
            w.phi = phi_p;
            ++pcn_acc;
          }
        }
        out.proposed_h += cfg.n_inner_h;
        out.accepted_h += pcn_acc;
      }
      sweep_pcn_acc += pcn_acc;

      ChainSample cs;
      cs.iteration = (t - 1) * nw + k;
      cs.walker = k;
      cs.coeffs = w.coeffs;
      cs.s = w.s;
      cs.phi = w.phi;
      cs.accepted_h = accepted + pcn_acc > 0;
      const int tried = 1 + (n_high > 0 ? cfg.n_inner_h : 0);
      cs.rate_h = static_cast<double>(accepted + pcn_acc) / tried;
      out.samples.push_back(std::move(cs));
    }
    out.proposed_stretch += nw;
    out.accepted_stretch += sweep_stretch_acc;

    if (adapt) {
      const double rate = static_cast<double>(sweep_stretch_acc) / nw;
      out.stretch = std::max(fes.stretch_floor,
                             adapt_step(out.stretch, rate, cfg.target_accept, kappa));
      if (n_high > 0 && cfg.n_inner_h > 0) {
        const double rate_h = static_cast<double>(sweep_pcn_acc) / (nw * cfg.n_inner_h);
        out.beta_h = adapt_step(out.beta_h, rate_h, cfg.target_accept, kappa, 1.0);
      }
    }
  }
  out.final_states = std::move(walkers);
  return out;
}

}  // namespace seabed
