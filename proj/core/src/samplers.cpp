#include "seabed/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seabed/error.hpp"

namespace seabed {

void SamplerConfig::validate() const {
  require(beta_h > 0.0 && beta_h <= 1.0, ErrorKind::config, "beta_h must lie in (0, 1]");
  require(beta_s >= 0.0, ErrorKind::config, "beta_s must be >= 0");
  require(n_sample >= 0 && n_inner_h >= 0 && n_inner_s >= 0, ErrorKind::config,
          "loop sizes must be >= 0");
  require(target_accept > 0.0 && target_accept < 1.0, ErrorKind::config,
          "target acceptance must lie in (0, 1)");
  require(kappa0 > 0.0, ErrorKind::config, "kappa0 must be > 0");
  bounds.validate();
}

std::vector<double> SampleSet::coefficient(int j) const {
  require(j >= 0 && j < n_kl, ErrorKind::index, "coefficient index out of range");
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& c : samples) out.push_back(c.coeffs[j]);
  return out;
}

std::vector<double> SampleSet::s_chain() const {
  std::vector<double> out;
  for (const auto& c : samples) out.push_back(c.s);
  return out;
}

std::vector<double> SampleSet::phi_chain() const {
  std::vector<double> out;
  for (const auto& c : samples) out.push_back(c.phi);
  return out;
}

std::vector<double> pcn_propose(std::span<const double> coeffs, double beta_h, Rng& rng) {
  require(beta_h >= 0.0 && beta_h <= 1.0, ErrorKind::domain, "beta_h must lie in [0, 1]");
  const double keep = std::sqrt(1.0 - beta_h * beta_h);
  const auto xi = standard_normal(rng, static_cast<int>(coeffs.size()));
  std::vector<double> out(coeffs.size());
  for (std::size_t j = 0; j < coeffs.size(); ++j) out[j] = keep * coeffs[j] + beta_h * xi[j];
  return out;
}

bool metropolis_accept(double log_ratio, Rng& rng) {
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  if (std::isnan(log_ratio)) return false;
  return log_ratio >= 0.0 || u < std::exp(log_ratio);
}

bool accept_h(double phi_current, double phi_proposed, Rng& rng) {
  return metropolis_accept(phi_current - phi_proposed, rng);
}

double mh_propose_s(double s, double beta_s, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  return s + beta_s * normal(rng);
}

double adapt_step(double beta, double rate, double target, double kappa_t, double cap) {
  require(beta > 0.0, ErrorKind::domain, "step size must be > 0");
  require(rate >= 0.0 && rate <= 1.0, ErrorKind::domain, "acceptance rate must lie in [0, 1]");
  return std::min(cap, beta * std::exp(kappa_t * (rate - target)));
}

namespace {

double evaluate(const Potential& phi, std::span<const double> beta, double s, int iteration,
                const char* block) {
  try {
    return phi(beta, s);
  } catch (const Error& e) {
    fail(e.kind(), std::string(block) + " update at outer iteration " +
                       std::to_string(iteration) + ": " + e.what());
  }
}

}  // namespace

SampleSet gibbs_run(const SamplerConfig& cfg, const Potential& phi, ChainState state) {
  cfg.validate();
  require(!state.coeffs.empty(), ErrorKind::config, "initial coefficients are empty");
  require(cfg.n_inner_s == 0 || cfg.bounds.contains(state.s), ErrorKind::config,
          "initial s outside its bounds");
  if (std::isnan(state.phi)) state.phi = evaluate(phi, state.coeffs, state.s, 0, "initial");
  require(std::isfinite(state.phi), ErrorKind::config,
          "initial state has a non-finite potential");

  Rng rng(cfg.seed);
  SampleSet out;
  out.n_kl = static_cast<int>(state.coeffs.size());
  out.beta_h = cfg.beta_h;
  out.beta_s = cfg.beta_s;
  out.samples.reserve(cfg.n_sample);
  const bool adapt = cfg.phase == Phase::warmup;

  for (int t = 1; t <= cfg.n_sample; ++t) {
    const double kappa = cfg.kappa0 / std::sqrt(static_cast<double>(t));

    int acc_h = 0;
    for (int j = 0; j < cfg.n_inner_h; ++j) {
      auto proposal = pcn_propose(state.coeffs, out.beta_h, rng);
      const double phi_new = evaluate(phi, proposal, state.s, t, "h");
      if (accept_h(state.phi, phi_new, rng)) {
        state.coeffs = std::move(proposal);
        state.phi = phi_new;
        ++acc_h;
      }
    }
    out.proposed_h += cfg.n_inner_h;
    out.accepted_h += acc_h;
    const double rate_h = cfg.n_inner_h > 0 ? static_cast<double>(acc_h) / cfg.n_inner_h : 0.0;
    if (adapt && cfg.n_inner_h > 0) {
      out.beta_h = adapt_step(out.beta_h, rate_h, cfg.target_accept, kappa, 1.0);
    }

    int acc_s = 0;
    for (int j = 0; j < cfg.n_inner_s; ++j) {
      const double s_new = mh_propose_s(state.s, out.beta_s, rng);
      if (!cfg.bounds.contains(s_new)) continue;
      const double phi_new = evaluate(phi, state.coeffs, s_new, t, "s");
      if (metropolis_accept(state.phi - phi_new, rng)) {
        state.s = s_new;
        state.phi = phi_new;
        ++acc_s;
      }
    }
    out.proposed_s += cfg.n_inner_s;
    out.accepted_s += acc_s;
    const double rate_s = cfg.n_inner_s > 0 ? static_cast<double>(acc_s) / cfg.n_inner_s : 0.0;
    if (adapt && cfg.n_inner_s > 0 && out.beta_s > 0.0) {
      out.beta_s = adapt_step(out.beta_s, rate_s, cfg.target_accept, kappa,
                              cfg.bounds.hi - cfg.bounds.lo);
    }

    ChainSample cs;
    cs.iteration = t - 1;
    cs.coeffs = state.coeffs;
    cs.s = state.s;
    cs.phi = state.phi;
    cs.accepted_h = acc_h > 0;
    cs.accepted_s = acc_s > 0;
    cs.rate_h = rate_h;
    cs.rate_s = rate_s;
    out.samples.push_back(std::move(cs));
  }
  out.final_states.push_back(std::move(state));
  return out;
}

}  // namespace seabed
