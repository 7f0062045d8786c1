#include "seabed/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "seabed/error.hpp"

namespace seabed {

void NoiseModel::validate() const {
  require(rel_level > 0.0, ErrorKind::config, "relative noise level must be > 0");
}

double NoiseModel::prefactor(double sigma) const {
  require(sigma > 0.0, ErrorKind::domain, "noise sigma must be > 0");
  return convention == SigmaConvention::variance ? 0.5 / (sigma * sigma) : 0.5 / sigma;
}

std::vector<double> noise_sigma(const Measurement& clean, double rel_level) {
  require(rel_level >= 0.0, ErrorKind::config, "relative noise level must be >= 0");
  require(clean.n_time > 0 && clean.n_sensor > 0, ErrorKind::shape, "measurement is empty");
  std::vector<double> sigma(clean.n_freq);
  for (int i = 0; i < clean.n_freq; ++i) {
    double best = 0.0;
    for (int l = 0; l < clean.n_time; ++l) {
      double sq = 0.0;
      for (double y : clean.snapshot(i, l)) sq += y * y;
      best = std::max(best, std::sqrt(sq));
    }
    require(best > 0.0, ErrorKind::degenerate,
            "channel " + std::to_string(i) + " of the clean data is identically zero");
    sigma[i] = rel_level * best;
  }
  return sigma;
}

Measurement add_noise(const Measurement& clean, std::span<const double> sigma, Rng& rng) {
  require(sigma.size() == static_cast<std::size_t>(clean.n_freq), ErrorKind::shape,
          "one sigma per frequency is required");
  Measurement noisy = clean;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < clean.n_freq; ++i) {
    require(sigma[i] >= 0.0, ErrorKind::domain, "noise sigma must be >= 0");
    for (double& y : noisy.channel(i)) y += sigma[i] * normal(rng);
  }
  noisy.sigma.assign(sigma.begin(), sigma.end());
  return noisy;
}

std::vector<double> boundary_weights(std::span<const double> xs) {
  const std::size_t n = xs.size();
  require(n > 0, ErrorKind::shape, "no sensors");
  std::vector<double> w(n, 1.0);
  if (n == 1) return w;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
  for (std::size_t r = 0; r < n; ++r) {
    const double left = r > 0 ? xs[order[r]] - xs[order[r - 1]] : 0.0;
    const double right = r + 1 < n ? xs[order[r + 1]] - xs[order[r]] : 0.0;
    w[order[r]] = 0.5 * (left + right);
  }
  return w;
}

double nll_snapshot(std::span<const double> y_obs, std::span<const double> y_pred,
                    std::span<const double> weights) {
  require(y_obs.size() == y_pred.size() && y_obs.size() == weights.size(), ErrorKind::shape,
          "snapshot lengths differ");
  double s = 0.0;
  for (std::size_t k = 0; k < y_obs.size(); ++k) {
    const double d = y_obs[k] - y_pred[k];
    s += weights[k] * d * d;
  }
  return s;
}

std::vector<double> misfit_per_snapshot(const Measurement& obs, const Measurement& pred, int i,
                                        std::span<const double> weights) {
  require(obs.same_shape(pred), ErrorKind::shape, "observed and predicted shapes differ");
  require(i >= 0 && i < obs.n_freq, ErrorKind::index, "frequency index out of range");
  std::vector<double> out(obs.n_time);
  for (int l = 0; l < obs.n_time; ++l) {
    out[l] = nll_snapshot(obs.snapshot(i, l), pred.snapshot(i, l), weights);
  }
  return out;
}

LogLikelihoodValue misfit(const Measurement& obs, const Measurement& pred,
                          std::span<const double> sigma, std::span<const double> weights,
                          const NoiseModel& noise) {
  require(obs.same_shape(pred), ErrorKind::shape, "observed and predicted shapes differ");
  require(sigma.size() == static_cast<std::size_t>(obs.n_freq), ErrorKind::shape,
          "one sigma per frequency is required");
  LogLikelihoodValue v;
  v.per_frequency.resize(obs.n_freq);
  for (int i = 0; i < obs.n_freq; ++i) {
    double s = 0.0;
    for (int l = 0; l < obs.n_time; ++l) {
      s += nll_snapshot(obs.snapshot(i, l), pred.snapshot(i, l), weights);
    }
    v.per_frequency[i] = noise.prefactor(sigma[i]) * s;
    v.total += v.per_frequency[i];
  }
  return v;
}

std::shared_ptr<const ForwardContext> ForwardContext::create(
    const Mesh& mesh, const SolverConfig& solver, const MaterialConstants& constants,
    const KlConfig& kl, double mean_offset, MaterialSampling sampling) {
  solver.validate();
  constants.validate();
  kl.validate();
  require(kl.a <= mesh.rect.x0 + 1e-12 && kl.b >= mesh.rect.x1 - 1e-12, ErrorKind::config,
          "KL interval does not cover the mesh");
  auto ctx = std::make_shared<ForwardContext>();
  ctx->mesh = mesh;
  ctx->solver = solver;
  ctx->constants = constants;
  ctx->sampling = sampling;
  ctx->kl = kl;
  ctx->mean_offset = mean_offset;
  ctx->fixed = assemble_static(mesh, solver.sources);
  ctx->sensor_xs = solver.sensor_xs.empty() ? default_sensor_xs(mesh.nx, mesh.rect)
                                            : solver.sensor_xs;
  // Fails early on misaligned sensors.
  sensor_node_indices(mesh, ctx->sensor_xs);
  const auto bounds = material_bounds(constants, mesh.rect);
  const double courant = bounds.c_max * solver.dt / mesh.min_spacing();
  if (courant > 0.5) {
    warn("Courant number " + std::to_string(courant) +
         " exceeds 0.5; time stepping may be unstable");
  }
  return ctx;
}

Measurement ForwardContext::predict(const SeabedCurve& h) const {
  const auto material = coeff_fields(h, mesh, constants, sampling);
  const auto ops = assemble(mesh, material, fixed, solver.absorbing);
  auto m = observe(simulate(ops, mesh, solver), sensor_xs);
  return m;
}

void ForwardContext::check_compatible(const Measurement& obs) const {
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
  require(close(obs.meta.dt, solver.record_interval()), ErrorKind::config,
          "data snapshot interval " + std::to_string(obs.meta.dt) +
              " differs from the solver's " + std::to_string(solver.record_interval()));
  require(obs.n_time == solver.num_records(), ErrorKind::config,
          "data holds " + std::to_string(obs.n_time) + " snapshots, solver records " +
              std::to_string(solver.num_records()));
  require(obs.n_freq == static_cast<int>(solver.frequencies.size()), ErrorKind::config,
          "frequency count differs between data and solver");
  for (int i = 0; i < obs.n_freq; ++i) {
    require(i < static_cast<int>(obs.meta.frequencies.size()) &&
                close(obs.meta.frequencies[i], solver.frequencies[i]),
            ErrorKind::config, "frequency list differs between data and solver");
  }
  require(obs.meta.sensor_xs.size() == sensor_xs.size(), ErrorKind::config,
          "sensor count differs between data and solver");
  const double tol = 1e-9 * mesh.hx;
  for (std::size_t k = 0; k < sensor_xs.size(); ++k) {
    require(std::abs(obs.meta.sensor_xs[k] - sensor_xs[k]) <= tol, ErrorKind::config,
            "sensor positions differ between data and solver");
  }
}

Likelihood::Likelihood(std::shared_ptr<const ForwardContext> ctx, Measurement observed,
                       NoiseModel noise)
    : ctx_(std::move(ctx)), observed_(std::move(observed)), noise_(noise) {
  require(ctx_ != nullptr, ErrorKind::config, "likelihood needs a forward context");
  require(observed_.sigma.size() == static_cast<std::size_t>(observed_.n_freq),
          ErrorKind::config, "observed data carries no noise sigma");
  for (double s : observed_.sigma) require(s > 0.0, ErrorKind::config, "noise sigma must be > 0");
  ctx_->check_compatible(observed_);
  weights_ = boundary_weights(ctx_->sensor_xs);
}

LogLikelihoodValue Likelihood::evaluate(const SeabedCurve& h, Measurement* prediction) const {
  auto pred = ctx_->predict(h);
  auto v = misfit(observed_, pred, observed_.sigma, weights_, noise_);
  if (prediction) *prediction = std::move(pred);
  return v;
}

double Likelihood::potential(std::span<const double> beta, double s) const {
  const auto values = kl_values(beta, ctx_->mean_offset, ctx_->kl, s);
  if (!inside_domain(values)) return kInfinitePotential;
  return evaluate(kl_assemble(beta, ctx_->mean_offset, ctx_->kl, s)).total;
}

LogLikelihoodValue nll_total(const Measurement& y_obs, const SeabedCurve& h,
                             const ForwardContext& ctx, const NoiseModel& noise) {
  ctx.check_compatible(y_obs);
  require(y_obs.sigma.size() == static_cast<std::size_t>(y_obs.n_freq), ErrorKind::config,
          "observed data carries no noise sigma");
  const auto pred = ctx.predict(h);
  return misfit(y_obs, pred, y_obs.sigma, boundary_weights(ctx.sensor_xs), noise);
}

}  // namespace seabed
