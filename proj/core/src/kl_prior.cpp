#include "seabed/kl_prior.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "fft.hpp"
#include "seabed/error.hpp"

namespace seabed {

void KlConfig::validate() const {
  require(n_kl >= 1, ErrorKind::config, "n_kl must be >= 1");
  // Cosine modes are discretely orthonormal under the trapezoidal rule only
  // for j <= grid_n - 2; mode grid_n - 1 aliases to an alternating sequence.
  require(grid_n >= n_kl + 2, ErrorKind::config,
          "grid_n must exceed n_kl by at least 2 (got grid_n=" +
              std::to_string(grid_n) + ", n_kl=" + std::to_string(n_kl) + ")");
  require(a < b, ErrorKind::config, "KL domain requires a < b");
  require(ell > 0.0, ErrorKind::domain, "correlation length ell must be > 0");
  require(exponent_sign == -1.0 || exponent_sign == 1.0, ErrorKind::config,
          "exponent_sign must be -1 or +1");
}

std::vector<double> KlConfig::grid() const {
  std::vector<double> xs(grid_n);
  const double dx = spacing();
  for (int m = 0; m < grid_n; ++m) xs[m] = a + m * dx;
  xs.back() = b;
  return xs;
}

void RegularityBounds::validate() const {
  require(lo > 0.0 && lo <= hi, ErrorKind::config,
          "regularity bounds must satisfy 0 < lo <= hi");
}

double SeabedCurve::at(double x) const {
  const std::size_t n = xs.size();
  require(n >= 2 && values.size() == n, ErrorKind::shape,
          "seabed curve needs at least two grid points");
  if (periodic) {
    const double x0 = xs.front();
    double t = std::fmod(x - x0, period);
    if (t < 0.0) t += period;
    const double dx = period / static_cast<double>(n);
    double pos = t / dx;
    auto i = static_cast<std::size_t>(pos);
    if (i >= n) i = n - 1;
    const double frac = pos - static_cast<double>(i);
    return values[i] * (1.0 - frac) + values[(i + 1) % n] * frac;
  }
  const double tol = 1e-12 * (1.0 + std::abs(xs.back() - xs.front()));
  if (x < xs.front() - tol || x > xs.back() + tol) {
    fail(ErrorKind::domain, "x=" + std::to_string(x) + " outside seabed curve extent [" +
                                std::to_string(xs.front()) + ", " +
                                std::to_string(xs.back()) + "]");
  }
  x = std::clamp(x, xs.front(), xs.back());
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
  if (i >= n - 1) i = n - 2;
  const double w = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return values[i] * (1.0 - w) + values[i + 1] * w;
}

double SeabedCurve::min_value() const {
  return *std::min_element(values.begin(), values.end());
}

double SeabedCurve::max_value() const {
  return *std::max_element(values.begin(), values.end());
}

std::vector<double> eigenvalues(const KlConfig& cfg, double s) {
  require(s > 0.0, ErrorKind::domain, "regularity s must be > 0");
  require(cfg.ell > 0.0, ErrorKind::domain, "correlation length ell must be > 0");
  std::vector<double> lambda(cfg.n_kl);
  const double inv_ell2 = 1.0 / (cfg.ell * cfg.ell);
  for (int j = 1; j <= cfg.n_kl; ++j) {
    const double base = inv_ell2 + static_cast<double>(j) * j;
    lambda[j - 1] = std::pow(base, cfg.exponent_sign * 2.0 * s);
  }
  return lambda;
}

double basis_normalization(const KlConfig& cfg) {
  return std::sqrt((cfg.b - cfg.a) / 2.0);
}

std::vector<double> basis_eval(int j, const KlConfig& cfg) {
  require(j >= 1 && j <= cfg.n_kl, ErrorKind::index,
          "mode index " + std::to_string(j) + " outside [1, " +
              std::to_string(cfg.n_kl) + "]");
  const double z = basis_normalization(cfg);
  std::vector<double> e(cfg.grid_n);
  for (int m = 0; m < cfg.grid_n; ++m) {
    // (x_m - a) / (b - a) = m / (grid_n - 1) exactly on the uniform grid.
    const double t = static_cast<double>(m) / (cfg.grid_n - 1);
    e[m] = std::cos(std::numbers::pi * j * t) / z;
  }
  return e;
}

double discrete_inner(std::span<const double> f, std::span<const double> g,
                      const KlConfig& cfg) {
  require(f.size() == g.size() && static_cast<int>(f.size()) == cfg.grid_n,
          ErrorKind::shape, "inner product operands must live on the KL grid");
  double sum = 0.0;
  const std::size_t n = f.size();
  for (std::size_t m = 0; m < n; ++m) {
    const double w = (m == 0 || m == n - 1) ? 0.5 : 1.0;
    sum += w * f[m] * g[m];
  }
  return sum * cfg.spacing();
}

std::vector<double> kl_values(std::span<const double> coeffs, double mean_offset,
                              const KlConfig& cfg, double s, KlMethod method) {
  cfg.validate();
  require(static_cast<int>(coeffs.size()) == cfg.n_kl, ErrorKind::shape,
          "expected " + std::to_string(cfg.n_kl) + " KL coefficients, got " +
              std::to_string(coeffs.size()));
  const auto lambda = eigenvalues(cfg, s);
  const double z = basis_normalization(cfg);
  std::vector<double> amp(cfg.n_kl);
  for (int j = 0; j < cfg.n_kl; ++j) amp[j] = std::sqrt(lambda[j]) * coeffs[j] / z;

  std::vector<double> values(cfg.grid_n, 0.0);
  if (method == KlMethod::fast_cosine) {
    std::vector<double> spectrum(cfg.grid_n, 0.0);
    for (int j = 1; j <= cfg.n_kl; ++j) spectrum[j] = 0.5 * amp[j - 1];
    values = fft::dct1(spectrum);
  } else {
    for (int m = 0; m < cfg.grid_n; ++m) {
      const double t = static_cast<double>(m) / (cfg.grid_n - 1);
      double sum = 0.0;
      for (int j = 1; j <= cfg.n_kl; ++j) {
        sum += amp[j - 1] * std::cos(std::numbers::pi * j * t);
      }
      values[m] = sum;
    }
  }
  for (double& v : values) v += mean_offset;
  return values;
}

bool inside_domain(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) {
    return std::isfinite(v) && v > -kVerticalHalfExtent && v < kVerticalHalfExtent;
  });
}

SeabedCurve kl_assemble(std::span<const double> coeffs, double mean_offset,
                        const KlConfig& cfg, double s, KlMethod method) {
  SeabedCurve curve;
  curve.values = kl_values(coeffs, mean_offset, cfg, s, method);
  if (!inside_domain(curve.values)) {
    fail(ErrorKind::domain, "assembled seabed leaves the vertical extent (-1.5, 1.5)");
  }
  curve.xs = cfg.grid();
  curve.coeffs.assign(coeffs.begin(), coeffs.end());
  curve.mean_offset = mean_offset;
  curve.s = s;
  return curve;
}

std::vector<double> standard_normal(Rng& rng, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> z(n);
  for (double& v : z) v = normal(rng);
  return z;
}

SeabedCurve sample_prior(Rng& rng, const KlConfig& cfg, double s, double mean_offset,
                         int max_attempts) {
  cfg.validate();
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    auto coeffs = standard_normal(rng, cfg.n_kl);
    auto values = kl_values(coeffs, mean_offset, cfg, s);
    if (inside_domain(values)) return kl_assemble(coeffs, mean_offset, cfg, s);
  }
  fail(ErrorKind::domain, "no prior sample inside (-1.5, 1.5) after " +
                              std::to_string(max_attempts) + " attempts");
}

double sample_s_prior(Rng& rng, const RegularityBounds& bounds) {
  bounds.validate();
  if (bounds.lo == bounds.hi) return bounds.lo;
  std::uniform_real_distribution<double> uniform(bounds.lo, bounds.hi);
  return uniform(rng);
}

void OutOfPriorConfig::validate() const {
  require(coarse_n >= 2 && fine_n >= coarse_n && fine_n % coarse_n == 0,
          ErrorKind::config, "coarse_n must divide fine_n");
  require(kernel_width > 0.0, ErrorKind::config, "kernel_width must be > 0");
  require(amplitude > 0.0 && amplitude < kVerticalHalfExtent, ErrorKind::config,
          "amplitude must lie in (0, 1.5)");
  require(a < b, ErrorKind::config, "out-of-prior domain requires a < b");
}

std::vector<double> periodic_linear_interpolate(std::span<const double> coarse,
                                                int fine_n) {
  const int coarse_n = static_cast<int>(coarse.size());
  require(coarse_n >= 1 && fine_n % coarse_n == 0, ErrorKind::config,
          "coarse length must divide fine length");
  const int ratio = fine_n / coarse_n;
  std::vector<double> fine(fine_n);
  for (int m = 0; m < fine_n; ++m) {
    const int i = m / ratio;
    const double w = static_cast<double>(m % ratio) / ratio;
    fine[m] = coarse[i] * (1.0 - w) + coarse[(i + 1) % coarse_n] * w;
  }
  return fine;
}

std::vector<double> periodic_gaussian_kernel(int n, double period, double width) {
  const double dx = period / n;
  std::vector<double> k(n);
  for (int m = 0; m < n; ++m) {
    const double d = std::min(m, n - m) * dx;
    k[m] = std::exp(-0.5 * (d / width) * (d / width));
  }
  const double z = std::accumulate(k.begin(), k.end(), 0.0) * dx;
  for (double& v : k) v /= z;
  return k;
}

std::vector<double> circular_convolve(std::span<const double> signal,
                                      std::span<const double> kernel, double dx) {
  require(signal.size() == kernel.size(), ErrorKind::shape,
          "convolution operands must have equal length");
  auto out = fft::circular_convolve(signal, kernel);
  for (double& v : out) v *= dx;
  return out;
}

SeabedCurve out_of_prior_seabed(Rng& rng, const OutOfPriorConfig& cfg) {
  cfg.validate();
  const double period = cfg.b - cfg.a;
  const double dx = period / cfg.fine_n;

  const auto noise = standard_normal(rng, cfg.coarse_n);
  const auto fine = periodic_linear_interpolate(noise, cfg.fine_n);
  const auto kernel = periodic_gaussian_kernel(cfg.fine_n, period, cfg.kernel_width);
  auto smooth = circular_convolve(fine, kernel, dx);

  const double mean = std::accumulate(smooth.begin(), smooth.end(), 0.0) / cfg.fine_n;
  double peak = 0.0;
  for (double& v : smooth) {
    v -= mean;
    peak = std::max(peak, std::abs(v));
  }
  require(peak > 0.0, ErrorKind::degenerate, "smoothed noise is identically zero");
  for (double& v : smooth) v *= cfg.amplitude / peak;

  SeabedCurve curve;
  curve.values = std::move(smooth);
  curve.xs.resize(cfg.fine_n);
  for (int m = 0; m < cfg.fine_n; ++m) curve.xs[m] = cfg.a + m * dx;
  curve.periodic = true;
  curve.period = period;
  return curve;
}

}  // namespace seabed
