#pragma once

// Hierarchical Gaussian prior over seabed interface curves.
//
// A curve on [a, b] is represented through a truncated Karhunen-Loeve
// expansion in the cosine basis
//
//   h(x) = m + sum_{j=1}^{n_kl} sqrt(lambda_j(s)) beta_j e_j(x),
//   e_j(x) = cos(pi j (x - a) / (b - a)) / z,   z = sqrt((b - a) / 2),
//
// with Whittle-Matern style eigenvalues
//
//   lambda_j(s) = ((1 / ell)^2 + j^2)^(sign * 2 s),  sign = -1 by default.
//
// Cosine modes have zero slope at both ends, so every realization meets the
// vertical walls of the domain orthogonally.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace seabed {

using Rng = std::mt19937_64;

/// Curves must stay strictly inside (-1.5, 1.5) to remain in the domain.
inline constexpr double kVerticalHalfExtent = 1.5;

struct KlConfig {
  int n_kl = 256;
  int grid_n = 512;
  double a = -3.0;
  double b = 3.0;
  double ell = 1.0;
  /// Sign of the eigenvalue exponent; -1 gives decaying (trace-class) spectra.
  double exponent_sign = -1.0;

  void validate() const;
  double spacing() const { return (b - a) / (grid_n - 1); }
  std::vector<double> grid() const;
};

struct RegularityBounds {
  double lo = 0.5;
  double hi = 5.0;

  void validate() const;
  bool contains(double s) const { return s >= lo && s <= hi; }
};

struct SeabedCurve {
  std::vector<double> xs;
  std::vector<double> values;
  /// Whitened KL coefficients; empty for curves not produced by kl_assemble.
  std::vector<double> coeffs;
  double mean_offset = 0.0;
  /// Regularity used to assemble the curve (0 when not applicable).
  double s = 0.0;
  /// Periodic curves repeat with period (xs.front() .. xs.front() + period);
  /// xs then excludes the right end point.
  bool periodic = false;
  double period = 0.0;

  /// Piecewise-linear interpolation; throws a domain error outside the grid
  /// for non-periodic curves.
  double at(double x) const;
  double min_value() const;
  double max_value() const;
};

std::vector<double> eigenvalues(const KlConfig& cfg, double s);

/// L2([a, b]) normalization constant of every cosine mode j >= 1.
double basis_normalization(const KlConfig& cfg);

/// e_j sampled on cfg.grid(); 1 <= j <= cfg.n_kl.
std::vector<double> basis_eval(int j, const KlConfig& cfg);

/// Trapezoidal inner product on the KL grid.
double discrete_inner(std::span<const double> f, std::span<const double> g,
                      const KlConfig& cfg);

enum class KlMethod { fast_cosine, direct };

SeabedCurve kl_assemble(std::span<const double> coeffs, double mean_offset,
                        const KlConfig& cfg, double s,
                        KlMethod method = KlMethod::fast_cosine);

/// Assembly without the containment check, for diagnostics and tests.
std::vector<double> kl_values(std::span<const double> coeffs, double mean_offset,
                              const KlConfig& cfg, double s,
                              KlMethod method = KlMethod::fast_cosine);

bool inside_domain(std::span<const double> values);

std::vector<double> standard_normal(Rng& rng, int n);

/// Draws coefficients i.i.d. N(0, 1) and assembles; curves leaving the domain
/// are rejected and redrawn up to max_attempts times.
SeabedCurve sample_prior(Rng& rng, const KlConfig& cfg, double s,
                         double mean_offset = 0.0, int max_attempts = 100);

double sample_s_prior(Rng& rng, const RegularityBounds& bounds);

struct OutOfPriorConfig {
  int coarse_n = 64;
  int fine_n = 512;
  double kernel_width = 0.25;
  double amplitude = 0.25;
  double a = -3.0;
  double b = 3.0;

  void validate() const;
};

/// Smoothed white noise: N(0, 1) vector of length coarse_n, periodic linear
/// interpolation to fine_n points, circular convolution with a normalized
/// periodic Gaussian kernel, mean removal and rescaling to max |h| = amplitude.
SeabedCurve out_of_prior_seabed(Rng& rng, const OutOfPriorConfig& cfg);

std::vector<double> periodic_linear_interpolate(std::span<const double> coarse,
                                                int fine_n);

/// k(d) = exp(-(d / width)^2 / 2) / z on a periodic grid of n points over
/// `period`, with d the wrapped distance to grid point 0 and z chosen so the
/// kernel integrates to one under the rectangle rule.
std::vector<double> periodic_gaussian_kernel(int n, double period, double width);

/// FFT-based circular convolution, scaled by the grid spacing `dx` so it
/// approximates the convolution integral.
std::vector<double> circular_convolve(std::span<const double> signal,
                                      std::span<const double> kernel, double dx);

}  // namespace seabed
