#pragma once

#include <span>
#include <string>
#include <vector>

#include "seabed/kl_prior.hpp"
#include "seabed/samplers.hpp"

namespace seabed {

/// Normalized autocorrelation rho_0..rho_{n-1} (biased estimator).
std::vector<double> autocorrelation(std::span<const double> chain);

/// N / (1 + 2 sum rho_k), truncated by Geyer's initial positive sequence.
/// Degenerate error for constant chains or fewer than 10 values.
double ess(std::span<const double> chain);

struct Kde {
  std::vector<double> x;
  std::vector<double> density;
  double bandwidth = 0.0;

  double mode() const;
  /// Trapezoidal integral over the grid.
  double integral() const;
};

/// 0.9 min(sd, IQR / 1.34) n^(-1/5).
double silverman_bandwidth(std::span<const double> samples);

/// Gaussian KDE on `grid_n` points spanning the samples plus five bandwidths
/// on each side. bandwidth <= 0 selects Silverman's rule.
Kde kde(std::span<const double> samples, double bandwidth = 0.0, int grid_n = 256);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Linear-interpolation quantile of sorted data (Hyndman-Fan type 7).
double quantile_sorted(std::span<const double> sorted, double p);

/// Shortest window containing ceil(level N) sorted samples.
Interval hpd(std::span<const double> samples, double level);
Interval equal_tailed(std::span<const double> samples, double level);

enum class BandKind { equal_tailed, hpd };

struct CredibilityBand {
  std::vector<double> xs;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> mean;
  double level = 0.99;

  /// Fraction of grid points with lo <= x <= hi where lower <= f <= upper.
  double coverage(std::span<const double> f, double lo, double hi) const;
};

/// Pointwise band over curves sampled on the shared grid `xs`; needs at least
/// 30 curves.
CredibilityBand credibility_band(const std::vector<std::vector<double>>& curves,
                                 std::span<const double> xs, double level = 0.99,
                                 BandKind kind = BandKind::equal_tailed);

/// Band of the curves assembled from every sample of a set.
CredibilityBand credibility_band(const SampleSet& set, const KlConfig& kl, double mean_offset,
                                 double level = 0.99, BandKind kind = BandKind::equal_tailed);

/// Averages the coefficients, fixes s to the mean of the s-chain and
/// assembles the corresponding curve (no containment check).
SeabedCurve posterior_mean_seabed(const SampleSet& set, const KlConfig& kl,
                                  double mean_offset = 0.0);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

/// Self-contained SVG line plot with axes and a legend.
std::string svg_line_plot(const std::vector<PlotSeries>& series, const std::string& title,
                          const std::string& xlabel, const std::string& ylabel);

}  // namespace seabed
