#include "seabed/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <string>

#include "fft.hpp"
#include "seabed/error.hpp"

namespace seabed {

std::vector<double> autocorrelation(std::span<const double> chain) {
  require(!chain.empty(), ErrorKind::degenerate, "empty chain");
  auto acov = fft::autocovariance(chain);
  require(acov[0] > 0.0, ErrorKind::degenerate, "chain is constant");
  const double g0 = acov[0];
  for (double& g : acov) g /= g0;
  return acov;
}

double ess(std::span<const double> chain) {
  require(chain.size() >= 10, ErrorKind::degenerate, "ess needs at least 10 values");
  const auto rho = autocorrelation(chain);
  const std::size_t n = chain.size();
  // Pairs Gamma_m = rho_{2m} + rho_{2m+1}; tau = -1 + 2 sum_m Gamma_m.
  double tau = -1.0;
  for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
    const double gamma = rho[2 * m] + rho[2 * m + 1];
    if (gamma <= 0.0) break;
    tau += 2.0 * gamma;
  }
  return static_cast<double>(n) / std::max(tau, 1.0 / static_cast<double>(n));
}

double Kde::mode() const {
  const auto it = std::max_element(density.begin(), density.end());
  return x[static_cast<std::size_t>(it - density.begin())];
}

double Kde::integral() const {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    s += 0.5 * (x[i] - x[i - 1]) * (density[i] + density[i - 1]);
  }
  return s;
}

namespace {

std::vector<double> sorted_copy(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  return s;
}

double sample_sd(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (n - 1.0));
}

}  // namespace

double quantile_sorted(std::span<const double> sorted, double p) {
  require(!sorted.empty(), ErrorKind::degenerate, "quantile of an empty sample");
  require(p >= 0.0 && p <= 1.0, ErrorKind::domain, "quantile level must lie in [0, 1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double silverman_bandwidth(std::span<const double> samples) {
  require(samples.size() >= 2, ErrorKind::degenerate, "bandwidth needs two samples");
  const auto s = sorted_copy(samples);
  const double sd = sample_sd(samples);
  const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  return 0.9 * spread * std::pow(static_cast<double>(samples.size()), -0.2);
}

Kde kde(std::span<const double> samples, double bandwidth, int grid_n) {
  require(samples.size() >= 10, ErrorKind::degenerate, "kde needs at least 10 samples");
  require(grid_n >= 2, ErrorKind::config, "kde grid needs at least 2 points");
  require(sample_sd(samples) > 0.0, ErrorKind::degenerate, "kde of a constant sample");
  Kde out;
  out.bandwidth = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(samples);
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *mn - 5.0 * out.bandwidth;
  const double hi = *mx + 5.0 * out.bandwidth;
  const double step = (hi - lo) / (grid_n - 1);
  const double norm =
      1.0 / (static_cast<double>(samples.size()) * out.bandwidth * std::sqrt(2.0 * std::numbers::pi));
  out.x.resize(grid_n);
  out.density.assign(grid_n, 0.0);
  for (int g = 0; g < grid_n; ++g) {
    const double x = lo + g * step;
    out.x[g] = x;
    double s = 0.0;
    for (double v : samples) {
      const double u = (x - v) / out.bandwidth;
      s += std::exp(-0.5 * u * u);
    }
    out.density[g] = norm * s;
  }
  return out;
}

Interval hpd(std::span<const double> samples, double level) {
  require(!samples.empty(), ErrorKind::degenerate, "hpd of an empty sample");
  require(level > 0.0 && level <= 1.0, ErrorKind::domain, "hpd level must lie in (0, 1]");
  const auto s = sorted_copy(samples);
  const std::size_t n = s.size();
  const auto m = std::min<std::size_t>(
      n, std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(level * n - 1e-9))));
  std::size_t best = 0;
  double width = s[m - 1] - s[0];
  for (std::size_t i = 1; i + m <= n; ++i) {
    const double w = s[i + m - 1] - s[i];
    if (w < width) {
      width = w;
      best = i;
    }
  }
  return {s[best], s[best + m - 1]};
}

Interval equal_tailed(std::span<const double> samples, double level) {
  require(level > 0.0 && level <= 1.0, ErrorKind::domain, "level must lie in (0, 1]");
  const auto s = sorted_copy(samples);
  const double tail = 0.5 * (1.0 - level);
  return {quantile_sorted(s, tail), quantile_sorted(s, 1.0 - tail)};
}

double CredibilityBand::coverage(std::span<const double> f, double lo, double hi) const {
  require(f.size() == xs.size(), ErrorKind::shape, "curve does not match the band grid");
  int inside = 0, total = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < lo || xs[i] > hi) continue;
    ++total;
    if (f[i] >= lower[i] && f[i] <= upper[i]) ++inside;
  }
  require(total > 0, ErrorKind::domain, "no grid point inside the coverage window");
  return static_cast<double>(inside) / total;
}

CredibilityBand credibility_band(const std::vector<std::vector<double>>& curves,
                                 std::span<const double> xs, double level, BandKind kind) {
  require(curves.size() >= 30, ErrorKind::degenerate,
          "credibility band needs at least 30 samples, got " + std::to_string(curves.size()));
  require(level > 0.0 && level < 1.0, ErrorKind::domain, "band level must lie in (0, 1)");
  CredibilityBand band;
  band.xs.assign(xs.begin(), xs.end());
  band.level = level;
  const std::size_t g = xs.size();
  band.lower.resize(g);
  band.upper.resize(g);
  band.mean.resize(g);
  std::vector<double> column(curves.size());
  for (std::size_t i = 0; i < g; ++i) {
    double sum = 0.0;
    for (std::size_t c = 0; c < curves.size(); ++c) {
      require(curves[c].size() == g, ErrorKind::shape, "curves must share the grid");
      column[c] = curves[c][i];
      sum += column[c];
    }
    band.mean[i] = sum / static_cast<double>(curves.size());
    const auto iv = kind == BandKind::hpd ? hpd(column, level) : equal_tailed(column, level);
    // Keep the mean inside even when an HPD window excludes it.
    band.lower[i] = std::min(iv.lo, band.mean[i]);
    band.upper[i] = std::max(iv.hi, band.mean[i]);
  }
  return band;
}

CredibilityBand credibility_band(const SampleSet& set, const KlConfig& kl, double mean_offset,
                                 double level, BandKind kind) {
  std::vector<std::vector<double>> curves;
  curves.reserve(set.samples.size());
  for (const auto& c : set.samples) curves.push_back(kl_values(c.coeffs, mean_offset, kl, c.s));
  const auto xs = kl.grid();
  return credibility_band(curves, xs, level, kind);
}

SeabedCurve posterior_mean_seabed(const SampleSet& set, const KlConfig& kl,
                                  double mean_offset) {
  require(!set.samples.empty(), ErrorKind::degenerate, "empty sample set");
  const std::size_t n = set.samples.size();
  std::vector<double> mean(set.samples.front().coeffs.size(), 0.0);
  double s_bar = 0.0;
  for (const auto& c : set.samples) {
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += c.coeffs[j];
    s_bar += c.s;
  }
  for (double& m : mean) m /= static_cast<double>(n);
  s_bar /= static_cast<double>(n);
  SeabedCurve h;
  h.xs = kl.grid();
  h.values = kl_values(mean, mean_offset, kl, s_bar);
  h.coeffs = std::move(mean);
  h.mean_offset = mean_offset;
  h.s = s_bar;
  return h;
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string svg_line_plot(const std::vector<PlotSeries>& series, const std::string& title,
                          const std::string& xlabel, const std::string& ylabel) {
  const double width = 720, height = 440, left = 70, right = 20, top = 40, bottom = 55;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (xmin > xmax) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
                    "\" height=\"" + num(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(title) + "</text>\n";
  svg += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) +
         "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double xv = xmin + (xmax - xmin) * t / 5.0;
    const double yv = ymin + (ymax - ymin) * t / 5.0;
    svg += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(top + ph + 16) +
           "\" text-anchor=\"middle\">" + num(xv) + "</text>\n";
    svg += "<text x=\"" + num(left - 6) + "\" y=\"" + num(py(yv) + 4) +
           "\" text-anchor=\"end\">" + num(yv) + "</text>\n";
  }
  svg += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(height - 12) +
         "\" text-anchor=\"middle\">" + escape(xlabel) + "</text>\n";
  svg += "<text transform=\"translate(16," + num(top + ph / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + escape(ylabel) + "</text>\n";
  int row = 0;
  for (const auto& s : series) {
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"" +
           (s.dashed ? " stroke-dasharray=\"6,4\"" : "") + " points=\"" + pts + "\"/>\n";
    const double ly = top + 14 + 16 * row++;
    svg += "<line x1=\"" + num(left + pw - 150) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" +
           num(left + pw - 125) + "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + s.color + "\"/>\n";
    svg += "<text x=\"" + num(left + pw - 120) + "\" y=\"" + num(ly) + "\">" + escape(s.label) +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace seabed
