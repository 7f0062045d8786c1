#include "seabed/material.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "seabed/error.hpp"

namespace seabed {

void MaterialConstants::validate() const {
  require(rho0 > 0 && rho_minus > 0 && lambda0 > 0 && alpha_bottom > 0,
          ErrorKind::config, "material constants must be positive");
  require(alpha_bottom > lambda0, ErrorKind::config, "rock must be stiffer than water");
}

double water_density(double y, const MaterialConstants& k) {
  return k.rho0 * (1.0 + 0.0044 * (1.5 - y));
}

double water_stiffness(double y, const MaterialConstants& k) {
  return k.lambda0 * (1.0 + 0.025 * (1.5 - y));
}

PointMaterial coefficients_at(double x, double y, const SeabedCurve& h,
                              const MaterialConstants& k) {
  double rho, alpha;
  if (y > h.at(x)) {
    rho = water_density(y, k);
    alpha = water_stiffness(y, k);
  } else {
    rho = k.rho_minus;
    alpha = k.alpha_bottom;
  }
  return {rho, alpha, std::sqrt(alpha / rho)};
}

namespace {

// Curve knots strictly inside (x0, x1).
void interior_knots(const SeabedCurve& h, double x0, double x1, std::vector<double>& out) {
  out.clear();
  const auto& xs = h.xs;
  if (h.periodic) {
    const double dx = h.period / static_cast<double>(xs.size());
    const double base = xs.front();
    const long k0 = static_cast<long>(std::floor((x0 - base) / dx)) + 1;
    for (long k = k0;; ++k) {
      const double xk = base + k * dx;
      if (xk >= x1) break;
      if (xk > x0) out.push_back(xk);
    }
    return;
  }
  auto it = std::upper_bound(xs.begin(), xs.end(), x0);
  for (; it != xs.end() && *it < x1; ++it) out.push_back(*it);
}

struct Piece {
  double rock = 0.0;
  double water = 0.0;
  double moment = 0.0;
};

// Integrates over [p, q] where the interface, the lower bound and the upper
// bound of the vertical cross-section are all linear.
void integrate_linear(double p, double q, double hp, double hq, double lp, double lq,
                      double up, double uq, Piece& acc) {
  double cuts[4] = {p, q, 0.0, 0.0};
  int ncut = 2;
  auto add_root = [&](double fp, double fq) {
    if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
      cuts[ncut++] = p + (q - p) * fp / (fp - fq);
    }
  };
  add_root(hp - lp, hq - lq);
  add_root(hp - up, hq - uq);
  std::sort(cuts, cuts + ncut);

  auto lerp = [&](double a0, double a1, double x) {
    return q == p ? a0 : a0 + (a1 - a0) * (x - p) / (q - p);
  };
  for (int k = 0; k + 1 < ncut; ++k) {
    const double xa = cuts[k];
    const double xb = cuts[k + 1];
    const double w = xb - xa;
    if (w <= 0.0) continue;
    const double xm = 0.5 * (xa + xb);
    // clamp(h, lo, up) is linear on the sub-piece; Simpson is exact for the
    // quadratic moment integrand.
    auto level = [&](double x) {
      return std::clamp(lerp(hp, hq, x), lerp(lp, lq, x), lerp(up, uq, x));
    };
    auto rock = [&](double x) { return level(x) - lerp(lp, lq, x); };
    auto water = [&](double x) { return lerp(up, uq, x) - level(x); };
    auto moment = [&](double x) {
      const double top = lerp(up, uq, x);
      const double c = level(x);
      return 0.5 * (top * top - c * c);
    };
    acc.rock += 0.5 * w * (rock(xa) + rock(xb));
    acc.water += 0.5 * w * (water(xa) + water(xb));
    acc.moment += w / 6.0 * (moment(xa) + 4.0 * moment(xm) + moment(xb));
  }
}

}  // namespace

CellSplit split_cell(const Mesh& mesh, int tri, const SeabedCurve& h) {
  const int cell = tri / 2;
  const bool upper = tri % 2 == 1;
  const int i = cell % mesh.nx;
  const int j = cell / mesh.nx;
  const double x0 = mesh.x[mesh.node(i, j)];
  const double x1 = mesh.x[mesh.node(i + 1, j)];
  const double y0 = mesh.y[mesh.node(i, j)];
  const double y1 = mesh.y[mesh.node(i, j + 1)];

  // Cross-section bounds at the left and right cell edges.
  const double lo0 = y0;
  const double lo1 = upper ? y1 : y0;
  const double up0 = upper ? y1 : y0;
  const double up1 = y1;
  const double area = 0.5 * (x1 - x0) * (y1 - y0);

  thread_local std::vector<double> knots;
  interior_knots(h, x0, x1, knots);
  std::vector<double> xs;
  xs.reserve(knots.size() + 2);
  xs.push_back(x0);
  xs.insert(xs.end(), knots.begin(), knots.end());
  xs.push_back(x1);

  std::vector<double> hs(xs.size());
  double hmin = 1e300, hmax = -1e300;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    hs[k] = h.at(xs[k]);
    hmin = std::min(hmin, hs[k]);
    hmax = std::max(hmax, hs[k]);
  }
  const double ymin = std::min(lo0, lo1);
  const double ymax = std::max(up0, up1);
  const double centroid_y = upper ? (y0 + 2.0 * y1) / 3.0 : (2.0 * y0 + y1) / 3.0;
  if (hmax <= ymin) return {0.0, area, area * centroid_y};
  if (hmin >= ymax) return {area, 0.0, 0.0};

  Piece acc;
  auto bound = [&](double b0, double b1, double x) { return b0 + (b1 - b0) * (x - x0) / (x1 - x0); };
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const double p = xs[k];
    const double q = xs[k + 1];
    integrate_linear(p, q, hs[k], hs[k + 1], bound(lo0, lo1, p), bound(lo0, lo1, q),
                     bound(up0, up1, p), bound(up0, up1, q), acc);
  }
  return {acc.rock, acc.water, acc.moment};
}

MaterialField coeff_fields(const SeabedCurve& h, const Mesh& mesh,
                           const MaterialConstants& k, MaterialSampling sampling) {
  k.validate();
  if (!h.periodic) {
    require(!h.xs.empty() && h.xs.front() <= mesh.rect.x0 + 1e-12 &&
                h.xs.back() >= mesh.rect.x1 - 1e-12,
            ErrorKind::domain, "seabed curve does not cover the mesh x-extent");
  }
  const int nt = mesh.num_triangles();
  MaterialField field;
  field.rho.resize(nt);
  field.alpha.resize(nt);
  field.c.resize(nt);
  field.rock_fraction.resize(nt);

  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    const double cx = (mesh.x[tri[0]] + mesh.x[tri[1]] + mesh.x[tri[2]]) / 3.0;
    const double cy = (mesh.y[tri[0]] + mesh.y[tri[1]] + mesh.y[tri[2]]) / 3.0;
    double rho, alpha;
    if (sampling == MaterialSampling::centroid) {
      const auto pm = coefficients_at(cx, cy, h, k);
      rho = pm.rho;
      alpha = pm.alpha;
      field.rock_fraction[t] = cy <= h.at(cx) ? 1.0 : 0.0;
    } else {
      const auto split = split_cell(mesh, t, h);
      const double area = split.rock_area + split.water_area;
      const double theta = std::clamp(split.rock_area / area, 0.0, 1.0);
      // rho+ and alpha+ are affine in y, so their water-part averages are the
      // values at the water part's centroid height.
      const double yw = split.water_area > 0.0 ? split.water_y_moment / split.water_area : cy;
      rho = theta * k.rho_minus + (1.0 - theta) * water_density(yw, k);
      alpha = theta * k.alpha_bottom + (1.0 - theta) * water_stiffness(yw, k);
      field.rock_fraction[t] = theta;
    }
    field.rho[t] = rho;
    field.alpha[t] = alpha;
    field.c[t] = std::sqrt(alpha / rho);
  }
  return field;
}

MaterialField uniform_material(const Mesh& mesh, double rho, double alpha) {
  require(rho > 0.0 && alpha > 0.0, ErrorKind::domain, "uniform material must be positive");
  const auto nt = static_cast<std::size_t>(mesh.num_triangles());
  MaterialField field;
  field.rho.assign(nt, rho);
  field.alpha.assign(nt, alpha);
  field.c.assign(nt, std::sqrt(alpha / rho));
  field.rock_fraction.assign(nt, 0.0);
  return field;
}

MaterialBounds material_bounds(const MaterialConstants& k, const Rect& rect) {
  const double rho_top = water_density(rect.y1, k);
  const double rho_bot = water_density(rect.y0, k);
  const double a_top = water_stiffness(rect.y1, k);
  const double a_bot = water_stiffness(rect.y0, k);
  MaterialBounds b{};
  b.rho_min = std::min({rho_top, rho_bot, k.rho_minus});
  b.rho_max = std::max({rho_top, rho_bot, k.rho_minus});
  b.alpha_min = std::min({a_top, a_bot, k.alpha_bottom});
  b.alpha_max = std::max({a_top, a_bot, k.alpha_bottom});
  // c = sqrt(alpha / rho) over every admissible mixture of the two phases.
  b.c_min = std::sqrt(b.alpha_min / b.rho_max);
  b.c_max = std::sqrt(b.alpha_max / b.rho_min);
  return b;
}

void write_material_csv(const std::string& path, const Mesh& mesh,
                        const MaterialField& field) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open " + path);
  out << "x,y,rho,alpha,c\n";
  char buf[160];
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double cx = (mesh.x[tri[0]] + mesh.x[tri[1]] + mesh.x[tri[2]]) / 3.0;
    const double cy = (mesh.y[tri[0]] + mesh.y[tri[1]] + mesh.y[tri[2]]) / 3.0;
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g\n", cx, cy,
                  field.rho[t], field.alpha[t], field.c[t]);
    out << buf;
  }
}

}  // namespace seabed
