#include "seabed/assembly.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "seabed/error.hpp"

namespace seabed {
namespace {

struct Geometry {
  double area;
  std::array<double, 3> gx;
  std::array<double, 3> gy;
};

Geometry triangle_geometry(const Mesh& mesh, const std::array<int, 3>& t) {
  const double x0 = mesh.x[t[0]], y0 = mesh.y[t[0]];
  const double x1 = mesh.x[t[1]], y1 = mesh.y[t[1]];
  const double x2 = mesh.x[t[2]], y2 = mesh.y[t[2]];
  const double twice_area = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
  if (!(twice_area > 0.0)) {
    fail(ErrorKind::singularity, "triangle with nonpositive area " +
                                     std::to_string(0.5 * twice_area));
  }
  Geometry g;
  g.area = 0.5 * twice_area;
  g.gx = {(y1 - y2) / twice_area, (y2 - y0) / twice_area, (y0 - y1) / twice_area};
  g.gy = {(x2 - x1) / twice_area, (x0 - x2) / twice_area, (x1 - x0) / twice_area};
  return g;
}

// Degree-5 seven-point rule on the reference triangle (barycentric l1, l2).
struct QuadPoint {
  double l1, l2, w;
};
constexpr double kA1 = 0.059715871789770, kB1 = 0.470142064105115;
constexpr double kA2 = 0.797426985353087, kB2 = 0.101286507323456;
constexpr double kW0 = 0.225, kW1 = 0.132394152788506, kW2 = 0.125939180544827;
constexpr std::array<QuadPoint, 7> kRule{{
    {1.0 / 3.0, 1.0 / 3.0, kW0},
    {kB1, kB1, kW1}, {kA1, kB1, kW1}, {kB1, kA1, kW1},
    {kB2, kB2, kW2}, {kA2, kB2, kW2}, {kB2, kA2, kW2},
}};

}  // namespace

void SourceLayout::validate(const Rect& rect) const {
  require(!xs.empty(), ErrorKind::config, "at least one source is required");
  require(width > 0.0, ErrorKind::config, "source width must be > 0");
  require(depth > rect.y0 && depth < rect.y1, ErrorKind::config,
          "source depth outside the domain");
  for (double x : xs) {
    require(x > rect.x0 && x < rect.x1, ErrorKind::config, "source x outside the domain");
  }
}

CsrMatrix weighted_mass(const Mesh& mesh, std::span<const double> weight) {
  require(static_cast<int>(weight.size()) == mesh.num_triangles(), ErrorKind::shape,
          "mass weight must be given per triangle");
  std::vector<Triplet> trip;
  trip.reserve(9 * mesh.triangles.size());
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const auto& t = mesh.triangles[e];
    const auto g = triangle_geometry(mesh, t);
    const double s = weight[e] * g.area / 12.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) trip.push_back({t[a], t[b], s * (a == b ? 2.0 : 1.0)});
    }
  }
  return CsrMatrix(mesh.num_nodes(), mesh.num_nodes(), std::move(trip));
}

CsrMatrix weighted_stiffness(const Mesh& mesh, std::span<const double> weight) {
  require(static_cast<int>(weight.size()) == mesh.num_triangles(), ErrorKind::shape,
          "stiffness weight must be given per triangle");
  std::vector<Triplet> trip;
  trip.reserve(9 * mesh.triangles.size());
  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const auto& t = mesh.triangles[e];
    const auto g = triangle_geometry(mesh, t);
    const double s = weight[e] * g.area;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        trip.push_back({t[a], t[b], s * (g.gx[a] * g.gx[b] + g.gy[a] * g.gy[b])});
      }
    }
  }
  return CsrMatrix(mesh.num_nodes(), mesh.num_nodes(), std::move(trip));
}

CsrMatrix boundary_damping(const Mesh& mesh, std::span<const double> weight) {
  require(static_cast<int>(weight.size()) == mesh.num_triangles(), ErrorKind::shape,
          "damping weight must be given per triangle");
  std::vector<Triplet> trip;
  for (const auto& edge : mesh.boundary) {
    if (edge.tag != BoundaryTag::other) continue;
    const double len = std::hypot(mesh.x[edge.n1] - mesh.x[edge.n0],
                                  mesh.y[edge.n1] - mesh.y[edge.n0]);
    const double s = weight[edge.element] * len / 6.0;
    trip.push_back({edge.n0, edge.n0, 2.0 * s});
    trip.push_back({edge.n1, edge.n1, 2.0 * s});
    trip.push_back({edge.n0, edge.n1, s});
    trip.push_back({edge.n1, edge.n0, s});
  }
  return CsrMatrix(mesh.num_nodes(), mesh.num_nodes(), std::move(trip));
}

std::vector<double> source_vector(const Mesh& mesh, double sx, double sy, double width) {
  require(width > 0.0, ErrorKind::domain, "source width must be > 0");
  std::vector<double> b(mesh.num_nodes(), 0.0);
  // exp(-r^2 / width) < 1e-17 beyond this radius.
  const double cutoff = std::sqrt(40.0 * width);
  const double sub_h = 0.2 * std::sqrt(width);
  const int m = std::max(1, static_cast<int>(std::ceil(std::max(mesh.hx, mesh.hy) / sub_h)));

  for (int e = 0; e < mesh.num_triangles(); ++e) {
    const auto& t = mesh.triangles[e];
    const double xmin = std::min({mesh.x[t[0]], mesh.x[t[1]], mesh.x[t[2]]});
    const double xmax = std::max({mesh.x[t[0]], mesh.x[t[1]], mesh.x[t[2]]});
    const double ymin = std::min({mesh.y[t[0]], mesh.y[t[1]], mesh.y[t[2]]});
    const double ymax = std::max({mesh.y[t[0]], mesh.y[t[1]], mesh.y[t[2]]});
    const double dx = std::max({xmin - sx, 0.0, sx - xmax});
    const double dy = std::max({ymin - sy, 0.0, sy - ymax});
    if (dx * dx + dy * dy > cutoff * cutoff) continue;

    const auto g = triangle_geometry(mesh, t);
    const double px = mesh.x[t[0]], py = mesh.y[t[0]];
    const double ax = mesh.x[t[1]] - px, ay = mesh.y[t[1]] - py;
    const double bx = mesh.x[t[2]] - px, by = mesh.y[t[2]] - py;
    const double sub_area = g.area / (static_cast<double>(m) * m);
    std::array<double, 3> acc{0.0, 0.0, 0.0};

    auto integrate_sub = [&](double l1a, double l2a, double l1b, double l2b, double l1c,
                             double l2c) {
      for (const auto& q : kRule) {
        const double l0q = 1.0 - q.l1 - q.l2;
        const double l1 = l0q * l1a + q.l1 * l1b + q.l2 * l1c;
        const double l2 = l0q * l2a + q.l1 * l2b + q.l2 * l2c;
        const double x = px + l1 * ax + l2 * bx;
        const double y = py + l1 * ay + l2 * by;
        const double r2 = (x - sx) * (x - sx) + (y - sy) * (y - sy);
        const double gw = q.w * sub_area * std::exp(-r2 / width);
        acc[0] += gw * (1.0 - l1 - l2);
        acc[1] += gw * l1;
        acc[2] += gw * l2;
      }
    };
    const double inv = 1.0 / m;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; i + j < m; ++j) {
        integrate_sub(i * inv, j * inv, (i + 1) * inv, j * inv, i * inv, (j + 1) * inv);
        if (i + j <= m - 2) {
          integrate_sub((i + 1) * inv, j * inv, (i + 1) * inv, (j + 1) * inv, i * inv,
                        (j + 1) * inv);
        }
      }
    }
    for (int a = 0; a < 3; ++a) b[t[a]] += acc[a];
  }
  return b;
}

StaticOperators assemble_static(const Mesh& mesh, const SourceLayout& sources) {
  sources.validate(mesh.rect);
  StaticOperators fixed;
  std::vector<double> ones(mesh.num_triangles(), 1.0);
  fixed.M = weighted_mass(mesh, ones);
  fixed.b.assign(mesh.num_nodes(), 0.0);
  for (double sx : sources.xs) {
    auto bs = source_vector(mesh, sx, sources.depth, sources.width);
    for (int n = 0; n < mesh.num_nodes(); ++n) fixed.b[n] += bs[n];
    fixed.b_src.push_back(std::move(bs));
  }
  return fixed;
}

OperatorSet assemble(const Mesh& mesh, const MaterialField& material,
                     const StaticOperators& fixed, bool absorbing) {
  require(static_cast<int>(material.size()) == mesh.num_triangles(), ErrorKind::shape,
          "material field does not match the mesh");
  OperatorSet ops;
  ops.R = weighted_mass(mesh, material.rho);
  ops.D = weighted_stiffness(mesh, material.alpha);
  std::vector<double> impedance(material.size(), 0.0);
  if (absorbing) {
    for (std::size_t e = 0; e < material.size(); ++e) {
      impedance[e] = material.rho[e] * material.c[e];
    }
  }
  ops.C = boundary_damping(mesh, impedance);
  ops.M = fixed.M;
  ops.b_src = fixed.b_src;
  ops.b = fixed.b;
  ops.absorbing = absorbing;
  return ops;
}

OperatorSet assemble(const Mesh& mesh, const MaterialField& material,
                     const SourceLayout& sources, bool absorbing) {
  return assemble(mesh, material, assemble_static(mesh, sources), absorbing);
}

double source_time(double f0, double t) {
  const double a = std::numbers::pi * std::numbers::pi * f0 * f0 * t * t;
  return (1.0 - 2.0 * a) * std::exp(-a);
}

}  // namespace seabed
