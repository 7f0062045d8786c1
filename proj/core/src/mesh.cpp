#include "seabed/mesh.hpp"

#include <cmath>
#include <string>

#include "seabed/error.hpp"

namespace seabed {

Mesh build_mesh(int nx, int ny, const Rect& rect) {
  require(nx >= 2 && ny >= 2, ErrorKind::config, "mesh needs nx, ny >= 2");
  require(rect.x0 < rect.x1 && rect.y0 < rect.y1, ErrorKind::config,
          "mesh rectangle is empty");

  Mesh mesh;
  mesh.nx = nx;
  mesh.ny = ny;
  mesh.rect = rect;
  mesh.hx = rect.width() / nx;
  mesh.hy = rect.height() / ny;

  const int num_nodes = (nx + 1) * (ny + 1);
  mesh.x.resize(num_nodes);
  mesh.y.resize(num_nodes);
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const int n = mesh.node(i, j);
      // Pin the last row/column to the rectangle so top nodes sit at y1 exactly.
      mesh.x[n] = (i == nx) ? rect.x1 : rect.x0 + i * mesh.hx;
      mesh.y[n] = (j == ny) ? rect.y1 : rect.y0 + j * mesh.hy;
    }
  }

  mesh.triangles.reserve(2 * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int sw = mesh.node(i, j);
      const int se = mesh.node(i + 1, j);
      const int ne = mesh.node(i + 1, j + 1);
      const int nw = mesh.node(i, j + 1);
      mesh.triangles.push_back({sw, se, ne});
      mesh.triangles.push_back({sw, ne, nw});
    }
  }

  auto lower = [nx](int i, int j) { return 2 * (j * nx + i); };
  for (int i = 0; i < nx; ++i) {
    mesh.boundary.push_back(
        {mesh.node(i, 0), mesh.node(i + 1, 0), lower(i, 0), BoundaryTag::other});
    mesh.boundary.push_back({mesh.node(i + 1, ny), mesh.node(i, ny),
                             lower(i, ny - 1) + 1, BoundaryTag::top});
  }
  for (int j = 0; j < ny; ++j) {
    mesh.boundary.push_back({mesh.node(nx, j), mesh.node(nx, j + 1),
                             lower(nx - 1, j), BoundaryTag::other});
    mesh.boundary.push_back(
        {mesh.node(0, j + 1), mesh.node(0, j), lower(0, j) + 1, BoundaryTag::other});
  }
  return mesh;
}

std::vector<int> Mesh::top_nodes() const {
  std::vector<int> nodes(nx + 1);
  for (int i = 0; i <= nx; ++i) nodes[i] = node(i, ny);
  return nodes;
}

std::vector<double> default_sensor_xs(int nx, const Rect& rect) {
  require(nx >= 3, ErrorKind::config, "default sensor layout needs nx >= 3");
  const double hx = rect.width() / nx;
  std::vector<double> xs(nx - 2);
  for (int k = 1; k <= nx - 2; ++k) xs[k - 1] = rect.x0 + k * hx;
  return xs;
}

std::vector<int> sensor_node_indices(const Mesh& mesh, std::span<const double> sensor_xs) {
  std::vector<int> nodes;
  nodes.reserve(sensor_xs.size());
  const double tol = 1e-9 * mesh.hx;
  for (double xs : sensor_xs) {
    const double pos = (xs - mesh.rect.x0) / mesh.hx;
    const long i = std::lround(pos);
    if (i < 0 || i > mesh.nx || std::abs(mesh.rect.x0 + i * mesh.hx - xs) > tol) {
      fail(ErrorKind::alignment, "sensor at x=" + std::to_string(xs) +
                                     " is not a surface node of the " +
                                     std::to_string(mesh.nx) + "x" +
                                     std::to_string(mesh.ny) + " mesh");
    }
    nodes.push_back(mesh.node(static_cast<int>(i), mesh.ny));
  }
  return nodes;
}

}  // namespace seabed
