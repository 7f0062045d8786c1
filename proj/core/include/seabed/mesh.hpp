#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace seabed {

struct Rect {
  double x0 = -3.0;
  double x1 = 3.0;
  double y0 = -1.5;
  double y1 = 1.5;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
};

/// top = sea surface (Neumann), other = absorbing walls and floor.
enum class BoundaryTag : std::uint8_t { top, other };

struct BoundaryEdge {
  int n0;
  int n1;
  int element;
  BoundaryTag tag;
};

/// Structured triangulation of a rectangle: nx * ny cells, each split along
/// its (i, j) -> (i + 1, j + 1) diagonal into a lower and an upper triangle.
struct Mesh {
  int nx = 0;
  int ny = 0;
  Rect rect;
  double hx = 0.0;
  double hy = 0.0;
  std::vector<double> x;
  std::vector<double> y;
  /// Counter-clockwise vertex triples. Triangle 2 * (j * nx + i) is the lower
  /// triangle of cell (i, j), 2 * (j * nx + i) + 1 the upper one.
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary;

  int node(int i, int j) const { return j * (nx + 1) + i; }
  int num_nodes() const { return static_cast<int>(x.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  double min_spacing() const { return hx < hy ? hx : hy; }

  /// Surface nodes ordered by increasing x.
  std::vector<int> top_nodes() const;
};

Mesh build_mesh(int nx, int ny, const Rect& rect = {});

/// nx - 2 equidistant sensors on the interior surface nodes i = 1 .. nx - 2;
/// 186 sensors on the 188-cell production mesh. Any mesh whose nx is a
/// multiple of `nx` contains these positions as nodes.
std::vector<double> default_sensor_xs(int nx, const Rect& rect = {});

/// Node index of every sensor on the surface; alignment error if a sensor x
/// is not a node x.
std::vector<int> sensor_node_indices(const Mesh& mesh, std::span<const double> sensor_xs);

}  // namespace seabed
