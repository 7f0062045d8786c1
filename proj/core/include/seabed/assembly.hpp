#pragma once

#include <span>
#include <vector>

#include "seabed/material.hpp"
#include "seabed/mesh.hpp"
#include "seabed/sparse.hpp"

namespace seabed {

/// Spatial source profile g(s) = exp(-|s|^2 / width) centred at (x, depth).
struct SourceLayout {
  std::vector<double> xs{-2.4, -1.2, 0.0, 1.2, 2.4};
  double depth = 1.4;
  double width = 0.0025;

  void validate(const Rect& rect) const;
};

/// P1 finite element operators of the semi-discrete system
///   R dv/dt + D u + C v = f(t) b,   du/dt = v.
struct OperatorSet {
  /// int rho phi_i phi_j
  CsrMatrix R;
  /// int rho c^2 grad phi_i . grad phi_j
  CsrMatrix D;
  /// int_{absorbing boundary} rho c phi_i phi_j ds; all zeros when closed.
  CsrMatrix C;
  /// int phi_i phi_j
  CsrMatrix M;
  /// int g(x - x_s) phi_i, one vector per source.
  std::vector<std::vector<double>> b_src;
  /// Sum of b_src (all sources fire together).
  std::vector<double> b;
  bool absorbing = true;

  int size() const { return R.rows(); }
};

/// Consistent mass matrix weighted by a per-triangle coefficient.
CsrMatrix weighted_mass(const Mesh& mesh, std::span<const double> weight);
CsrMatrix weighted_stiffness(const Mesh& mesh, std::span<const double> weight);
/// Boundary mass on edges tagged `other`, weighted by the adjacent triangle.
CsrMatrix boundary_damping(const Mesh& mesh, std::span<const double> weight);

/// Load vector of the Gaussian source, integrated on subdivided triangles with
/// a degree-5 rule so the narrow profile is resolved on any mesh.
std::vector<double> source_vector(const Mesh& mesh, double x, double y, double width);

/// Material-independent pieces: M and the source vectors.
struct StaticOperators {
  CsrMatrix M;
  std::vector<std::vector<double>> b_src;
  std::vector<double> b;
};
StaticOperators assemble_static(const Mesh& mesh, const SourceLayout& sources);

OperatorSet assemble(const Mesh& mesh, const MaterialField& material,
                     const StaticOperators& fixed, bool absorbing = true);

OperatorSet assemble(const Mesh& mesh, const MaterialField& material,
                     const SourceLayout& sources, bool absorbing = true);

/// Ricker-type wavelet (1 - 2 pi^2 f0^2 t^2) exp(-pi^2 f0^2 t^2).
double source_time(double f0, double t);

}  // namespace seabed
