#pragma once

#include <string>
#include <vector>

#include "seabed/kl_prior.hpp"
#include "seabed/mesh.hpp"

namespace seabed {

/// Water above the interface follows a linearized equation of state,
///   rho+(y) = rho0 (1 + 0.0044 (1.5 - y)),  alpha+(y) = lambda0 (1 + 0.025 (1.5 - y)),
/// and the rock below is homogeneous with (rho_minus, alpha_bottom).
struct MaterialConstants {
  double rho0 = 1.0;
  double rho_minus = 3.0;
  double lambda0 = 1.5;
  double alpha_bottom = 6.4;

  void validate() const;
};

struct PointMaterial {
  double rho;
  double alpha;
  double c;
};

double water_density(double y, const MaterialConstants& k);
double water_stiffness(double y, const MaterialConstants& k);

/// Coefficients at a point; y <= h(x) counts as rock.
PointMaterial coefficients_at(double x, double y, const SeabedCurve& h,
                              const MaterialConstants& k);

enum class MaterialSampling {
  /// One-point rule at the triangle centroid.
  centroid,
  /// Exact cell average of the piecewise coefficient; varies continuously
  /// with the interface curve.
  cell_average,
};

/// Per-triangle material values.
struct MaterialField {
  std::vector<double> rho;
  std::vector<double> alpha;
  std::vector<double> c;
  /// Area fraction of each triangle lying below the interface.
  std::vector<double> rock_fraction;

  std::size_t size() const { return rho.size(); }
};

MaterialField coeff_fields(const SeabedCurve& h, const Mesh& mesh,
                           const MaterialConstants& k,
                           MaterialSampling sampling = MaterialSampling::cell_average);

MaterialField uniform_material(const Mesh& mesh, double rho, double alpha);

struct MaterialBounds {
  double rho_min, rho_max;
  double alpha_min, alpha_max;
  double c_min, c_max;
};

/// Envelope of the coefficients over the vertical extent of `rect`.
MaterialBounds material_bounds(const MaterialConstants& k, const Rect& rect = {});

/// Area of triangle `tri` lying below the interface, together with the water
/// part's area and first y-moment. Exact for piecewise-linear curves.
struct CellSplit {
  double rock_area;
  double water_area;
  double water_y_moment;
};
CellSplit split_cell(const Mesh& mesh, int tri, const SeabedCurve& h);

/// Debug dump: x, y, rho, alpha, c at every triangle centroid.
void write_material_csv(const std::string& path, const Mesh& mesh,
                        const MaterialField& field);

}  // namespace seabed
