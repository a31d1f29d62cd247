#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "triplateau/mesh.hpp"

namespace triplateau {

// Pulled-back metric sample G = (d alpha)^T (d alpha).
struct MetricSample {
  double g11 = 1.0, g12 = 0.0, g22 = 1.0;
  bool degenerate = false;
  double det() const { return g11 * g22 - g12 * g12; }
};

using MetricField = std::vector<MetricSample>;  // one entry per triangle

// Per-triangle constant metric of the affine map; rank-deficient triangles
// are flagged, not rejected (they form the branch locus).
MetricField pullback_metric(const SheetMesh& sheet, const Positions& positions);

struct BeltramiSample {
  std::complex<double> mu{0.0, 0.0};
  bool degenerate = false;
};

// mu = (g11 - g22 + 2 i g12) / (g11 + g22 + 2 sqrt(det G)); |mu| < 1 on
// nondegenerate samples and 0 exactly when G is a positive multiple of the
// identity.
std::vector<BeltramiSample> beltrami_coefficient(const MetricField& metric);
std::complex<double> beltrami_of_metric(const MetricSample& g);

using MuFunction = std::function<std::complex<double>(double, double)>;

// Bilinear interpolant of vertex-averaged Beltrami samples of a sheet map,
// usable as march input.  Points outside the mesh take the nearest vertex
// value.
MuFunction beltrami_interpolant(const SheetMesh& sheet,
                                const Positions& positions);

struct MarchGrid {
  double x_min = -0.5;
  double x_max = 0.5;
  int nx = 101;
  double spacing() const { return (x_max - x_min) / (nx - 1); }
};

struct MarchOptions {
  double margin = 0.05;       // require |mu| <= 1 - margin
  double growth_guard = 1e6;  // truncate when the chart blows past this
};

// Marched isothermal chart.  Row r lives at y = r * step; columns carry the
// x-grid restricted to the common truncated window [col_lo, col_hi] (the
// finite-difference domain of determinacy shrinks by the stencil half-width
// each step).  Derivative fields are consistent with the marching system.
struct IsothermalChart {
  std::vector<double> y;
  std::vector<double> x;      // full grid
  int col_lo = 0, col_hi = 0; // inclusive window valid on every row
  Eigen::MatrixXd u, v;       // rows x nx (junk outside the window)
  Eigen::MatrixXd u_x, v_x, u_y, v_y;
  double x0 = 0.0;
  bool truncated = false;     // stopped early by the growth guard
  std::string diagnostic;

  int rows() const { return static_cast<int>(y.size()); }
};

// Marches the first-order system equivalent to the Beltrami equation
// w_zbar = mu w_z upward from the Cauchy line u(x,0) = x - x0, v(x,0) = 0,
// with classical RK4 in y and 4th-order finite differences in x.  Throws
// StabilityError when |mu| comes within `margin` of 1 on the grid.
IsothermalChart isothermal_march(const MuFunction& mu, const MarchGrid& grid,
                                 double x0, double step, double extent,
                                 const MarchOptions& options = {});

// Max finite-difference residual of w_zbar - mu w_z over interior window
// rows (independent centered differences in x and y), relative to |w_z|.
double beltrami_residual(const IsothermalChart& chart, const MuFunction& mu);

// Jacobian determinant of (u, v) at every window grid point (orientation
// check); returns the minimum.
double min_chart_jacobian(const IsothermalChart& chart);

// Conformality residual of T composed with the inverse chart: dS = dT dw^-1
// with dT supplied analytically (n x 2 per point) and dw taken from the
// chart.  Returns the max defect density over the window, skipping `skip`
// rows/columns at the window edges.
double composed_conformality_residual(
    const IsothermalChart& chart,
    const std::function<Eigen::MatrixXd(double, double)>& dT, int skip = 2);

// JSON export {u: [[..]], v: [[..]], residual: r} of the valid window.
std::string chart_to_json(const IsothermalChart& chart, double residual,
                          int indent = 2);

}  // namespace triplateau
