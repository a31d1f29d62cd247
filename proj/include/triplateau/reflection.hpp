#pragma once

#include <string>
#include <vector>

#include "triplateau/mesh.hpp"

namespace triplateau {

// Three maps on a common half-disk mesh sharing their values along the
// diameter I (matching holds exactly); the building block of the
// multi-sheeted reflection.
struct HalfDiskTriple {
  const SheetMesh* mesh = nullptr;
  std::array<Positions, 3> values;
};

// Throws std::invalid_argument unless the free chain lies on the x-axis and
// the three value matrices agree along it.
void validate_triple(const HalfDiskTriple& triple);

// The half-disk mesh doubled across the x-axis.  Mirrored vertices reuse the
// upper mesh's coordinates with y negated, so reflection is an index
// permutation and the extension formula needs no interpolation.
struct DoubledMesh {
  TriMesh mesh;
  std::vector<int> source_vertex;  // doubled index -> upper-mesh vertex
  std::vector<bool> mirrored;      // true on the lower copy
  std::vector<int> axis_vertices;  // doubled indices on I, in chain order
};

DoubledMesh double_across_axis(const SheetMesh& sheet);

struct ReflectedMap {
  DoubledMesh domain;
  Positions values;
};

// Extension of sheet s across I:
//   U(x,y) = f_s(x,y)                                   for y >= 0,
//   U(x,y) = -f_s(x,-y) + (2/3) sum_i f_i(x,-y)          for y < 0.
// Restricted to y >= 0 it equals f_s exactly; it is discrete-harmonic across
// I iff the triple satisfies the discrete balancing condition.
ReflectedMap multi_sheeted_reflect(const HalfDiskTriple& triple, int sheet);

// Max over interior vertices of |cotangent Laplacian of the values|,
// normalized per vertex by the mean incident edge length.
double harmonic_residual(const TriMesh& mesh, const Positions& values);
inline double harmonic_residual(const ReflectedMap& map) {
  return harmonic_residual(map.domain.mesh, map.values);
}

// One-sided y-derivative mismatch of the extension across I (max over
// interior axis vertices); O(h) for a balanced discrete-harmonic triple.
double axis_derivative_jump(const ReflectedMap& map);

// A real analytic curve in R^3 sampled at parameter values, with a unit
// normal field orthogonal to the curve tangent.
struct AnalyticCurveData {
  std::vector<double> t;
  Eigen::MatrixXd gamma;   // samples x 3
  Eigen::MatrixXd normal;  // samples x 3

  static AnalyticCurveData from_json_file(const std::string& path);
  static AnalyticCurveData from_json_text(const std::string& text);
};

// Validates sizes, |N| = 1, and N . gamma' = 0 against central-difference
// tangents at interior samples.
void validate_curve_data(const AnalyticCurveData& data,
                         double orthogonality_tol = 1e-8);

// Rotations of the given normal field by +-2pi/3 about the unit tangent, so
// that the three fields sum to zero exactly (three unit vectors at mutual
// 120 degrees).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> balanced_normal_triple(
    const AnalyticCurveData& data);

enum class HalfPlane { Plus, Minus };

struct BjorlingOptions {
  int degree = 12;          // polynomial fit degree (Chebyshev basis)
  int normal_samples = 17;  // grid samples across the strip
  double width = 0.0;       // strip half-width; 0 = half the window
  double fit_threshold = 1e-6;
};

struct BjorlingPatch {
  std::vector<double> t;  // along the curve
  std::vector<double> s;  // into the chosen half plane
  // Row-major grid of size t.size() x s.size(), 3 columns.
  Eigen::MatrixXd positions;
  double fit_residual = 0.0;

  Eigen::Vector3d at(int it, int is) const {
    return positions.row(it * static_cast<int>(s.size()) + is);
  }
};

// Schwarz's solution of the Bjorling problem,
//   f(z) = Re gamma(z) + Im \int_{t0}^{z} N(w) x gamma'(w) dw,
// evaluated by complexifying Chebyshev fits of the sampled curve and normal
// and integrating the polynomial integrand exactly.  Throws AccuracyError
// when the fit residual exceeds the configured threshold.
BjorlingPatch bjorling_extend(const AnalyticCurveData& data, HalfPlane half,
                              const BjorlingOptions& options = {});

// Triangulated view of the patch grid for mesh export and discrete checks.
std::pair<TriMesh, Positions> patch_mesh(const BjorlingPatch& patch);

// Max over interior grid vertices of the discrete mean-curvature magnitude
// (image cotangent Laplacian over lumped area), scaled by the median image
// edge length; small for minimal patches and O(h^2) under refinement.
double patch_mean_curvature_residual(const BjorlingPatch& patch);

}  // namespace triplateau
