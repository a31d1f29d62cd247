#pragma once

#include <string>
#include <vector>

#include "triplateau/domain.hpp"
#include "triplateau/energy.hpp"

namespace triplateau {

// Per-triangle weak-conformality defect, aggregated as (max, area-weighted
// L2) of the density sqrt(d1^2 + d2^2) / (|a_x|^2 + |a_y|^2 + eps) with
// d1 = |a_x|^2 - |a_y|^2 and d2 = 2 a_x . a_y.
struct ConformalityResidual {
  double max = 0.0;
  double l2 = 0.0;
};

ConformalityResidual conformality_residual(const SheetMesh& sheet,
                                           const Positions& positions);

// Frame of the free boundary at one junction node: curve tangent and the
// three in-surface unit conormals (each orthogonal to the tangent).
struct JunctionFrame {
  int node = -1;
  Eigen::VectorXd tangent;
  std::array<Eigen::VectorXd, 3> conormals;
  bool valid = false;  // false at rank-deficient (branch) nodes
};

// Frames at interior junction nodes (endpoints carry one-sided stencils and
// are excluded).  The conormal of sheet i is the component of the averaged
// inward derivative d(alpha_i)/dy orthogonal to the tangent, normalized.
std::vector<JunctionFrame> junction_frames(const GluedDomain& domain,
                                           const PiecewiseMap& map);

// |eta_1 + eta_2 + eta_3| per interior junction node (NaN where invalid).
std::vector<double> balancing_residual(const GluedDomain& domain,
                                       const PiecewiseMap& map);

// Angles between the conormals at each interior junction node: consecutive
// gaps around the tangent for maps into R^3 (they sum to 2 pi), pairwise
// arccos angles otherwise.  Sorted ascending.
std::vector<std::array<double, 3>> dihedral_angles(const GluedDomain& domain,
                                                   const PiecewiseMap& map);

struct BranchPoint {
  int sheet = 0;
  int vertex = 0;
};

// Vertices whose averaged differential is rank zero relative to
// threshold * (median image edge length / median parameter edge length).
// Rank-one vertices are reported separately as warnings.
struct BranchReport {
  std::vector<BranchPoint> rank_zero;
  std::vector<BranchPoint> rank_one_warnings;
};

BranchReport detect_branch_points(const GluedDomain& domain,
                                  const PiecewiseMap& map, double threshold);

struct DiagnosticsReport {
  std::array<double, 3> energies{};
  std::array<double, 3> areas{};
  std::array<double, 3> energy_area_gap{};  // E/2 - A per sheet
  std::array<double, 3> conformality_max{};
  std::array<double, 3> conformality_l2{};
  std::vector<double> balancing;                  // per interior node
  std::vector<std::array<double, 3>> angles;      // per interior node
  std::vector<BranchPoint> branch_points;
  std::vector<BranchPoint> branch_warnings;
  double matching_residual = 0.0;  // exact by construction; recorded
  double branch_threshold = 1e-6;
};

DiagnosticsReport build_report(const GluedDomain& domain,
                               const PiecewiseMap& map,
                               double branch_threshold = 1e-6);

// Fixed-key JSON serialization (energies, areas, gap, conformality,
// balancing, angles, branch_points).
std::string report_to_json(const DiagnosticsReport& report, int indent = 2);

}  // namespace triplateau
