#include "triplateau/diagnostics.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "triplateau/errors.hpp"

namespace triplateau {

ConformalityResidual conformality_residual(const SheetMesh& sheet,
                                           const Positions& positions) {
  constexpr double kEps = 1e-30;
  ConformalityResidual result;
  double weighted = 0.0, total_area = 0.0;
  for (int t = 0; t < sheet.triangle_count(); ++t) {
    const Eigen::MatrixXd g = triangle_gradient(sheet.mesh, t, positions);
    const double gxx = g.row(0).squaredNorm();
    const double gyy = g.row(1).squaredNorm();
    const double gxy = g.row(0).dot(g.row(1));
    const double d1 = gxx - gyy;
    const double d2 = 2.0 * gxy;
    const double density = std::sqrt(d1 * d1 + d2 * d2) / (gxx + gyy + kEps);
    const double a = signed_area(sheet.mesh, t);
    result.max = std::max(result.max, density);
    weighted += a * density * density;
    total_area += a;
  }
  result.l2 = total_area > 0.0 ? std::sqrt(weighted / total_area) : 0.0;
  return result;
}

namespace {

// Area-weighted average of incident triangle differentials, one n x 2
// matrix (columns: d/dx, d/dy) per vertex.
std::vector<Eigen::MatrixXd> averaged_differentials(const SheetMesh& sheet,
                                                    const Positions& pos) {
  const int n = static_cast<int>(pos.cols());
  std::vector<Eigen::MatrixXd> diff(sheet.vertex_count(),
                                    Eigen::MatrixXd::Zero(n, 2));
  std::vector<double> weight(sheet.vertex_count(), 0.0);
  for (int t = 0; t < sheet.triangle_count(); ++t) {
    const Eigen::MatrixXd g = triangle_gradient(sheet.mesh, t, pos);
    const double a = signed_area(sheet.mesh, t);
    for (int corner : sheet.mesh.triangles[t]) {
      diff[corner] += a * g.transpose();
      weight[corner] += a;
    }
  }
  for (int v = 0; v < sheet.vertex_count(); ++v)
    if (weight[v] > 0.0) diff[v] /= weight[v];
  return diff;
}

// Free-chain position of sheet i nearest to junction node j under the map's
// ties (the exact preimage for identity gluing).
int free_position_for_node(const PiecewiseMap& map, int sheet, int node) {
  const auto& ties = map.ties()[sheet];
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < ties.size(); ++a) {
    const double pos = ties[a].node0 + ties[a].w1 * (ties[a].node1 - ties[a].node0);
    const double d = std::abs(pos - node);
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<int>(a);
    }
  }
  return best;
}

}  // namespace

std::vector<JunctionFrame> junction_frames(const GluedDomain& domain,
                                           const PiecewiseMap& map) {
  const auto& junction = map.junction_positions();
  const int count = domain.junction_count;
  std::array<std::vector<Eigen::MatrixXd>, 3> diffs;
  for (int i = 0; i < 3; ++i)
    diffs[i] = averaged_differentials(domain.sheets[i], map.sheet_values(i));

  std::vector<JunctionFrame> frames;
  for (int j = 1; j + 1 < count; ++j) {
    JunctionFrame frame;
    frame.node = j;
    Eigen::VectorXd tangent = junction.row(j + 1) - junction.row(j - 1);
    const double tnorm = tangent.norm();
    if (!(tnorm > 1e-14)) {
      frames.push_back(std::move(frame));
      continue;
    }
    tangent /= tnorm;
    frame.tangent = tangent;
    bool ok = true;
    for (int i = 0; i < 3; ++i) {
      const int a = free_position_for_node(map, i, j);
      const int v = domain.sheets[i].free_boundary[a];
      const Eigen::VectorXd inward = diffs[i][v].col(1);  // d/dy points inward
      Eigen::VectorXd conormal = inward - inward.dot(tangent) * tangent;
      const double norm = conormal.norm();
      if (!(norm > 1e-12 * (1.0 + diffs[i][v].norm()))) {
        ok = false;  // branch point on the free boundary
        break;
      }
      frame.conormals[i] = conormal / norm;
    }
    frame.valid = ok;
    frames.push_back(std::move(frame));
  }
  return frames;
}

std::vector<double> balancing_residual(const GluedDomain& domain,
                                       const PiecewiseMap& map) {
  std::vector<double> residuals;
  for (const auto& frame : junction_frames(domain, map)) {
    if (!frame.valid) {
      residuals.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    residuals.push_back(
        (frame.conormals[0] + frame.conormals[1] + frame.conormals[2]).norm());
  }
  return residuals;
}

std::vector<std::array<double, 3>> dihedral_angles(const GluedDomain& domain,
                                                   const PiecewiseMap& map) {
  std::vector<std::array<double, 3>> all_angles;
  const int n = map.dimension();
  for (const auto& frame : junction_frames(domain, map)) {
    std::array<double, 3> angles{std::numeric_limits<double>::quiet_NaN(),
                                 std::numeric_limits<double>::quiet_NaN(),
                                 std::numeric_limits<double>::quiet_NaN()};
    if (!frame.valid) {
      all_angles.push_back(angles);
      continue;
    }
    if (n == 3) {
      // Consecutive gaps of the conormal fan around the tangent.
      Eigen::Vector3d t = frame.tangent;
      Eigen::Vector3d e1 = frame.conormals[0];
      Eigen::Vector3d e2 = t.cross(e1);
      std::array<double, 3> azimuth;
      for (int i = 0; i < 3; ++i) {
        const Eigen::Vector3d c = frame.conormals[i];
        azimuth[i] = std::atan2(c.dot(e2), c.dot(e1));
        if (azimuth[i] < 0.0) azimuth[i] += 2.0 * M_PI;
      }
      std::sort(azimuth.begin(), azimuth.end());
      angles[0] = azimuth[1] - azimuth[0];
      angles[1] = azimuth[2] - azimuth[1];
      angles[2] = 2.0 * M_PI - azimuth[2] + azimuth[0];
    } else {
      int idx = 0;
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
          angles[idx++] = std::acos(std::clamp(
              frame.conormals[i].dot(frame.conormals[j]), -1.0, 1.0));
    }
    std::sort(angles.begin(), angles.end());
    all_angles.push_back(angles);
  }
  return all_angles;
}

BranchReport detect_branch_points(const GluedDomain& domain,
                                  const PiecewiseMap& map, double threshold) {
  if (!(threshold > 0)) throw std::invalid_argument("threshold must be > 0");
  BranchReport report;
  for (int i = 0; i < 3; ++i) {
    const auto& sheet = domain.sheets[i];
    const auto& pos = map.sheet_values(i);
    std::vector<double> param_edges, image_edges;
    for (const auto& tri : sheet.mesh.triangles) {
      for (int a = 0; a < 3; ++a) {
        const int p = tri[a], q = tri[(a + 1) % 3];
        if (p < q) {
          param_edges.push_back(
              (sheet.mesh.vertices[p] - sheet.mesh.vertices[q]).norm());
          image_edges.push_back((pos.row(p) - pos.row(q)).norm());
        }
      }
    }
    auto median = [](std::vector<double>& v) {
      std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
      return v[v.size() / 2];
    };
    const double scale = median(image_edges) / median(param_edges);
    const auto diffs = averaged_differentials(sheet, pos);
    for (int v = 0; v < sheet.vertex_count(); ++v) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(diffs[v]);
      const double s1 = svd.singularValues()(0);
      const double s2 = svd.singularValues()(1);
      if (s1 < threshold * scale || scale == 0.0)
        report.rank_zero.push_back({i, v});
      else if (s2 < threshold * scale)
        report.rank_one_warnings.push_back({i, v});
    }
  }
  return report;
}

DiagnosticsReport build_report(const GluedDomain& domain,
                               const PiecewiseMap& map,
                               double branch_threshold) {
  DiagnosticsReport report;
  report.branch_threshold = branch_threshold;
  for (int i = 0; i < 3; ++i) {
    report.energies[i] = dirichlet_energy(domain.sheets[i], map.sheet_values(i));
    report.areas[i] = area(domain.sheets[i], map.sheet_values(i));
    report.energy_area_gap[i] = 0.5 * report.energies[i] - report.areas[i];
    const auto conf = conformality_residual(domain.sheets[i], map.sheet_values(i));
    report.conformality_max[i] = conf.max;
    report.conformality_l2[i] = conf.l2;
  }
  report.balancing = balancing_residual(domain, map);
  report.angles = dihedral_angles(domain, map);
  const auto branches = detect_branch_points(domain, map, branch_threshold);
  report.branch_points = branches.rank_zero;
  report.branch_warnings = branches.rank_one_warnings;
  report.matching_residual = 0.0;  // junction storage is shared
  return report;
}

std::string report_to_json(const DiagnosticsReport& report, int indent) {
  nlohmann::json doc;
  doc["energies"] = report.energies;
  doc["areas"] = report.areas;
  doc["gap"] = report.energy_area_gap;
  doc["conformality"] = {{"max", report.conformality_max},
                         {"l2", report.conformality_l2}};
  doc["balancing"] = report.balancing;
  doc["angles"] = report.angles;
  auto points = nlohmann::json::array();
  for (const auto& p : report.branch_points)
    points.push_back({p.sheet, p.vertex});
  doc["branch_points"] = points;
  auto warnings = nlohmann::json::array();
  for (const auto& p : report.branch_warnings)
    warnings.push_back({p.sheet, p.vertex});
  doc["branch_warnings"] = warnings;
  doc["matching_residual"] = report.matching_residual;
  doc["branch_threshold"] = report.branch_threshold;
  return doc.dump(indent);
}

}  // namespace triplateau
