#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <random>

#include "triplateau/boundary_graph.hpp"
#include "triplateau/domain.hpp"
#include "triplateau/solver.hpp"

namespace triplateau::testing {

// Three unit directions in the yz-plane at mutual 120 degrees; the sheets of
// the flat-Y configuration live in the half-planes they span with the x-axis.
inline std::array<Eigen::Vector3d, 3> frame_directions() {
  const double s = std::sqrt(3.0) / 2.0;
  return {Eigen::Vector3d(0, 1, 0), Eigen::Vector3d(0, -0.5, s),
          Eigen::Vector3d(0, -0.5, -s)};
}

// Three congruent unit semicircles in half-planes at mutual 120 degrees
// around the x-axis, sharing endpoints (-1,0,0) and (1,0,0).  The exact
// minimizer is three flat half-disks meeting along the segment.
inline BoundaryGraph flat_y_graph(int samples = 512) {
  const auto d = frame_directions();
  std::array<Eigen::MatrixXd, 3> arcs;
  for (int i = 0; i < 3; ++i) {
    Eigen::MatrixXd arc(samples + 1, 3);
    for (int s = 0; s <= samples; ++s) {
      const double theta = M_PI * static_cast<double>(s) / samples;
      arc.row(s) = (-std::cos(theta)) * Eigen::Vector3d::UnitX() +
                   std::sin(theta) * d[i];
    }
    arcs[i] = arc;
  }
  return BoundaryGraph(std::move(arcs));
}

// Y configuration with non-congruent smooth bump profiles: breaks the
// three-fold symmetry so discrete balancing and conformality defects are
// resolution-dependent instead of identically zero.
inline BoundaryGraph bent_y_graph(int samples = 1024,
                                  std::array<double, 3> amplitude = {0.8, 0.93,
                                                                     0.71},
                                  std::array<double, 3> skew = {0.0, 0.18,
                                                                -0.12}) {
  const auto d = frame_directions();
  std::array<Eigen::MatrixXd, 3> arcs;
  for (int i = 0; i < 3; ++i) {
    Eigen::MatrixXd arc(samples + 1, 3);
    for (int k = 0; k <= samples; ++k) {
      const double s = -1.0 + 2.0 * static_cast<double>(k) / samples;
      const double w = (1.0 - s * s) * (amplitude[i] + skew[i] * s);
      arc.row(k) = s * Eigen::Vector3d::UnitX() + w * d[i];
    }
    arcs[i] = arc;
  }
  return BoundaryGraph(std::move(arcs));
}

inline GluedDomain make_domain(int radial, int angular) {
  const SheetMesh sheet = build_half_disk_mesh(radial, angular);
  return build_glued_domain({sheet, sheet, sheet},
                            CorrespondencePolicy::Identity);
}

// Map built from per-sheet functions; junction values come from sheet 0, so
// the functions must already match along y = 0.
inline PiecewiseMap map_from_functions(
    const GluedDomain& domain,
    const std::array<std::function<Eigen::VectorXd(double, double)>, 3>& fns) {
  std::array<Eigen::MatrixXd, 3> values;
  for (int i = 0; i < 3; ++i) {
    const auto& mesh = domain.sheets[i].mesh;
    const int n = static_cast<int>(fns[i](0.0, 0.0).size());
    values[i].resize(mesh.vertex_count(), n);
    for (int v = 0; v < mesh.vertex_count(); ++v)
      values[i].row(v) = fns[i](mesh.vertices[v].x(), mesh.vertices[v].y());
  }
  return PiecewiseMap(domain, std::move(values));
}

// The exact flat-Y embedding: alpha_i(x, y) = x e_x + y d_i.
inline PiecewiseMap flat_embedding(const GluedDomain& domain) {
  const auto d = frame_directions();
  std::array<std::function<Eigen::VectorXd(double, double)>, 3> fns;
  for (int i = 0; i < 3; ++i) {
    fns[i] = [di = d[i]](double x, double y) {
      return Eigen::VectorXd(x * Eigen::Vector3d::UnitX() + y * di);
    };
  }
  return map_from_functions(domain, fns);
}

// Random feasible map for a given boundary condition: fixed rows from the
// targets, junction and interior rows random.
inline PiecewiseMap random_feasible_map(const GluedDomain& domain,
                                        const BoundaryGraph& graph,
                                        const GluingData& gluing,
                                        std::mt19937& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const int n = graph.dimension();
  std::array<Eigen::MatrixXd, 3> values;
  for (int i = 0; i < 3; ++i) {
    const auto& sheet = domain.sheets[i];
    values[i].resize(sheet.vertex_count(), n);
    for (int v = 0; v < sheet.vertex_count(); ++v)
      for (int c = 0; c < n; ++c) values[i](v, c) = unit(rng);
    const Eigen::MatrixXd targets = sample_boundary_targets(graph, gluing, i);
    for (std::size_t a = 0; a < sheet.fixed_boundary.size(); ++a)
      values[i].row(sheet.fixed_boundary[a]) = targets.row(a);
  }
  Eigen::MatrixXd junction(domain.junction_count, n);
  for (int j = 0; j < domain.junction_count; ++j)
    for (int c = 0; c < n; ++c) junction(j, c) = unit(rng);
  junction.row(0) = graph.q_minus();
  junction.row(domain.junction_count - 1) = graph.q_plus();
  return PiecewiseMap(domain, std::move(values), std::move(junction));
}

}  // namespace triplateau::testing
