#include "triplateau/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "triplateau/errors.hpp"

namespace triplateau {

double signed_area(const TriMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const Vec2 e1 = mesh.vertices[tri[1]] - mesh.vertices[tri[0]];
  const Vec2 e2 = mesh.vertices[tri[2]] - mesh.vertices[tri[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

double parameter_area(const TriMesh& mesh) {
  double total = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) total += signed_area(mesh, t);
  return total;
}

namespace {

constexpr double kDegenerateAreaTol = 1e-14;

void require_positive_area(double area, int t) {
  if (!(area > kDegenerateAreaTol)) {
    throw DegenerateTriangleError(
        "triangle " + std::to_string(t) + " has non-positive parameter area",
        area);
  }
}

}  // namespace

Eigen::MatrixXd triangle_gradient(const TriMesh& mesh, int t,
                                  const Positions& values) {
  const auto& tri = mesh.triangles[t];
  const double area = signed_area(mesh, t);
  require_positive_area(area, t);
  const Vec2& p0 = mesh.vertices[tri[0]];
  const Vec2& p1 = mesh.vertices[tri[1]];
  const Vec2& p2 = mesh.vertices[tri[2]];
  // grad of hat function at vertex a is rot90(opposite edge)/(2A).
  Eigen::Matrix<double, 2, 3> g;
  g.col(0) = Vec2(p1.y() - p2.y(), p2.x() - p1.x());
  g.col(1) = Vec2(p2.y() - p0.y(), p0.x() - p2.x());
  g.col(2) = Vec2(p0.y() - p1.y(), p1.x() - p0.x());
  g /= 2.0 * area;
  Eigen::MatrixXd result = Eigen::MatrixXd::Zero(2, values.cols());
  for (int a = 0; a < 3; ++a) result += g.col(a) * values.row(tri[a]);
  return result;
}

Eigen::Matrix3d element_stiffness(const TriMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const double area = signed_area(mesh, t);
  require_positive_area(area, t);
  const Vec2& p0 = mesh.vertices[tri[0]];
  const Vec2& p1 = mesh.vertices[tri[1]];
  const Vec2& p2 = mesh.vertices[tri[2]];
  // Edge opposite vertex a (rotation cancels in the dot product).
  const Vec2 e0 = p2 - p1;
  const Vec2 e1 = p0 - p2;
  const Vec2 e2 = p1 - p0;
  Eigen::Matrix3d k;
  const Vec2 e[3] = {e0, e1, e2};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) k(a, b) = e[a].dot(e[b]) / (4.0 * area);
  return k;
}

Eigen::SparseMatrix<double> stiffness_matrix(const TriMesh& mesh) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(9 * mesh.triangles.size());
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const Eigen::Matrix3d k = element_stiffness(mesh, t);
    const auto& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) trips.emplace_back(tri[a], tri[b], k(a, b));
  }
  Eigen::SparseMatrix<double> m(mesh.vertex_count(), mesh.vertex_count());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

Eigen::SparseMatrix<double> stiffness_from_positions(const TriMesh& mesh,
                                                     const Positions& pos) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(9 * mesh.triangles.size());
  for (const auto& tri : mesh.triangles) {
    Eigen::Vector3d l2;  // squared edge lengths opposite each vertex
    for (int a = 0; a < 3; ++a) {
      const auto u = pos.row(tri[(a + 1) % 3]) - pos.row(tri[(a + 2) % 3]);
      l2[a] = u.squaredNorm();
    }
    const double s =
        0.25 * std::sqrt(std::max(0.0, 4.0 * l2[0] * l2[1] -
                                            (l2[0] + l2[1] - l2[2]) *
                                                (l2[0] + l2[1] - l2[2])));
    if (!(s > 1e-30)) continue;  // degenerate image triangle
    for (int a = 0; a < 3; ++a) {
      const int i = tri[(a + 1) % 3], j = tri[(a + 2) % 3];
      const double cot = (l2[(a + 1) % 3] + l2[(a + 2) % 3] - l2[a]) / (4.0 * s);
      const double w = 0.5 * cot;
      trips.emplace_back(i, i, w);
      trips.emplace_back(j, j, w);
      trips.emplace_back(i, j, -w);
      trips.emplace_back(j, i, -w);
    }
  }
  Eigen::SparseMatrix<double> m(mesh.vertex_count(), mesh.vertex_count());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

namespace {

std::set<std::pair<int, int>> boundary_edges(const TriMesh& mesh) {
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& tri : mesh.triangles) {
    for (int a = 0; a < 3; ++a) {
      int i = tri[a], j = tri[(a + 1) % 3];
      if (i > j) std::swap(i, j);
      ++edge_count[{i, j}];
    }
  }
  std::set<std::pair<int, int>> result;
  for (const auto& [edge, count] : edge_count)
    if (count == 1) result.insert(edge);
  return result;
}

}  // namespace

std::vector<bool> boundary_vertex_mask(const TriMesh& mesh) {
  std::vector<bool> on_boundary(mesh.vertex_count(), false);
  for (const auto& edge : boundary_edges(mesh)) {
    on_boundary[edge.first] = true;
    on_boundary[edge.second] = true;
  }
  return on_boundary;
}

int euler_characteristic(const TriMesh& mesh) {
  std::set<std::pair<int, int>> edges;
  for (const auto& tri : mesh.triangles) {
    for (int a = 0; a < 3; ++a) {
      int i = tri[a], j = tri[(a + 1) % 3];
      if (i > j) std::swap(i, j);
      edges.insert({i, j});
    }
  }
  return mesh.vertex_count() - static_cast<int>(edges.size()) +
         mesh.triangle_count();
}

SheetMesh build_half_disk_mesh(int radial_resolution, int angular_resolution) {
  if (radial_resolution < 1 || angular_resolution < 1)
    throw std::invalid_argument("mesh resolutions must be >= 1");
  if (angular_resolution < 2)
    throw std::invalid_argument(
        "angular resolution 1 cannot triangulate a half disk (all semicircle "
        "samples would lie on the diameter)");
  const int nr = radial_resolution;
  const int na = angular_resolution;

  SheetMesh sheet;
  auto& mesh = sheet.mesh;
  // Vertex 0 is the center; ring j (1..nr) holds na+1 vertices at radius j/nr
  // and angles k*pi/na for k = 0..na.
  mesh.vertices.emplace_back(0.0, 0.0);
  auto ring_vertex = [&](int j, int k) { return 1 + (j - 1) * (na + 1) + k; };
  for (int j = 1; j <= nr; ++j) {
    const double r = static_cast<double>(j) / nr;
    for (int k = 0; k <= na; ++k) {
      const double th = M_PI * static_cast<double>(k) / na;
      mesh.vertices.emplace_back(r * std::cos(th), r * std::sin(th));
    }
  }

  // Fan around the center, then quads between rings split along a diagonal.
  for (int k = 0; k < na; ++k)
    mesh.triangles.push_back({0, ring_vertex(1, k), ring_vertex(1, k + 1)});
  for (int j = 1; j < nr; ++j) {
    for (int k = 0; k < na; ++k) {
      const int a = ring_vertex(j, k), b = ring_vertex(j, k + 1);
      const int c = ring_vertex(j + 1, k), d = ring_vertex(j + 1, k + 1);
      mesh.triangles.push_back({a, c, d});
      mesh.triangles.push_back({a, d, b});
    }
  }

  // Free chain along the diameter from (-1,0) to (1,0), through the center.
  for (int j = nr; j >= 1; --j) sheet.free_boundary.push_back(ring_vertex(j, na));
  sheet.free_boundary.push_back(0);
  for (int j = 1; j <= nr; ++j) sheet.free_boundary.push_back(ring_vertex(j, 0));

  // Fixed chain over the semicircle, same endpoint order (-1,0) -> (1,0).
  for (int k = na; k >= 0; --k) sheet.fixed_boundary.push_back(ring_vertex(nr, k));

  validate_sheet_mesh(sheet);
  return sheet;
}

void validate_sheet_mesh(const SheetMesh& sheet) {
  const auto& mesh = sheet.mesh;
  if (mesh.vertex_count() < 3 || mesh.triangle_count() < 1)
    throw StructuralError("sheet mesh is empty");
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    if (!(signed_area(mesh, t) > 0.0))
      throw StructuralError("triangle " + std::to_string(t) +
                            " is not positively oriented");
  }
  if (euler_characteristic(mesh) != 1)
    throw StructuralError("mesh is not a combinatorial disk (V-E+F != 1)");

  const auto& fixed = sheet.fixed_boundary;
  const auto& free = sheet.free_boundary;
  if (fixed.size() < 2 || free.size() < 2)
    throw StructuralError("boundary chains must have at least two vertices");
  if (fixed.front() != free.front() || fixed.back() != free.back())
    throw StructuralError("boundary chains must share their endpoints");

  std::set<int> fixed_set(fixed.begin(), fixed.end());
  std::set<int> free_set(free.begin(), free.end());
  if (fixed_set.size() != fixed.size() || free_set.size() != free.size())
    throw StructuralError("boundary chains must be simple");
  std::vector<int> common;
  std::set_intersection(fixed_set.begin(), fixed_set.end(), free_set.begin(),
                        free_set.end(), std::back_inserter(common));
  if (common.size() != 2)
    throw StructuralError("chains must intersect exactly at their endpoints");

  const auto edges = boundary_edges(mesh);
  std::size_t boundary_vertices = 0;
  for (bool b : boundary_vertex_mask(mesh)) boundary_vertices += b ? 1 : 0;
  if (fixed_set.size() + free_set.size() - 2 != boundary_vertices)
    throw StructuralError("chains do not partition the mesh boundary");
  auto check_chain_edges = [&](const std::vector<int>& chain, const char* name) {
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      int a = chain[i], b = chain[i + 1];
      if (a > b) std::swap(a, b);
      if (!edges.count({a, b}))
        throw StructuralError(std::string(name) +
                              " chain is not a path of boundary edges");
    }
  };
  check_chain_edges(fixed, "fixed");
  check_chain_edges(free, "free");
  if (fixed.size() + free.size() - 2 != edges.size())
    throw StructuralError("chains do not cover the full boundary loop");
}

}  // namespace triplateau
