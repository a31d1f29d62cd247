#pragma once

#include <Eigen/Core>
#include <Eigen/Sparse>
#include <array>
#include <vector>

namespace triplateau {

using Vec2 = Eigen::Vector2d;
// Vertex positions: one row per vertex, one column per ambient coordinate.
using Positions = Eigen::MatrixXd;

// Plain triangle mesh in the 2-D parameter plane.
struct TriMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
};

// One sheet of the glued complex: a combinatorial disk whose boundary is
// split into a fixed arc (pinned to the boundary graph) and a free arc
// (identified with the other sheets' free arcs).
//
// Both chains are ordered and share exactly their two endpoint vertices;
// for the canonical half-disk the free chain runs along the diameter from
// (-1,0) to (1,0) and the fixed chain along the upper semicircle in the
// same endpoint order.
struct SheetMesh {
  TriMesh mesh;
  std::vector<int> fixed_boundary;
  std::vector<int> free_boundary;

  int vertex_count() const { return mesh.vertex_count(); }
  int triangle_count() const { return mesh.triangle_count(); }
};

// Signed parameter area of triangle t.
double signed_area(const TriMesh& mesh, int t);

// Total (signed) parameter area.
double parameter_area(const TriMesh& mesh);

// Constant gradient of the linear interpolant of `values` on triangle t,
// returned as a 2 x n matrix (rows: d/dx, d/dy).
Eigen::MatrixXd triangle_gradient(const TriMesh& mesh, int t,
                                  const Positions& values);

// 3x3 element stiffness of triangle t for the energy convention
// E(u) = \int |grad u|^2 (no 1/2).  Throws DegenerateTriangleError on
// non-positive area.
Eigen::Matrix3d element_stiffness(const TriMesh& mesh, int t);

// Assembled stiffness for the same convention: E(u) = u^T K u per column.
Eigen::SparseMatrix<double> stiffness_matrix(const TriMesh& mesh);

// Cotangent stiffness computed from embedded vertex positions (intrinsic
// edge lengths), used for image-side quantities such as discrete mean
// curvature.  Degenerate image triangles contribute nothing.
Eigen::SparseMatrix<double> stiffness_from_positions(const TriMesh& mesh,
                                                     const Positions& pos);

// Indices of vertices on the topological boundary (incident to an edge with
// a single adjacent triangle).
std::vector<bool> boundary_vertex_mask(const TriMesh& mesh);

// V - E + F; equals 1 for a combinatorial disk.
int euler_characteristic(const TriMesh& mesh);

// Triangulate the closed upper half unit disk.  The free chain is the
// diameter ordered from (-1,0) to (1,0); the fixed chain the upper
// semicircle in the same endpoint order; vertex (0,0) always exists.
SheetMesh build_half_disk_mesh(int radial_resolution, int angular_resolution);

// Checks all SheetMesh invariants (orientation, chain partition, disk
// topology); throws StructuralError with a description on violation.
void validate_sheet_mesh(const SheetMesh& sheet);

}  // namespace triplateau
