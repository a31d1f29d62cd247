#include <doctest.h>

#include <cmath>

#include "triplateau/energy.hpp"
#include "triplateau/errors.hpp"
#include "triplateau/mesh.hpp"

using namespace triplateau;

TEST_CASE("half disk mesh is a positively oriented combinatorial disk") {
  for (auto [nr, na] : {std::pair{1, 2}, {2, 4}, {3, 7}, {4, 8}}) {
    const SheetMesh sheet = build_half_disk_mesh(nr, na);
    CHECK(euler_characteristic(sheet.mesh) == 1);
    for (int t = 0; t < sheet.triangle_count(); ++t)
      CHECK(signed_area(sheet.mesh, t) > 0.0);
    CHECK_NOTHROW(validate_sheet_mesh(sheet));
  }
}

TEST_CASE("half disk chains and landmark vertices") {
  const SheetMesh sheet = build_half_disk_mesh(3, 6);
  // free chain runs (-1,0) -> (1,0) through the center
  const Vec2 first = sheet.mesh.vertices[sheet.free_boundary.front()];
  const Vec2 last = sheet.mesh.vertices[sheet.free_boundary.back()];
  CHECK(first.x() == doctest::Approx(-1.0));
  CHECK(last.x() == doctest::Approx(1.0));
  bool has_center = false;
  for (int v : sheet.free_boundary)
    if (sheet.mesh.vertices[v].norm() < 1e-14) has_center = true;
  CHECK(has_center);
  for (int v : sheet.free_boundary)
    CHECK(std::abs(sheet.mesh.vertices[v].y()) < 1e-15);
  // fixed chain on the unit circle, same endpoints
  for (int v : sheet.fixed_boundary)
    CHECK(sheet.mesh.vertices[v].norm() == doctest::Approx(1.0));
  CHECK(sheet.fixed_boundary.front() == sheet.free_boundary.front());
  CHECK(sheet.fixed_boundary.back() == sheet.free_boundary.back());
}

TEST_CASE("half disk parameter area approaches pi/2") {
  // inscribed polygon area: (na/2) sin(pi/na)
  const SheetMesh sheet = build_half_disk_mesh(4, 8);
  const double area = parameter_area(sheet.mesh);
  CHECK(area == doctest::Approx(4.0 * std::sin(M_PI / 8.0)).epsilon(1e-12));
  CHECK(std::abs(area - M_PI / 2.0) / (M_PI / 2.0) < 0.05);
}

TEST_CASE("invalid resolutions are rejected") {
  CHECK_THROWS_AS(build_half_disk_mesh(0, 8), std::invalid_argument);
  CHECK_THROWS_AS(build_half_disk_mesh(4, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_half_disk_mesh(4, 1), std::invalid_argument);
}

TEST_CASE("validate_sheet_mesh catches broken invariants") {
  SheetMesh sheet = build_half_disk_mesh(2, 4);
  SUBCASE("flipped triangle") {
    std::swap(sheet.mesh.triangles[0][0], sheet.mesh.triangles[0][1]);
    CHECK_THROWS_AS(validate_sheet_mesh(sheet), StructuralError);
  }
  SUBCASE("chain leaves the boundary") {
    sheet.free_boundary[1] = sheet.mesh.vertex_count() - 2;
    CHECK_THROWS_AS(validate_sheet_mesh(sheet), StructuralError);
  }
  SUBCASE("chains missing an endpoint") {
    sheet.fixed_boundary.pop_back();
    CHECK_THROWS_AS(validate_sheet_mesh(sheet), StructuralError);
  }
}

TEST_CASE("element stiffness reproduces the affine Dirichlet energy") {
  const SheetMesh sheet = build_half_disk_mesh(3, 6);
  // direct per-triangle gradient sum for alpha(x,y) = (2x, y)
  Positions pos(sheet.vertex_count(), 2);
  for (int v = 0; v < sheet.vertex_count(); ++v) {
    pos(v, 0) = 2.0 * sheet.mesh.vertices[v].x();
    pos(v, 1) = sheet.mesh.vertices[v].y();
  }
  double direct = 0.0;
  for (int t = 0; t < sheet.triangle_count(); ++t)
    direct += signed_area(sheet.mesh, t) *
              triangle_gradient(sheet.mesh, t, pos).squaredNorm();
  const Eigen::SparseMatrix<double> k = stiffness_matrix(sheet.mesh);
  const double quadratic = (pos.transpose() * (k * pos)).trace();
  CHECK(quadratic == doctest::Approx(direct).epsilon(1e-13));
  CHECK(quadratic ==
        doctest::Approx(5.0 * parameter_area(sheet.mesh)).epsilon(1e-13));
}

TEST_CASE("degenerate triangles abort") {
  SheetMesh sheet = build_half_disk_mesh(2, 4);
  // collapse one interior vertex onto a neighbor
  const int v = sheet.mesh.triangles[0][1];
  sheet.mesh.vertices[v] = sheet.mesh.vertices[sheet.mesh.triangles[0][0]];
  Positions pos = Positions::Zero(sheet.vertex_count(), 2);
  CHECK_THROWS_AS(stiffness_matrix(sheet.mesh), DegenerateTriangleError);
  CHECK_THROWS_AS(dirichlet_energy(sheet, pos), DegenerateTriangleError);
}
