#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "triplateau/errors.hpp"

using namespace triplateau;
using namespace triplateau::testing;

TEST_CASE("identity gluing produces one junction node per chain vertex") {
  const GluedDomain domain = make_domain(3, 6);
  CHECK(domain.junction_count == 7);  // 2*nr + 1
  for (int i = 0; i < 3; ++i) {
    CHECK(domain.free_chain_length(i) == domain.junction_count);
    for (int a = 0; a < domain.junction_count; ++a)
      CHECK(domain.correspondence[i][a] == a);
  }
}

TEST_CASE("mismatched chain lengths are a structural error") {
  const SheetMesh a = build_half_disk_mesh(2, 4);  // chain length 5
  const SheetMesh b = build_half_disk_mesh(3, 4);  // chain length 7... wait
  CHECK(a.free_boundary.size() != b.free_boundary.size());
  CHECK_THROWS_AS(
      build_glued_domain({a, a, b}, CorrespondencePolicy::Identity),
      StructuralError);
}

TEST_CASE("reversed free chain is canonicalized before gluing") {
  SheetMesh sheet = build_half_disk_mesh(2, 4);
  SheetMesh reversed = sheet;
  std::reverse(reversed.free_boundary.begin(), reversed.free_boundary.end());
  std::reverse(reversed.fixed_boundary.begin(), reversed.fixed_boundary.end());
  const GluedDomain domain = build_glued_domain({sheet, reversed, sheet},
                                                CorrespondencePolicy::Identity);
  // endpoint identification is consistent: node 0 sits at x = -1 everywhere
  for (int i = 0; i < 3; ++i) {
    const auto& s = domain.sheets[i];
    CHECK(s.mesh.vertices[s.free_boundary.front()].x() ==
          doctest::Approx(-1.0));
    CHECK(s.mesh.vertices[s.free_boundary.back()].x() == doctest::Approx(1.0));
  }
}

TEST_CASE("non-monotone explicit correspondence is rejected") {
  const SheetMesh sheet = build_half_disk_mesh(2, 4);
  std::array<std::vector<int>, 3> corr;
  for (auto& c : corr) c = {0, 1, 2, 3, 4};
  corr[1] = {0, 2, 1, 3, 4};
  CHECK_THROWS_AS(build_glued_domain({sheet, sheet, sheet}, corr),
                  std::invalid_argument);
}

TEST_CASE("boundary targets follow constant-speed fractions") {
  // straight segment arcs, identical for all sheets
  std::array<Eigen::MatrixXd, 3> arcs;
  for (auto& arc : arcs) {
    arc.resize(2, 3);
    arc << 0, 0, 0, 1, 0, 0;
  }
  const BoundaryGraph graph{std::move(arcs)};
  const GluedDomain domain = make_domain(1, 2);
  const GluingData gluing = GluingData::identity(domain);
  // fixed chain has 3 vertices -> fractions 0, 1/2, 1
  const Eigen::MatrixXd targets = sample_boundary_targets(graph, gluing, 0);
  REQUIRE(targets.rows() == 3);
  CHECK(targets(0, 0) == doctest::Approx(0.0));
  CHECK(targets(1, 0) == doctest::Approx(0.5));
  CHECK(targets(2, 0) == doctest::Approx(1.0));
}

TEST_CASE("first and last targets equal the shared endpoints") {
  const BoundaryGraph graph = bent_y_graph(64);
  const GluedDomain domain = make_domain(2, 6);
  GluingData gluing = GluingData::identity(domain);
  // perturb interior parameters, keeping monotonicity
  gluing.sheets[1].fixed_params[2] += 0.01;
  for (int i = 0; i < 3; ++i) {
    const Eigen::MatrixXd targets = sample_boundary_targets(graph, gluing, i);
    CHECK((targets.row(0).transpose() - graph.q_minus()).norm() < 1e-15);
    CHECK((targets.row(targets.rows() - 1).transpose() - graph.q_plus())
              .norm() < 1e-15);
  }
}

TEST_CASE("squared parameter evaluates the quarter point") {
  std::array<Eigen::MatrixXd, 3> arcs;
  for (auto& arc : arcs) {
    arc.resize(2, 3);
    arc << 0, 0, 0, 1, 0, 0;
  }
  const BoundaryGraph graph{std::move(arcs)};
  const GluedDomain domain = make_domain(1, 2);
  GluingData gluing = GluingData::identity(domain);
  auto& params = gluing.sheets[0].fixed_params;
  for (double& t : params) t = t * t;  // 0, 1/4, 1
  gluing.sheets[0].pinned_mid = -1;    // deliberately off the 3-point pin
  const Eigen::MatrixXd targets = sample_boundary_targets(graph, gluing, 0);
  CHECK(targets(1, 0) == doctest::Approx(0.25));
}

TEST_CASE("gluing validation enforces monotonicity and pins") {
  const GluedDomain domain = make_domain(2, 4);
  GluingData gluing = GluingData::identity(domain);
  CHECK_NOTHROW(validate_gluing(domain, gluing));
  SUBCASE("non-monotone") {
    std::swap(gluing.sheets[0].fixed_params[1],
              gluing.sheets[0].fixed_params[2]);
    CHECK_THROWS_AS(validate_gluing(domain, gluing), std::invalid_argument);
  }
  SUBCASE("moved pin") {
    const int mid = gluing.sheets[0].pinned_mid;
    REQUIRE(mid > 0);
    gluing.sheets[0].fixed_params[mid] = 0.4;
    CHECK_THROWS_AS(validate_gluing(domain, gluing), std::invalid_argument);
  }
}

TEST_CASE("piecewise map junction rows match exactly across sheets") {
  const GluedDomain domain = make_domain(2, 4);
  std::mt19937 rng(7);
  const BoundaryGraph graph = flat_y_graph(64);
  const GluingData gluing = GluingData::identity(domain);
  const PiecewiseMap map = random_feasible_map(domain, graph, gluing, rng);
  for (int a = 0; a < domain.junction_count; ++a) {
    const auto row0 = map.sheet_values(0).row(domain.sheets[0].free_boundary[a]);
    for (int i = 1; i < 3; ++i) {
      const auto row =
          map.sheet_values(i).row(domain.sheets[i].free_boundary[a]);
      CHECK((row - row0).norm() == 0.0);  // shared storage, bit exact
    }
  }
}

TEST_CASE("boundary graph JSON round trip") {
  const std::string text = R"({
    "dimension": 3,
    "arcs": [
      [[0,0,0],[0.5,0.1,0],[1,0,0]],
      [[0,0,0],[0.5,-0.1,0.1],[1,0,0]],
      [[0,0,0],[0.5,0,-0.1],[1,0,0]]
    ]})";
  const BoundaryGraph graph = BoundaryGraph::from_json_text(text);
  CHECK(graph.dimension() == 3);
  CHECK((graph.q_plus() - Eigen::Vector3d(1, 0, 0)).norm() < 1e-15);
  CHECK(graph.arc_length(0) > 1.0);
}

TEST_CASE("boundary graph endpoint mismatch is rejected") {
  const std::string text = R"({
    "dimension": 3,
    "arcs": [
      [[0,0,0],[1,0,0]],
      [[0,0,0],[1,0,0.001]],
      [[0,0,0],[1,0,0]]
    ]})";
  CHECK_THROWS(BoundaryGraph::from_json_text(text));
}
