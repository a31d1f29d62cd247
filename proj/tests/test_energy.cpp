#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "triplateau/energy.hpp"
#include "triplateau/errors.hpp"

using namespace triplateau;
using namespace triplateau::testing;

namespace {

Positions from_fn(const SheetMesh& sheet,
                  const std::function<Eigen::VectorXd(double, double)>& fn) {
  Positions pos(sheet.vertex_count(), fn(0, 0).size());
  for (int v = 0; v < sheet.vertex_count(); ++v)
    pos.row(v) = fn(sheet.mesh.vertices[v].x(), sheet.mesh.vertices[v].y());
  return pos;
}

}  // namespace

TEST_CASE("dirichlet energy of basic maps") {
  const SheetMesh sheet = build_half_disk_mesh(4, 8);
  const double mesh_area = parameter_area(sheet.mesh);

  const Positions constant = from_fn(sheet, [](double, double) {
    return Eigen::VectorXd(Eigen::Vector3d(1.0, -2.0, 0.5));
  });
  CHECK(dirichlet_energy(sheet, constant) == doctest::Approx(0.0));

  const Positions identity = from_fn(sheet, [](double x, double y) {
    return Eigen::VectorXd(Eigen::Vector2d(x, y));
  });
  CHECK(dirichlet_energy(sheet, identity) ==
        doctest::Approx(2.0 * mesh_area).epsilon(1e-13));

  const Positions stretched = from_fn(sheet, [](double x, double y) {
    return Eigen::VectorXd(Eigen::Vector2d(2.0 * x, y));
  });
  CHECK(dirichlet_energy(sheet, stretched) ==
        doctest::Approx(5.0 * mesh_area).epsilon(1e-13));
}

TEST_CASE("mapped area of basic maps") {
  const SheetMesh sheet = build_half_disk_mesh(4, 8);
  const double mesh_area = parameter_area(sheet.mesh);

  const Positions constant = from_fn(sheet, [](double, double) {
    return Eigen::VectorXd(Eigen::Vector3d::Ones());
  });
  CHECK(area(sheet, constant) == doctest::Approx(0.0));

  const Positions identity = from_fn(sheet, [](double x, double y) {
    return Eigen::VectorXd(Eigen::Vector2d(x, y));
  });
  CHECK(area(sheet, identity) == doctest::Approx(mesh_area).epsilon(1e-13));

  const Positions stretched = from_fn(sheet, [](double x, double y) {
    return Eigen::VectorXd(Eigen::Vector2d(x, 2.0 * y));
  });
  CHECK(area(sheet, stretched) ==
        doctest::Approx(2.0 * mesh_area).epsilon(1e-13));
}

TEST_CASE("area never exceeds half the energy; equality iff conformal") {
  const GluedDomain domain = make_domain(3, 6);
  const PiecewiseMap flat = flat_embedding(domain);
  for (int i = 0; i < 3; ++i) {
    const double e = dirichlet_energy(domain.sheets[i], flat.sheet_values(i));
    const double a = area(domain.sheets[i], flat.sheet_values(i));
    CHECK(a == doctest::Approx(e / 2.0).epsilon(1e-13));  // conformal
  }
  std::mt19937 rng(3);
  const BoundaryGraph graph = flat_y_graph(64);
  const GluingData gluing = GluingData::identity(domain);
  for (int trial = 0; trial < 10; ++trial) {
    const PiecewiseMap map = random_feasible_map(domain, graph, gluing, rng);
    for (int i = 0; i < 3; ++i) {
      const double e = dirichlet_energy(domain.sheets[i], map.sheet_values(i));
      const double a = area(domain.sheets[i], map.sheet_values(i));
      CHECK(a <= e / 2.0 + 1e-12);
    }
  }
}

TEST_CASE("dirichlet energy is an exact quadratic form") {
  const GluedDomain domain = make_domain(2, 6);
  const SheetMesh& sheet = domain.sheets[0];
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto random_positions = [&] {
    Positions p(sheet.vertex_count(), 3);
    for (int v = 0; v < sheet.vertex_count(); ++v)
      for (int c = 0; c < 3; ++c) p(v, c) = unit(rng);
    return p;
  };
  const Positions a = random_positions(), b = random_positions();
  const double ea = dirichlet_energy(sheet, a);
  const double eb = dirichlet_energy(sheet, b);
  CHECK(dirichlet_energy(sheet, 2.5 * a) ==
        doctest::Approx(2.5 * 2.5 * ea).epsilon(1e-13));
  CHECK(dirichlet_energy(sheet, a + b) <= 2.0 * ea + 2.0 * eb + 1e-12);
  // exact interpolation identity of quadratic forms
  const double t = 0.37;
  const double lhs = dirichlet_energy(sheet, (1.0 - t) * a + t * b);
  const double rhs =
      (1.0 - t) * ea + t * eb - t * (1.0 - t) * dirichlet_energy(sheet, a - b);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("l2 energy formula and incompatible branch") {
  CHECK(l2_energy({{1, 1, 1}}, WeightVector::l2({1.0 / 3, 1.0 / 3, 1.0 / 3})) ==
        doctest::Approx(3.0));
  CHECK(l2_energy({{1, 1, 2}}, WeightVector::l2({0.25, 0.25, 0.5})) ==
        doctest::Approx(4.0));
  CHECK(std::isinf(l2_energy({{0.1, 1, 1}}, WeightVector::l2({0, 0.5, 0.5}))));
  // zero-energy sheet with zero weight stays compatible
  CHECK(std::isfinite(
      l2_energy({{0, 1, 1}}, WeightVector::l2({0, 0.5, 0.5}))));
}

TEST_CASE("l1 energy") {
  CHECK(l1_energy({{1, 2, 3}}, WeightVector::l1({1, 1, 1})) ==
        doctest::Approx(6.0));
  CHECK(l1_energy({{1, 1, 1}}, WeightVector::l1({2, 1, 1})) ==
        doctest::Approx(4.0));
  CHECK(l1_energy({{0.5, 0.25, 0.25}}, WeightVector::l1({2, 4, 4})) ==
        doctest::Approx(3.0));
  CHECK_THROWS_AS(WeightVector::l1({1, 0, 1}), std::invalid_argument);
}

TEST_CASE("optimal weights") {
  const WeightVector c = optimal_weights({{1, 1, 2}});
  CHECK(c[0] == doctest::Approx(0.25));
  CHECK(c[1] == doctest::Approx(0.25));
  CHECK(c[2] == doctest::Approx(0.5));
  const WeightVector symmetric = optimal_weights({{1, 1, 1}});
  CHECK(symmetric[0] == doctest::Approx(1.0 / 3));
  CHECK_THROWS_AS(optimal_weights({{0, 0, 0}}), DegenerateMapError);
  // a zero entry is allowed and the result stays compatible
  const WeightVector with_zero = optimal_weights({{0, 1, 1}});
  CHECK(with_zero[0] == doctest::Approx(0.0));
  CHECK(std::isfinite(l2_energy({{0, 1, 1}}, with_zero)));
}

TEST_CASE("l1 to l2 weight conversion") {
  const WeightVector a = weights_l1_to_l2(WeightVector::l1({1, 1, 1}), {{1, 1, 2}});
  CHECK(a[0] == doctest::Approx(0.25));
  CHECK(a[2] == doctest::Approx(0.5));
  const WeightVector b = weights_l1_to_l2(WeightVector::l1({1, 2, 2}), {{1, 2, 2}});
  CHECK(b[0] == doctest::Approx(1.0 / 3));
  CHECK(b[1] == doctest::Approx(1.0 / 3));
  // scale invariance in k
  const WeightVector c1 =
      weights_l1_to_l2(WeightVector::l1({0.3, 0.7, 1.9}), {{0.2, 1.4, 0.8}});
  const WeightVector c2 =
      weights_l1_to_l2(WeightVector::l1({3.0, 7.0, 19.0}), {{0.2, 1.4, 0.8}});
  for (int i = 0; i < 3; ++i) CHECK(c1[i] == doctest::Approx(c2[i]).epsilon(1e-14));
}

TEST_CASE("l2 to l1 solves the rank-one system") {
  const WeightVector k = weights_l2_to_l1(WeightVector::l2({0.25, 0.25, 0.5}),
                                          {{1, 1, 2}});
  CHECK(k[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(k[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(k[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(
      weights_l2_to_l1(WeightVector::l2({0.5, 0.5, 0.0}), {{1, 1, 1}}),
      std::invalid_argument);
}

TEST_CASE("weight conversions invert each other") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> pos(0.05, 4.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<double, 3> raw{pos(rng), pos(rng), pos(rng)};
    const double sum = raw[0] + raw[1] + raw[2];
    const WeightVector c =
        WeightVector::l2({raw[0] / sum, raw[1] / sum, raw[2] / sum});
    const EnergyTriple e{{pos(rng), pos(rng), pos(rng)}};
    const WeightVector k = weights_l2_to_l1(c, e);
    const WeightVector back = weights_l1_to_l2(k, e);
    for (int i = 0; i < 3; ++i)
      CHECK(back[i] == doctest::Approx(c[i]).epsilon(1e-12));
  }
}
