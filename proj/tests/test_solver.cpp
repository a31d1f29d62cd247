#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "fixtures.hpp"
#include "triplateau/errors.hpp"
#include "triplateau/solver.hpp"

using namespace triplateau;
using namespace triplateau::testing;

namespace {

double max_map_difference(const PiecewiseMap& a, const PiecewiseMap& b) {
  double diff = 0.0;
  for (int i = 0; i < 3; ++i)
    diff = std::max(diff,
                    (a.sheet_values(i) - b.sheet_values(i)).cwiseAbs().maxCoeff());
  return diff;
}

}  // namespace

TEST_CASE("junction rows accumulate the three weighted sheet stencils") {
  const GluedDomain domain = make_domain(2, 4);
  const BoundaryGraph graph = flat_y_graph(16 * 4);
  const GluingData gluing = GluingData::identity(domain);
  const WeightVector k = WeightVector::l1({1.0, 2.0, 5.0});
  const std::array<Eigen::MatrixXd, 3> targets{
      sample_boundary_targets(graph, gluing, 0),
      sample_boundary_targets(graph, gluing, 1),
      sample_boundary_targets(graph, gluing, 2)};
  const WeightedSystem sys =
      assemble_weighted_system(domain, k, targets, identity_ties(domain));

  std::mt19937 rng(5);
  const PiecewiseMap map = random_feasible_map(domain, graph, gluing, rng);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(sys.dof_count, 3);
  for (int j = 1; j + 1 < domain.junction_count; ++j)
    x.row(sys.junction_dof[j]) = map.junction_positions().row(j);
  for (int i = 0; i < 3; ++i)
    for (int v = 0; v < domain.sheets[i].vertex_count(); ++v)
      if (sys.vertex_dof[i][v] >= 0)
        x.row(sys.vertex_dof[i][v]) = map.sheet_values(i).row(v);
  const Eigen::MatrixXd weak = sys.matrix * x - sys.rhs;

  // per-sheet reference: k_i * K_i * values_i
  std::array<Eigen::MatrixXd, 3> reference;
  for (int i = 0; i < 3; ++i)
    reference[i] = k[i] * (stiffness_matrix(domain.sheets[i].mesh) *
                           map.sheet_values(i));

  SUBCASE("interior junction node") {
    const int j = domain.junction_count / 2;
    Eigen::RowVector3d expected = Eigen::RowVector3d::Zero();
    for (int i = 0; i < 3; ++i)
      expected += reference[i].row(domain.sheets[i].free_boundary[j]);
    CHECK((weak.row(sys.junction_dof[j]) - expected).norm() <
          1e-11 * (1.0 + expected.norm()));
  }
  SUBCASE("plain interior vertex uses its own sheet stencil") {
    int sheet = 1, vertex = -1;
    for (int v = 0; v < domain.sheets[sheet].vertex_count(); ++v)
      if (sys.vertex_dof[sheet][v] >= 0) vertex = v;
    REQUIRE(vertex >= 0);
    CHECK((weak.row(sys.vertex_dof[sheet][vertex]) -
           reference[sheet].row(vertex))
              .norm() < 1e-11);
  }
}

TEST_CASE("assembled system is symmetric positive definite") {
  const GluedDomain domain = make_domain(1, 4);
  const BoundaryGraph graph = flat_y_graph(16 * 4);
  const GluingData gluing = GluingData::identity(domain);
  const std::array<Eigen::MatrixXd, 3> targets{
      sample_boundary_targets(graph, gluing, 0),
      sample_boundary_targets(graph, gluing, 1),
      sample_boundary_targets(graph, gluing, 2)};
  const WeightedSystem sys = assemble_weighted_system(
      domain, WeightVector::l1({1, 1, 1}), targets, identity_ties(domain));
  const Eigen::MatrixXd dense = Eigen::MatrixXd(sys.matrix);
  CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("constant boundary targets give the constant map") {
  const GluedDomain domain = make_domain(2, 4);
  const Eigen::RowVector3d q(0.3, -0.7, 1.1);
  std::array<Eigen::MatrixXd, 3> targets;
  for (int i = 0; i < 3; ++i)
    targets[i] = q.replicate(domain.sheets[i].fixed_boundary.size(), 1);
  const PiecewiseMap map = solve_with_targets(
      domain, WeightVector::l1({1, 1, 1}), targets, identity_ties(domain));
  for (int i = 0; i < 3; ++i) {
    CHECK((map.sheet_values(i).rowwise() - q).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(dirichlet_energy(domain.sheets[i], map.sheet_values(i)) < 1e-20);
  }
}

TEST_CASE("flat-Y: the affine embedding satisfies the assembled system") {
  const GluedDomain domain = make_domain(4, 8);
  const BoundaryGraph graph = flat_y_graph(16 * 8);
  const GluingData gluing = GluingData::identity(domain);
  const PiecewiseMap flat = flat_embedding(domain);
  const double residual = stationarity_residual(
      domain, gluing, WeightVector::l1({1, 1, 1}), graph, flat);
  CHECK(residual <= 1e-10);

  const PiecewiseMap solved = solve_harmonic_map(
      domain, gluing, WeightVector::l1({1, 1, 1}), graph);
  CHECK(max_map_difference(solved, flat) < 1e-9);
}

TEST_CASE("solution is invariant under scaling the l1 weights") {
  const GluedDomain domain = make_domain(2, 6);
  const BoundaryGraph graph = bent_y_graph(16 * 6);
  const GluingData gluing = GluingData::identity(domain);
  const PiecewiseMap a = solve_harmonic_map(
      domain, gluing, WeightVector::l1({1, 1, 1}), graph);
  const PiecewiseMap b = solve_harmonic_map(
      domain, gluing, WeightVector::l1({3, 3, 3}), graph);
  CHECK(max_map_difference(a, b) < 1e-12);
}

TEST_CASE("two initial guesses converge to the same minimizer") {
  const GluedDomain domain = make_domain(3, 6);
  const BoundaryGraph graph = bent_y_graph(16 * 6);
  const GluingData gluing = GluingData::identity(domain);
  const WeightVector k = WeightVector::l1({1, 1, 1});

  std::mt19937 rng(17);
  const PiecewiseMap guess_a = random_feasible_map(domain, graph, gluing, rng);
  const PiecewiseMap guess_b = random_feasible_map(domain, graph, gluing, rng);
  SolveOptions opts;
  opts.iterative = true;
  opts.tolerance = 1e-11;
  opts.initial_guess = &guess_a;
  const PiecewiseMap a = solve_harmonic_map(domain, gluing, k, graph,
                                            GluingMode::Identity, opts);
  opts.initial_guess = &guess_b;
  const PiecewiseMap b = solve_harmonic_map(domain, gluing, k, graph,
                                            GluingMode::Identity, opts);
  CHECK(max_map_difference(a, b) < 1e-8);
}

TEST_CASE("update_weights matches the closed forms and is idempotent") {
  const GluedDomain domain = make_domain(3, 6);
  const BoundaryGraph graph = flat_y_graph(16 * 6);
  const GluingData gluing = GluingData::identity(domain);
  const PiecewiseMap map = solve_harmonic_map(
      domain, gluing, WeightVector::l1({1, 1, 1}), graph);
  const WeightUpdate first = update_weights(map, domain);
  for (int i = 0; i < 3; ++i)
    CHECK(first.c[i] == doctest::Approx(1.0 / 3).epsilon(1e-10));
  const WeightUpdate second = update_weights(map, domain);
  for (int i = 0; i < 3; ++i) {
    CHECK(second.c[i] == doctest::Approx(first.c[i]).epsilon(1e-14));
    CHECK(second.k[i] == doctest::Approx(first.k[i]).epsilon(1e-14));
  }
}

TEST_CASE("gluing descent leaves a symmetric minimizer unchanged") {
  const GluedDomain domain = make_domain(3, 6);
  const BoundaryGraph graph = flat_y_graph(16 * 6);
  const GluingData gluing = GluingData::identity(domain);
  const WeightVector k = WeightVector::l1({1, 1, 1});
  const PiecewiseMap map = solve_harmonic_map(domain, gluing, k, graph);
  for (GluingMode mode : {GluingMode::Identity, GluingMode::Sliding}) {
    const GluingUpdate upd =
        update_gluing(domain, gluing, map, graph, 0.05, k, mode);
    CHECK_FALSE(upd.moved);
    CHECK_FALSE(upd.line_search_failed);
    for (int i = 0; i < 3; ++i) {
      CHECK(upd.gluing.sheets[i].fixed_params ==
            gluing.sheets[i].fixed_params);
      CHECK(upd.gluing.sheets[i].free_params == gluing.sheets[i].free_params);
    }
  }
}

TEST_CASE("gluing descent decreases the energy of a skewed parameterization") {
  const GluedDomain domain = make_domain(3, 8);
  const BoundaryGraph graph = flat_y_graph(16 * 8);
  GluingData gluing = GluingData::identity(domain);
  // skew interior parameters of every sheet, keeping endpoints and the pin
  for (int i = 0; i < 3; ++i) {
    auto& t = gluing.sheets[i].fixed_params;
    for (std::size_t a = 1; a + 1 < t.size(); ++a) {
      if (static_cast<int>(a) == gluing.sheets[i].pinned_mid) continue;
      t[a] += 0.6 * t[a] * (1.0 - t[a]) * (t[a] - 0.5);
    }
  }
  validate_gluing(domain, gluing);
  const WeightVector k = WeightVector::l1({1, 1, 1});
  const PiecewiseMap map = solve_harmonic_map(domain, gluing, k, graph);
  const double before = l1_energy(sheet_energies(domain, map), k);
  const GluingUpdate upd = update_gluing(domain, gluing, map, graph, 0.05, k);
  CHECK(upd.moved);
  const double after = l1_energy(upd.energies, k);
  CHECK(after < before);
  CHECK_NOTHROW(validate_gluing(domain, upd.gluing));
}

TEST_CASE("minimize on flat-Y recovers the symmetric configuration") {
  const GluedDomain domain = make_domain(4, 8);
  const BoundaryGraph graph = flat_y_graph(16 * 8);
  SolveConfig config;
  config.max_outer_iterations = 40;
  const Solution sol = minimize(domain, graph, config);
  CHECK(sol.converged);
  for (int i = 0; i < 3; ++i)
    CHECK(sol.weights_c[i] == doctest::Approx(1.0 / 3).epsilon(1e-9));
  // E_c history is nonincreasing across iterations
  for (std::size_t r = 1; r < sol.history.size(); ++r)
    CHECK(sol.history[r].l2_energy <=
          sol.history[r - 1].l2_energy + 1e-12);
  // the solution is the flat embedding
  CHECK(max_map_difference(sol.map, flat_embedding(domain)) < 1e-8);
}

TEST_CASE("three identical arcs give equal energies and uniform weights") {
  const auto d = frame_directions();
  std::array<Eigen::MatrixXd, 3> arcs;
  const int samples = 96;
  for (int i = 0; i < 3; ++i) {
    Eigen::MatrixXd arc(samples + 1, 3);
    for (int s = 0; s <= samples; ++s) {
      const double theta = M_PI * static_cast<double>(s) / samples;
      arc.row(s) = (-std::cos(theta)) * Eigen::Vector3d::UnitX() +
                   std::sin(theta) * d[0];
    }
    arcs[i] = arc;
  }
  const BoundaryGraph graph{std::move(arcs)};
  const GluedDomain domain = make_domain(3, 6);
  SolveConfig config;
  config.max_outer_iterations = 10;
  const Solution sol = minimize(domain, graph, config);
  CHECK(sol.energies[0] == doctest::Approx(sol.energies[1]).epsilon(1e-10));
  CHECK(sol.energies[1] == doctest::Approx(sol.energies[2]).epsilon(1e-10));
  for (int i = 0; i < 3; ++i)
    CHECK(sol.weights_c[i] == doctest::Approx(1.0 / 3).epsilon(1e-9));
}

TEST_CASE("convexity identity holds to machine precision") {
  const GluedDomain domain = make_domain(2, 6);
  const BoundaryGraph graph = bent_y_graph(96);
  const GluingData gluing = GluingData::identity(domain);
  const WeightVector k = WeightVector::l1({0.7, 1.3, 2.1});
  std::mt19937 rng(23);
  const PiecewiseMap m0 = random_feasible_map(domain, graph, gluing, rng);
  const PiecewiseMap m1 = random_feasible_map(domain, graph, gluing, rng);

  CHECK(convexity_check(m0, m0, k, 0.42) == doctest::Approx(0.0));
  CHECK(convexity_check(m0, m1, k, 0.0) == doctest::Approx(0.0));
  CHECK(convexity_check(m0, m1, k, 1.0) == doctest::Approx(0.0));
  const double ek = l1_energy(sheet_energies(domain, m0), k);
  CHECK(std::abs(convexity_check(m0, m1, k, 0.37)) <=
        1e-10 * std::max(1.0, ek));
}

TEST_CASE("sliding mode minimizes at least as well as identity mode") {
  const GluedDomain domain = make_domain(3, 6);
  const BoundaryGraph graph = bent_y_graph(16 * 6);
  SolveConfig config;
  config.max_outer_iterations = 25;
  const Solution identity_sol = minimize(domain, graph, config);
  config.mode = GluingMode::Sliding;
  const Solution sliding_sol = minimize(domain, graph, config);
  for (std::size_t r = 1; r < sliding_sol.history.size(); ++r)
    CHECK(sliding_sol.history[r].l2_energy <=
          sliding_sol.history[r - 1].l2_energy + 1e-12);
  // the sliding family contains the identity point, so with the same budget
  // it should not end meaningfully worse
  CHECK(sliding_sol.history.back().l2_energy <=
        identity_sol.history.back().l2_energy + 1e-6);
}

TEST_CASE("invalid configs are rejected") {
  SolveConfig config;
  config.max_outer_iterations = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = SolveConfig{};
  config.inner_tolerance = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}
