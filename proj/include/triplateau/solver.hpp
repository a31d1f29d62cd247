#pragma once

#include <Eigen/Sparse>
#include <optional>
#include <vector>

#include "triplateau/boundary_graph.hpp"
#include "triplateau/domain.hpp"
#include "triplateau/energy.hpp"

namespace triplateau {

enum class GluingMode { Identity, Sliding };

struct SolveConfig {
  int max_outer_iterations = 200;
  double inner_tolerance = 1e-10;       // linear-solve residual
  double weight_tolerance = 1e-8;       // weight fixed-point check
  double gluing_step = 0.05;            // initial descent step
  double energy_decrease_tolerance = 1e-9;  // relative outer-loop stop
  unsigned seed = 0;                    // deterministic initialization
  GluingMode mode = GluingMode::Identity;

  void validate() const;
};

// The weighted quadratic form sum_i k_i E(alpha_i) reduced to the unknown
// degrees of freedom: interior vertices plus shared junction nodes.  Rows of
// junction dofs accumulate all three sheets' stencils; their stationarity is
// the discrete balancing condition.
struct WeightedSystem {
  Eigen::SparseMatrix<double> matrix;  // SPD
  Eigen::MatrixXd rhs;                 // dof_count x n
  int dof_count = 0;
  int dimension = 0;
  std::vector<int> junction_dof;              // node -> dof, -1 if pinned
  std::array<std::vector<int>, 3> vertex_dof; // vertex -> dof, -1 otherwise
};

WeightedSystem assemble_weighted_system(
    const GluedDomain& domain, const WeightVector& k,
    const std::array<Eigen::MatrixXd, 3>& boundary_targets,
    const std::array<std::vector<FreeTie>, 3>& ties);

struct SolveOptions {
  double tolerance = 1e-10;
  bool iterative = false;                      // CG instead of Cholesky
  const PiecewiseMap* initial_guess = nullptr; // only used when iterative
};

// Unique minimizer of sum_i k_i E(alpha_i) over maps satisfying the matching
// and boundary conditions.  Invariant under positive scaling of k.
PiecewiseMap solve_harmonic_map(const GluedDomain& domain,
                                const GluingData& gluing,
                                const WeightVector& k,
                                const BoundaryGraph& graph,
                                GluingMode mode = GluingMode::Identity,
                                const SolveOptions& options = {});

// Same minimizer for explicitly given boundary targets.
PiecewiseMap solve_with_targets(
    const GluedDomain& domain, const WeightVector& k,
    const std::array<Eigen::MatrixXd, 3>& boundary_targets,
    const std::array<std::vector<FreeTie>, 3>& ties,
    const SolveOptions& options = {});

// Max-norm stationarity residual of `map` for the assembled system (how far
// the interior/junction rows of the weighted cotangent form are from zero).
double stationarity_residual(const GluedDomain& domain,
                             const GluingData& gluing, const WeightVector& k,
                             const BoundaryGraph& graph, const PiecewiseMap& map,
                             GluingMode mode = GluingMode::Identity);

struct WeightUpdate {
  WeightVector c;
  WeightVector k;
  bool k_degenerate = false;  // some sheet energy vanished; k left uniform
};

// Closed-form weight update: c from the optimal-weight formula, k through
// the l2 -> l1 correspondence (idempotent for a fixed map).
WeightUpdate update_weights(const PiecewiseMap& map, const GluedDomain& domain);

struct GluingUpdate {
  GluingData gluing;
  bool moved = false;              // false: zero gradient or rejected step
  bool line_search_failed = false;
  std::optional<PiecewiseMap> map; // solution at the accepted parameters
  EnergyTriple energies;
};

// One projected descent step on the boundary parameters (fixed-chain
// arc-length fractions, plus sheets 2/3 free-chain offsets in sliding mode)
// with Armijo backtracking; rejected steps return the input gluing.
// Monotonicity and the three point condition are preserved by projection.
GluingUpdate update_gluing(const GluedDomain& domain, const GluingData& gluing,
                           const PiecewiseMap& map, const BoundaryGraph& graph,
                           double step, const WeightVector& k,
                           GluingMode mode = GluingMode::Identity,
                           double solve_tolerance = 1e-10);

struct IterationRecord {
  double l2_energy = 0.0;
  double l1_energy = 0.0;
  double residual = 0.0;
  bool gluing_moved = false;
};

struct Solution {
  PiecewiseMap map;
  WeightVector weights_c;
  WeightVector weights_k;
  GluingData gluing;
  EnergyTriple energies;
  std::vector<IterationRecord> history;
  bool converged = false;
};

// Alternates harmonic solve, closed-form weight update, and gluing descent
// until the relative energy decrease falls below tolerance.
Solution minimize(const GluedDomain& domain, const BoundaryGraph& graph,
                  const SolveConfig& config);

// E^k(lerp(m0,m1,t)) minus the exact quadratic-interpolation value
// (1-t)E^k(m0) + tE^k(m1) - t(1-t) sum_i k_i E(m0_i - m1_i); zero to machine
// precision for the piecewise-linear energy.
double convexity_check(const PiecewiseMap& map0, const PiecewiseMap& map1,
                       const WeightVector& k, double t);

}  // namespace triplateau
