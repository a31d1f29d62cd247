#include "triplateau/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "triplateau/errors.hpp"

namespace triplateau {

void SolveConfig::validate() const {
  if (max_outer_iterations < 1)
    throw std::invalid_argument("max_outer_iterations must be >= 1");
  if (!(inner_tolerance > 0) || !(weight_tolerance > 0) ||
      !(energy_decrease_tolerance > 0))
    throw std::invalid_argument("tolerances must be positive");
  if (!(gluing_step >= 0))
    throw std::invalid_argument("gluing_step must be nonnegative");
}

namespace {

// Affine expansion of one vertex position in terms of unknown dofs:
// pos(v) = sum_t weight_t * X.row(dof_t) + offset.
struct Expansion {
  int dofs[2] = {-1, -1};
  double weights[2] = {0.0, 0.0};
  int term_count = 0;
  Eigen::RowVectorXd offset;
};

struct DofLayout {
  std::vector<int> junction_dof;
  std::array<std::vector<int>, 3> vertex_dof;
  std::array<std::vector<Expansion>, 3> expansions;
  int dof_count = 0;
  int dimension = 0;
};

DofLayout build_dof_layout(const GluedDomain& domain,
                           const std::array<Eigen::MatrixXd, 3>& targets,
                           const std::array<std::vector<FreeTie>, 3>& ties) {
  DofLayout layout;
  const int n = static_cast<int>(targets[0].cols());
  layout.dimension = n;
  const int junction_count = domain.junction_count;

  layout.junction_dof.assign(junction_count, -1);
  for (int j = 1; j + 1 < junction_count; ++j)
    layout.junction_dof[j] = layout.dof_count++;
  // Junction endpoints are pinned to the shared graph endpoints.
  const Eigen::RowVectorXd q_minus = targets[0].row(0);
  const Eigen::RowVectorXd q_plus = targets[0].row(targets[0].rows() - 1);

  auto junction_expansion = [&](const FreeTie& tie) {
    Expansion e;
    e.offset = Eigen::RowVectorXd::Zero(n);
    const std::pair<int, double> parts[2] = {{tie.node0, 1.0 - tie.w1},
                                             {tie.node1, tie.w1}};
    for (const auto& [node, w] : parts) {
      if (w == 0.0) continue;
      const int dof = layout.junction_dof[node];
      if (dof >= 0) {
        e.dofs[e.term_count] = dof;
        e.weights[e.term_count] = w;
        ++e.term_count;
      } else {
        e.offset += w * (node == 0 ? q_minus : q_plus);
      }
    }
    return e;
  };

  for (int i = 0; i < 3; ++i) {
    const auto& sheet = domain.sheets[i];
    if (targets[i].rows() != static_cast<int>(sheet.fixed_boundary.size()) ||
        targets[i].cols() != n)
      throw std::invalid_argument("boundary targets have wrong shape");
    auto& expansions = layout.expansions[i];
    auto& vdof = layout.vertex_dof[i];
    expansions.resize(sheet.vertex_count());
    vdof.assign(sheet.vertex_count(), -1);
    std::vector<char> assigned(sheet.vertex_count(), 0);

    for (std::size_t a = 0; a < sheet.fixed_boundary.size(); ++a) {
      const int v = sheet.fixed_boundary[a];
      Expansion e;
      e.offset = targets[i].row(a);
      expansions[v] = std::move(e);
      assigned[v] = 1;
    }
    for (std::size_t a = 0; a < sheet.free_boundary.size(); ++a) {
      const int v = sheet.free_boundary[a];
      if (assigned[v]) continue;  // shared endpoints stay Dirichlet
      expansions[v] = junction_expansion(ties[i][a]);
      assigned[v] = 1;
    }
    for (int v = 0; v < sheet.vertex_count(); ++v) {
      if (assigned[v]) continue;
      const int dof = layout.dof_count++;
      Expansion e;
      e.offset = Eigen::RowVectorXd::Zero(n);
      e.dofs[0] = dof;
      e.weights[0] = 1.0;
      e.term_count = 1;
      expansions[v] = std::move(e);
      vdof[v] = dof;
    }
  }
  return layout;
}

}  // namespace

WeightedSystem assemble_weighted_system(
    const GluedDomain& domain, const WeightVector& k,
    const std::array<Eigen::MatrixXd, 3>& boundary_targets,
    const std::array<std::vector<FreeTie>, 3>& ties) {
  if (k.mode != WeightVector::Mode::L1 || !(k[0] > 0 && k[1] > 0 && k[2] > 0))
    throw std::invalid_argument("assembly needs strictly positive l1 weights");
  DofLayout layout = build_dof_layout(domain, boundary_targets, ties);

  std::vector<Eigen::Triplet<double>> trips;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(layout.dof_count, layout.dimension);

  for (int i = 0; i < 3; ++i) {
    const auto& sheet = domain.sheets[i];
    const auto& expansions = layout.expansions[i];
    for (int t = 0; t < sheet.triangle_count(); ++t) {
      const Eigen::Matrix3d ke = k[i] * element_stiffness(sheet.mesh, t);
      const auto& tri = sheet.mesh.triangles[t];
      for (int a = 0; a < 3; ++a) {
        const Expansion& ea = expansions[tri[a]];
        for (int b = 0; b < 3; ++b) {
          const Expansion& eb = expansions[tri[b]];
          for (int ta = 0; ta < ea.term_count; ++ta) {
            for (int tb = 0; tb < eb.term_count; ++tb)
              trips.emplace_back(ea.dofs[ta], eb.dofs[tb],
                                 ea.weights[ta] * eb.weights[tb] * ke(a, b));
            rhs.row(ea.dofs[ta]) -= ea.weights[ta] * ke(a, b) * eb.offset;
          }
        }
      }
    }
  }

  WeightedSystem sys;
  sys.matrix.resize(layout.dof_count, layout.dof_count);
  sys.matrix.setFromTriplets(trips.begin(), trips.end());
  sys.rhs = std::move(rhs);
  sys.dof_count = layout.dof_count;
  sys.dimension = layout.dimension;
  sys.junction_dof = std::move(layout.junction_dof);
  sys.vertex_dof = std::move(layout.vertex_dof);
  return sys;
}

namespace {

std::array<Eigen::MatrixXd, 3> targets_for(const BoundaryGraph& graph,
                                           const GluingData& gluing) {
  return {sample_boundary_targets(graph, gluing, 0),
          sample_boundary_targets(graph, gluing, 1),
          sample_boundary_targets(graph, gluing, 2)};
}

std::array<std::vector<FreeTie>, 3> ties_for(const GluedDomain& domain,
                                             const GluingData& gluing,
                                             GluingMode mode) {
  return mode == GluingMode::Sliding ? sliding_ties(domain, gluing)
                                     : identity_ties(domain);
}

PiecewiseMap reconstruct(const GluedDomain& domain,
                         const std::array<Eigen::MatrixXd, 3>& targets,
                         const std::array<std::vector<FreeTie>, 3>& ties,
                         const WeightedSystem& sys, const Eigen::MatrixXd& x) {
  const int n = sys.dimension;
  Eigen::MatrixXd junction(domain.junction_count, n);
  junction.row(0) = targets[0].row(0);
  junction.row(domain.junction_count - 1) =
      targets[0].row(targets[0].rows() - 1);
  for (int j = 1; j + 1 < domain.junction_count; ++j)
    junction.row(j) = x.row(sys.junction_dof[j]);

  std::array<Eigen::MatrixXd, 3> values;
  for (int i = 0; i < 3; ++i) {
    const auto& sheet = domain.sheets[i];
    values[i].setZero(sheet.vertex_count(), n);
    for (int v = 0; v < sheet.vertex_count(); ++v)
      if (sys.vertex_dof[i][v] >= 0)
        values[i].row(v) = x.row(sys.vertex_dof[i][v]);
    for (std::size_t a = 0; a < sheet.fixed_boundary.size(); ++a)
      values[i].row(sheet.fixed_boundary[a]) = targets[i].row(a);
  }
  // Free-chain rows are rebuilt from the junction storage by the
  // constructor, through the same ties the system was assembled with.
  return PiecewiseMap(domain, std::move(values), std::move(junction), ties);
}

Eigen::MatrixXd extract_dofs(const WeightedSystem& sys,
                             const GluedDomain& domain,
                             const PiecewiseMap& map) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(sys.dof_count, sys.dimension);
  for (int j = 1; j + 1 < domain.junction_count; ++j)
    x.row(sys.junction_dof[j]) = map.junction_positions().row(j);
  for (int i = 0; i < 3; ++i)
    for (int v = 0; v < domain.sheets[i].vertex_count(); ++v)
      if (sys.vertex_dof[i][v] >= 0)
        x.row(sys.vertex_dof[i][v]) = map.sheet_values(i).row(v);
  return x;
}

double system_residual(const WeightedSystem& sys, const Eigen::MatrixXd& x) {
  const double scale =
      std::max(1.0, sys.rhs.size() ? sys.rhs.cwiseAbs().maxCoeff() : 0.0);
  return (sys.matrix * x - sys.rhs).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

PiecewiseMap solve_harmonic_map(const GluedDomain& domain,
                                const GluingData& gluing,
                                const WeightVector& k,
                                const BoundaryGraph& graph, GluingMode mode,
                                const SolveOptions& options) {
  validate_gluing(domain, gluing);
  return solve_with_targets(domain, k, targets_for(graph, gluing),
                            ties_for(domain, gluing, mode), options);
}

PiecewiseMap solve_with_targets(
    const GluedDomain& domain, const WeightVector& k,
    const std::array<Eigen::MatrixXd, 3>& targets,
    const std::array<std::vector<FreeTie>, 3>& ties,
    const SolveOptions& options) {
  const WeightedSystem sys = assemble_weighted_system(domain, k, targets, ties);

  Eigen::MatrixXd x;
  if (options.iterative) {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                             Eigen::Lower | Eigen::Upper>
        cg(sys.matrix);
    cg.setTolerance(options.tolerance * 1e-2);
    cg.setMaxIterations(20 * sys.dof_count + 200);
    if (options.initial_guess) {
      const Eigen::MatrixXd guess =
          extract_dofs(sys, domain, *options.initial_guess);
      x = cg.solveWithGuess(sys.rhs, guess);
    } else {
      x = cg.solve(sys.rhs);
    }
  } else {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(sys.matrix);
    if (solver.info() != Eigen::Success)
      throw SolverError("Cholesky factorization failed (system not SPD?)");
    x = solver.solve(sys.rhs);
  }

  const double residual = system_residual(sys, x);
  if (!(residual <= options.tolerance))
    throw SolverError("harmonic solve residual above tolerance", residual);
  return reconstruct(domain, targets, ties, sys, x);
}

double stationarity_residual(const GluedDomain& domain,
                             const GluingData& gluing, const WeightVector& k,
                             const BoundaryGraph& graph,
                             const PiecewiseMap& map, GluingMode mode) {
  const auto targets = targets_for(graph, gluing);
  const auto ties = ties_for(domain, gluing, mode);
  const WeightedSystem sys = assemble_weighted_system(domain, k, targets, ties);
  return system_residual(sys, extract_dofs(sys, domain, map));
}

WeightUpdate update_weights(const PiecewiseMap& map, const GluedDomain& domain) {
  const EnergyTriple e = sheet_energies(domain, map);
  WeightUpdate upd;
  upd.c = optimal_weights(e);
  if (e[0] > 0 && e[1] > 0 && e[2] > 0) {
    upd.k = weights_l2_to_l1(upd.c, e);
  } else {
    upd.k = WeightVector::l1({1.0, 1.0, 1.0});
    upd.k_degenerate = true;
  }
  return upd;
}

namespace {

// Least-squares projection onto non-decreasing sequences
// (pool-adjacent-violators), then strict monotonicity within (lo, hi).
void project_monotone(std::vector<double>& t, std::size_t first,
                      std::size_t last, double lo, double hi) {
  const std::size_t m = last - first + 1;
  if (m < 3) return;
  std::vector<double> value(t.begin() + first, t.begin() + last + 1);
  std::vector<double> weight(m, 1.0);
  std::vector<std::size_t> count(m, 1);
  std::size_t blocks = 0;
  for (std::size_t a = 0; a < m; ++a) {
    value[blocks] = value[a];
    weight[blocks] = 1.0;
    count[blocks] = 1;
    ++blocks;
    while (blocks > 1 && value[blocks - 2] > value[blocks - 1]) {
      const double w = weight[blocks - 2] + weight[blocks - 1];
      value[blocks - 2] = (weight[blocks - 2] * value[blocks - 2] +
                           weight[blocks - 1] * value[blocks - 1]) /
                          w;
      weight[blocks - 2] = w;
      count[blocks - 2] += count[blocks - 1];
      --blocks;
    }
  }
  std::size_t pos = first;
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t r = 0; r < count[b]; ++r) t[pos++] = value[b];

  const double gap = 1e-6 * (hi - lo) / static_cast<double>(m);
  t[first] = lo;
  t[last] = hi;
  for (std::size_t a = first + 1; a <= last; ++a)
    t[a] = std::max(t[a], t[a - 1] + gap);
  t[last] = hi;
  for (std::size_t a = last; a-- > first + 1;)
    t[a] = std::min(t[a], t[a + 1] - gap);
}

struct GluingVariables {
  // Flattened view of the movable parameters: fixed-chain interiors of all
  // sheets, then (sliding mode) free-chain interiors of sheets 2 and 3.
  struct Entry {
    int sheet;
    bool free_chain;
    std::size_t index;
  };
  std::vector<Entry> entries;
};

GluingVariables movable_parameters(const GluingData& gluing, GluingMode mode) {
  GluingVariables vars;
  for (int i = 0; i < 3; ++i) {
    const auto& gs = gluing.sheets[i];
    for (std::size_t a = 1; a + 1 < gs.fixed_params.size(); ++a) {
      if (static_cast<int>(a) == gs.pinned_mid) continue;
      vars.entries.push_back({i, false, a});
    }
  }
  if (mode == GluingMode::Sliding) {
    // Sheet 1's chain carries the junction nodes; sheets 2 and 3 slide.
    for (int i = 1; i < 3; ++i) {
      const auto& gs = gluing.sheets[i];
      for (std::size_t a = 1; a + 1 < gs.free_params.size(); ++a)
        vars.entries.push_back({i, true, a});
    }
  }
  return vars;
}

// Envelope-theorem gradient: at the inner minimizer the only dependence on
// a boundary parameter is through its Dirichlet (or tie) value, so
// dE/dt = 2 k_i (K_i x_i)_v . d(pos_v)/dt.
Eigen::VectorXd gluing_gradient(const GluedDomain& domain,
                                const GluingData& gluing,
                                const PiecewiseMap& map,
                                const BoundaryGraph& graph,
                                const WeightVector& k,
                                const GluingVariables& vars) {
  std::array<Eigen::MatrixXd, 3> residual;
  for (int i = 0; i < 3; ++i) {
    const auto stiff = stiffness_matrix(domain.sheets[i].mesh);
    residual[i] = k[i] * (stiff * map.sheet_values(i));
  }
  const auto& junction = map.junction_positions();
  const int last_node = domain.junction_count - 1;

  Eigen::VectorXd grad(vars.entries.size());
  for (std::size_t e = 0; e < vars.entries.size(); ++e) {
    const auto& entry = vars.entries[e];
    const auto& gs = gluing.sheets[entry.sheet];
    if (!entry.free_chain) {
      const int v = domain.sheets[entry.sheet].fixed_boundary[entry.index];
      const Eigen::VectorXd d =
          graph.derivative_at(entry.sheet, gs.fixed_params[entry.index]);
      grad(e) = 2.0 * residual[entry.sheet].row(v).dot(d);
    } else {
      const int v = domain.sheets[entry.sheet].free_boundary[entry.index];
      const double s = gs.free_params[entry.index] * last_node;
      const int node0 =
          std::clamp(static_cast<int>(std::floor(s)), 0, last_node - 1);
      const Eigen::RowVectorXd seg =
          (junction.row(node0 + 1) - junction.row(node0)) * last_node;
      grad(e) = 2.0 * residual[entry.sheet].row(v).dot(seg);
    }
  }
  return grad;
}

GluingData apply_step(const GluingData& gluing, const GluingVariables& vars,
                      const Eigen::VectorXd& direction, double step) {
  GluingData next = gluing;
  for (std::size_t e = 0; e < vars.entries.size(); ++e) {
    const auto& entry = vars.entries[e];
    auto& gs = next.sheets[entry.sheet];
    auto& params = entry.free_chain ? gs.free_params : gs.fixed_params;
    params[entry.index] += step * direction(e);
  }
  for (int i = 0; i < 3; ++i) {
    auto& gs = next.sheets[i];
    if (gs.pinned_mid >= 0) {
      gs.fixed_params[gs.pinned_mid] = 0.5;
      project_monotone(gs.fixed_params, 0, gs.pinned_mid, 0.0, 0.5);
      project_monotone(gs.fixed_params, gs.pinned_mid,
                       gs.fixed_params.size() - 1, 0.5, 1.0);
    } else {
      project_monotone(gs.fixed_params, 0, gs.fixed_params.size() - 1, 0.0,
                       1.0);
    }
    project_monotone(gs.free_params, 0, gs.free_params.size() - 1, 0.0, 1.0);
  }
  return next;
}

}  // namespace

GluingUpdate update_gluing(const GluedDomain& domain, const GluingData& gluing,
                           const PiecewiseMap& map, const BoundaryGraph& graph,
                           double step, const WeightVector& k, GluingMode mode,
                           double solve_tolerance) {
  if (!(step > 0)) throw std::invalid_argument("descent step must be positive");
  GluingUpdate result{gluing, false, false, std::nullopt, {}};
  result.energies = sheet_energies(domain, map);
  const double energy0 = l1_energy(result.energies, k);

  const GluingVariables vars = movable_parameters(gluing, mode);
  if (vars.entries.empty()) return result;
  const Eigen::VectorXd grad =
      gluing_gradient(domain, gluing, map, graph, k, vars);
  const double gnorm2 = grad.squaredNorm();
  if (!(gnorm2 > 1e-24 * std::max(1.0, energy0 * energy0))) return result;

  SolveOptions opts;
  opts.tolerance = solve_tolerance;
  constexpr double kArmijo = 1e-4;
  double s = step / std::max(1.0, grad.cwiseAbs().maxCoeff());
  for (int attempt = 0; attempt < 12; ++attempt, s *= 0.5) {
    GluingData trial = apply_step(gluing, vars, -grad, s);
    PiecewiseMap trial_map =
        solve_harmonic_map(domain, trial, k, graph, mode, opts);
    const EnergyTriple trial_e = sheet_energies(domain, trial_map);
    const double energy1 = l1_energy(trial_e, k);
    if (energy1 <= energy0 - kArmijo * s * gnorm2) {
      result.gluing = std::move(trial);
      result.moved = true;
      result.map = std::move(trial_map);
      result.energies = trial_e;
      return result;
    }
  }
  result.line_search_failed = true;
  return result;
}

Solution minimize(const GluedDomain& domain, const BoundaryGraph& graph,
                  const SolveConfig& config) {
  config.validate();
  SolveOptions opts;
  opts.tolerance = config.inner_tolerance;

  GluingData gluing = GluingData::identity(domain);
  WeightVector k = WeightVector::l1({1.0, 1.0, 1.0});
  PiecewiseMap map =
      solve_harmonic_map(domain, gluing, k, graph, config.mode, opts);

  Solution sol{std::move(map), WeightVector{}, k, gluing, {}, {}, false};
  double previous = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < config.max_outer_iterations; ++iter) {
    if (iter > 0)
      sol.map = solve_harmonic_map(domain, sol.gluing, sol.weights_k, graph,
                                   config.mode, opts);
    sol.energies = sheet_energies(domain, sol.map);
    const WeightUpdate wu = update_weights(sol.map, domain);
    sol.weights_c = wu.c;
    if (!wu.k_degenerate) sol.weights_k = wu.k;

    IterationRecord rec;
    rec.l2_energy = l2_energy(sol.energies, sol.weights_c);
    rec.l1_energy = l1_energy(sol.energies, sol.weights_k);
    rec.residual = stationarity_residual(domain, sol.gluing, sol.weights_k,
                                         graph, sol.map, config.mode);

    bool moved = false;
    if (config.gluing_step > 0) {
      GluingUpdate gu =
          update_gluing(domain, sol.gluing, sol.map, graph, config.gluing_step,
                        sol.weights_k, config.mode, config.inner_tolerance);
      if (gu.moved) {
        sol.gluing = std::move(gu.gluing);
        sol.map = std::move(*gu.map);
        sol.energies = gu.energies;
        moved = true;
      }
    }
    rec.gluing_moved = moved;
    sol.history.push_back(rec);

    const double current = rec.l2_energy;
    if (iter > 0 && previous - current <= config.energy_decrease_tolerance *
                                              std::max(1.0, previous)) {
      sol.converged = true;
      break;
    }
    previous = current;
  }
  return sol;
}

double convexity_check(const PiecewiseMap& map0, const PiecewiseMap& map1,
                       const WeightVector& k, double t) {
  if (&map0.domain() != &map1.domain() ||
      map0.dimension() != map1.dimension())
    throw std::invalid_argument("maps live on different domains");
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("t must lie in [0,1]");
  const GluedDomain& domain = map0.domain();
  const PiecewiseMap mid = PiecewiseMap::lerp(map0, map1, t);
  const double e_mid = l1_energy(sheet_energies(domain, mid), k);
  const double e0 = l1_energy(sheet_energies(domain, map0), k);
  const double e1 = l1_energy(sheet_energies(domain, map1), k);
  double e_diff = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Positions diff = map0.sheet_values(i) - map1.sheet_values(i);
    e_diff += k[i] * dirichlet_energy(domain.sheets[i], diff);
  }
  return e_mid - ((1.0 - t) * e0 + t * e1 - t * (1.0 - t) * e_diff);
}

}  // namespace triplateau
