#include "triplateau/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "triplateau/diagnostics.hpp"
#include "triplateau/errors.hpp"
#include "triplateau/obj_io.hpp"

namespace triplateau {

namespace fs = std::filesystem;
using nlohmann::json;

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json doc = json::parse(in);
  RunConfig cfg;
  cfg.graph_path = doc.value("graph", cfg.graph_path);
  cfg.radial_resolution = doc.value("radial_resolution", cfg.radial_resolution);
  cfg.angular_resolution =
      doc.value("angular_resolution", cfg.angular_resolution);
  const std::string mode = doc.value("mode", "identity");
  if (mode == "sliding")
    cfg.mode = GluingMode::Sliding;
  else if (mode != "identity")
    throw std::runtime_error("mode must be identity or sliding");
  cfg.seed = doc.value("seed", cfg.seed);
  cfg.out_dir = doc.value("out", cfg.out_dir);
  if (doc.contains("solve")) {
    const auto& s = doc["solve"];
    cfg.solve.max_outer_iterations =
        s.value("max_outer_iterations", cfg.solve.max_outer_iterations);
    cfg.solve.inner_tolerance =
        s.value("inner_tolerance", cfg.solve.inner_tolerance);
    cfg.solve.weight_tolerance =
        s.value("weight_tolerance", cfg.solve.weight_tolerance);
    cfg.solve.gluing_step = s.value("gluing_step", cfg.solve.gluing_step);
    cfg.solve.energy_decrease_tolerance = s.value(
        "energy_decrease_tolerance", cfg.solve.energy_decrease_tolerance);
  }
  if (doc.contains("check")) {
    const auto& c = doc["check"];
    cfg.angle_tolerance_deg =
        c.value("angle_tolerance_deg", cfg.angle_tolerance_deg);
    cfg.balancing_max = c.value("balancing_max", cfg.balancing_max);
    cfg.gap_ratio_max = c.value("gap_ratio_max", cfg.gap_ratio_max);
    cfg.branch_threshold = c.value("branch_threshold", cfg.branch_threshold);
  }
  return cfg;
}

namespace {

GluedDomain build_domain(int radial, int angular) {
  SheetMesh sheet = build_half_disk_mesh(radial, angular);
  return build_glued_domain({sheet, sheet, sheet},
                            CorrespondencePolicy::Identity);
}

std::vector<double> to_vec(const std::array<double, 3>& a) {
  return {a[0], a[1], a[2]};
}

json report_json(const DiagnosticsReport& report) {
  json doc = json::parse(report_to_json(report, -1));
  return doc;
}

// Barycentric interpolation of a piecewise-linear map at a parameter point;
// falls back to the nearest vertex outside the mesh.
Eigen::RowVectorXd interpolate_map(const SheetMesh& sheet,
                                   const Positions& values, const Vec2& p) {
  for (const auto& tri : sheet.mesh.triangles) {
    const Vec2& a = sheet.mesh.vertices[tri[0]];
    const Vec2& b = sheet.mesh.vertices[tri[1]];
    const Vec2& c = sheet.mesh.vertices[tri[2]];
    const double det =
        (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
    if (std::abs(det) < 1e-30) continue;
    const double l1 =
        ((p.x() - a.x()) * (c.y() - a.y()) - (p.y() - a.y()) * (c.x() - a.x())) /
        det;
    const double l2 =
        ((b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x())) /
        det;
    const double l0 = 1.0 - l1 - l2;
    if (l0 < -1e-10 || l1 < -1e-10 || l2 < -1e-10) continue;
    return l0 * values.row(tri[0]) + l1 * values.row(tri[1]) +
           l2 * values.row(tri[2]);
  }
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int v = 0; v < sheet.vertex_count(); ++v) {
    const double d = (sheet.mesh.vertices[v] - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = v;
    }
  }
  return values.row(best);
}

}  // namespace

void write_solution_files(const std::string& dir, const GluedDomain& domain,
                          const Solution& solution, const RunConfig& config) {
  fs::create_directories(dir);
  for (int i = 0; i < 3; ++i)
    write_obj(dir + "/sheet_" + std::to_string(i + 1) + ".obj",
              domain.sheets[i].mesh, solution.map.sheet_values(i));

  const DiagnosticsReport report =
      build_report(domain, solution.map, config.branch_threshold);

  json doc;
  doc["schema_version"] = 1;
  doc["resolution"] = {{"radial", config.radial_resolution},
                       {"angular", config.angular_resolution}};
  doc["mode"] = config.mode == GluingMode::Sliding ? "sliding" : "identity";
  doc["seed"] = config.seed;
  doc["dimension"] = solution.map.dimension();
  doc["converged"] = solution.converged;
  doc["diagnostics"] = report_json(report);
  doc["weights_c"] = to_vec(solution.weights_c.values);
  doc["weights_k"] = to_vec(solution.weights_k.values);
  auto history = json::array();
  for (const auto& rec : solution.history)
    history.push_back({{"l2_energy", rec.l2_energy},
                       {"l1_energy", rec.l1_energy},
                       {"residual", rec.residual},
                       {"gluing_moved", rec.gluing_moved}});
  doc["history"] = history;

  // Junction vertices are duplicated per sheet in the OBJ files; this block
  // maps each junction node to its duplicate vertex indices.
  json junction;
  junction["count"] = domain.junction_count;
  auto duplicates = json::array();
  for (int i = 0; i < 3; ++i) {
    std::vector<int> indices(domain.junction_count, -1);
    for (std::size_t a = 0; a < domain.sheets[i].free_boundary.size(); ++a)
      indices[domain.correspondence[i][a]] = domain.sheets[i].free_boundary[a];
    duplicates.push_back(indices);
  }
  junction["sheet_vertex_indices"] = duplicates;
  doc["junction"] = junction;

  json gluing;
  auto fixed = json::array(), free_params = json::array();
  for (int i = 0; i < 3; ++i) {
    fixed.push_back(solution.gluing.sheets[i].fixed_params);
    free_params.push_back(solution.gluing.sheets[i].free_params);
  }
  gluing["fixed_params"] = fixed;
  gluing["free_params"] = free_params;
  doc["gluing"] = gluing;

  std::ofstream out(dir + "/report.json");
  out << doc.dump(2) << "\n";
}

SolutionFiles load_solution_files(const std::string& dir) {
  std::ifstream in(dir + "/report.json");
  if (!in) throw std::runtime_error("cannot open " + dir + "/report.json");
  json doc = json::parse(in);
  SolutionFiles files;
  files.radial_resolution = doc.at("resolution").at("radial");
  files.angular_resolution = doc.at("resolution").at("angular");
  files.domain = std::make_unique<GluedDomain>(
      build_domain(files.radial_resolution, files.angular_resolution));
  const GluedDomain& domain = *files.domain;

  std::array<Eigen::MatrixXd, 3> values;
  for (int i = 0; i < 3; ++i) {
    const ObjData obj =
        read_obj(dir + "/sheet_" + std::to_string(i + 1) + ".obj");
    if (obj.positions.rows() != domain.sheets[i].vertex_count())
      throw std::runtime_error("sheet OBJ has unexpected vertex count");
    values[i] = obj.positions;
  }

  // Junction duplicates must agree across sheets before identification.
  double mismatch = 0.0;
  const auto& chain0 = domain.sheets[0].free_boundary;
  for (std::size_t a = 0; a < chain0.size(); ++a) {
    for (int i = 1; i < 3; ++i) {
      const auto& chain = domain.sheets[i].free_boundary;
      mismatch = std::max(
          mismatch,
          (values[i].row(chain[a]) - values[0].row(chain0[a])).norm());
    }
  }
  files.matching_mismatch = mismatch;
  files.map = std::make_unique<PiecewiseMap>(domain, std::move(values));
  return files;
}

int run_solve(const RunConfig& config) {
  const BoundaryGraph graph = BoundaryGraph::from_json_file(config.graph_path);
  const GluedDomain domain =
      build_domain(config.radial_resolution, config.angular_resolution);
  SolveConfig solve_config = config.solve;
  solve_config.seed = config.seed;
  solve_config.mode = config.mode;
  const Solution solution = minimize(domain, graph, solve_config);
  write_solution_files(config.out_dir, domain, solution, config);
  std::cout << (solution.converged ? "converged" : "max iterations reached")
            << "; report written to " << config.out_dir << "/report.json\n";
  return solution.converged ? 0 : 2;
}

int run_check(const std::string& solution_dir, const RunConfig& config) {
  const SolutionFiles files = load_solution_files(solution_dir);
  const DiagnosticsReport report =
      build_report(*files.domain, *files.map, config.branch_threshold);

  bool ok = true;
  auto gate = [&](const std::string& name, bool pass, double value,
                  double limit) {
    std::cout << (pass ? "ok   " : "FAIL ") << name << " = " << value
              << " (limit " << limit << ")\n";
    ok = ok && pass;
  };

  gate("matching mismatch", files.matching_mismatch <= 1e-9,
       files.matching_mismatch, 1e-9);

  double worst_angle = 0.0;
  for (const auto& angles : report.angles)
    for (double a : angles)
      if (std::isfinite(a))
        worst_angle =
            std::max(worst_angle, std::abs(a - 2.0 * M_PI / 3.0) * 180.0 / M_PI);
  gate("max angle deviation [deg]", worst_angle <= config.angle_tolerance_deg,
       worst_angle, config.angle_tolerance_deg);

  double worst_balance = 0.0;
  for (double b : report.balancing)
    if (std::isfinite(b)) worst_balance = std::max(worst_balance, b);
  gate("max balancing residual", worst_balance <= config.balancing_max,
       worst_balance, config.balancing_max);

  double worst_gap = 0.0;
  for (int i = 0; i < 3; ++i)
    if (report.energies[i] > 0.0)
      worst_gap =
          std::max(worst_gap, report.energy_area_gap[i] / report.energies[i]);
  gate("max gap/energy", worst_gap <= config.gap_ratio_max, worst_gap,
       config.gap_ratio_max);

  return ok ? 0 : 2;
}

int run_reflect(const ReflectRequest& request) {
  const SolutionFiles files = load_solution_files(request.solution_dir);
  const GluedDomain& domain = *files.domain;
  const PiecewiseMap& map = *files.map;

  int node = request.node >= 0 ? request.node : domain.junction_count / 2;
  if (node <= 0 || node >= domain.junction_count - 1)
    throw std::invalid_argument("junction node must be interior");

  // Branch rejection at the chosen node.
  const BranchReport branches =
      detect_branch_points(domain, map, request.branch_threshold);
  for (int i = 0; i < 3; ++i) {
    const int v = domain.sheets[i].free_boundary[node];
    for (const auto& b : branches.rank_zero) {
      if (b.sheet == i && b.vertex == v) {
        std::cerr << "node " << node << " is a branch point on sheet " << i + 1
                  << "; reflection undefined there\n";
        return 3;
      }
    }
  }

  std::array<Vec2, 3> centers;
  double radius = request.radius;
  for (int i = 0; i < 3; ++i) {
    centers[i] =
        domain.sheets[i].mesh.vertices[domain.sheets[i].free_boundary[node]];
    const double room = 1.0 - std::abs(centers[i].x());
    if (radius <= 0.0) radius = 0.5 * room;
    radius = std::min(radius, 0.9 * room);
  }
  if (!(radius > 0.0))
    throw std::invalid_argument("no room to sample around the chosen node");

  const SheetMesh sampler =
      build_half_disk_mesh(request.resolution, 2 * request.resolution);
  HalfDiskTriple triple;
  triple.mesh = &sampler;
  for (int i = 0; i < 3; ++i) {
    Positions values(sampler.vertex_count(), map.dimension());
    for (int v = 0; v < sampler.vertex_count(); ++v) {
      const Vec2 p = centers[i] + radius * sampler.mesh.vertices[v];
      values.row(v) =
          interpolate_map(domain.sheets[i], map.sheet_values(i), p);
    }
    triple.values[i] = std::move(values);
  }

  const ReflectedMap extended = multi_sheeted_reflect(triple, request.sheet);
  const double residual = harmonic_residual(extended);
  const double jump = axis_derivative_jump(extended);

  const std::string out = request.out_path.empty()
                              ? request.solution_dir + "/extended.obj"
                              : request.out_path;
  write_obj(out, extended.domain.mesh, extended.values);
  json cert;
  cert["harmonic_residual"] = residual;
  cert["axis_derivative_jump"] = jump;
  cert["node"] = node;
  cert["radius"] = radius;
  cert["sheet"] = request.sheet;
  const std::string cert_path =
      out.substr(0, out.find_last_of('.')) + "_certificate.json";
  std::ofstream cout_file(cert_path);
  cout_file << cert.dump(2) << "\n";
  std::cout << "extension written to " << out << " (harmonic residual "
            << residual << ")\n";
  return 0;
}

int run_bjorling(const BjorlingRequest& request) {
  AnalyticCurveData data = AnalyticCurveData::from_json_file(request.curve_path);
  validate_curve_data(data);
  const auto [eta2, eta3] = balanced_normal_triple(data);

  fs::create_directories(request.out_dir);
  json summary;
  std::array<Eigen::MatrixXd, 3> normals{data.normal, eta2, eta3};
  auto residuals = json::array();
  for (int i = 0; i < 3; ++i) {
    AnalyticCurveData sheet_data = data;
    sheet_data.normal = normals[i];
    const BjorlingPatch patch =
        bjorling_extend(sheet_data, request.half, request.options);
    auto [mesh, positions] = patch_mesh(patch);
    write_obj(request.out_dir + "/patch_" + std::to_string(i + 1) + ".obj",
              mesh, positions);
    residuals.push_back(
        {{"fit_residual", patch.fit_residual},
         {"mean_curvature_residual", patch_mean_curvature_residual(patch)}});
  }
  summary["patches"] = residuals;
  summary["half"] = request.half == HalfPlane::Plus ? "plus" : "minus";
  std::ofstream out(request.out_dir + "/bjorling.json");
  out << summary.dump(2) << "\n";
  std::cout << "three patches written to " << request.out_dir << "\n";
  return 0;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Singular Plateau solver: three minimal sheets along a free "
               "boundary"};
  app.require_subcommand(1);

  // ---- solve ----
  auto* solve_cmd = app.add_subcommand("solve", "minimize the weighted energy");
  std::string config_path, graph_path, out_dir, mode_name;
  int resolution = 0;
  long long seed = -1;
  solve_cmd->add_option("--config", config_path, "JSON config file");
  solve_cmd->add_option("--graph", graph_path, "boundary graph JSON");
  solve_cmd->add_option("--out", out_dir, "output directory");
  solve_cmd->add_option("--mode", mode_name, "identity|sliding");
  solve_cmd->add_option("--seed", seed, "deterministic seed");
  solve_cmd->add_option("--resolution", resolution,
                        "radial resolution R (angular = 2R)");

  // ---- check ----
  auto* check_cmd =
      app.add_subcommand("check", "recompute diagnostics from solution files");
  std::string check_dir, check_config;
  check_cmd->add_option("dir", check_dir, "solution directory")->required();
  check_cmd->add_option("--config", check_config, "JSON config file");

  // ---- reflect ----
  auto* reflect_cmd =
      app.add_subcommand("reflect", "multi-sheeted reflection certificate");
  ReflectRequest reflect;
  reflect_cmd->add_option("dir", reflect.solution_dir, "solution directory")
      ->required();
  int sheet_1based = 1;
  reflect_cmd->add_option("--sheet", sheet_1based, "sheet to extend (1-3)");
  reflect_cmd->add_option("--node", reflect.node, "junction node index");
  reflect_cmd->add_option("--radius", reflect.radius, "sampling radius");
  reflect_cmd->add_option("--samples", reflect.resolution,
                          "sampling mesh resolution");
  reflect_cmd->add_option("--branch-threshold", reflect.branch_threshold,
                          "relative rank threshold");
  reflect_cmd->add_option("--out", reflect.out_path, "output OBJ path");

  // ---- bjorling ----
  auto* bjorling_cmd =
      app.add_subcommand("bjorling", "balanced Schwarz extension patches");
  BjorlingRequest bjorling;
  std::string half_name = "plus";
  bjorling_cmd->add_option("curve", bjorling.curve_path, "curve JSON file")
      ->required();
  bjorling_cmd->add_option("--half", half_name, "plus|minus");
  bjorling_cmd->add_option("--degree", bjorling.options.degree, "fit degree");
  bjorling_cmd->add_option("--width", bjorling.options.width, "strip width");
  bjorling_cmd->add_option("--samples", bjorling.options.normal_samples,
                           "strip samples");
  bjorling_cmd->add_option("--threshold", bjorling.options.fit_threshold,
                           "fit residual threshold");
  bjorling_cmd->add_option("--out", bjorling.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (solve_cmd->parsed()) {
      RunConfig cfg = config_path.empty() ? RunConfig{}
                                          : RunConfig::from_json_file(config_path);
      if (!graph_path.empty()) cfg.graph_path = graph_path;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (!mode_name.empty()) {
        if (mode_name == "sliding")
          cfg.mode = GluingMode::Sliding;
        else if (mode_name == "identity")
          cfg.mode = GluingMode::Identity;
        else
          throw std::runtime_error("mode must be identity or sliding");
      }
      if (seed >= 0) cfg.seed = static_cast<unsigned>(seed);
      if (resolution > 0) {
        cfg.radial_resolution = resolution;
        cfg.angular_resolution = 2 * resolution;
      }
      if (cfg.graph_path.empty())
        throw std::runtime_error("no boundary graph given (--graph or config)");
      return run_solve(cfg);
    }
    if (check_cmd->parsed()) {
      RunConfig cfg = check_config.empty()
                          ? RunConfig{}
                          : RunConfig::from_json_file(check_config);
      return run_check(check_dir, cfg);
    }
    if (reflect_cmd->parsed()) {
      reflect.sheet = sheet_1based - 1;
      if (reflect.sheet < 0 || reflect.sheet > 2)
        throw std::runtime_error("--sheet must be 1, 2 or 3");
      return run_reflect(reflect);
    }
    if (bjorling_cmd->parsed()) {
      if (half_name == "minus")
        bjorling.half = HalfPlane::Minus;
      else if (half_name != "plus")
        throw std::runtime_error("--half must be plus or minus");
      return run_bjorling(bjorling);
    }
  } catch (const AccuracyError& e) {
    std::cerr << "error: " << e.what() << " (residual " << e.residual << ")\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace triplateau
