#pragma once

#include <memory>
#include <string>

#include "triplateau/reflection.hpp"
#include "triplateau/solver.hpp"

namespace triplateau {

struct RunConfig {
  std::string graph_path;
  int radial_resolution = 16;
  int angular_resolution = 32;
  GluingMode mode = GluingMode::Identity;
  unsigned seed = 0;
  std::string out_dir = "out";
  SolveConfig solve;
  // cmd_check thresholds
  double angle_tolerance_deg = 1.0;
  double balancing_max = 0.02;
  double gap_ratio_max = 0.02;
  double branch_threshold = 1e-6;

  static RunConfig from_json_file(const std::string& path);
};

// Exit codes: 0 ok, 1 input/IO error, 2 not converged / thresholds failed,
// 3 branch-point rejection, 4 fit accuracy failure.
int run_solve(const RunConfig& config);
int run_check(const std::string& solution_dir, const RunConfig& config);

struct ReflectRequest {
  std::string solution_dir;
  int sheet = 0;
  int node = -1;         // -1: middle junction node
  double radius = 0.0;   // 0: automatic
  int resolution = 12;   // sampling half-disk resolution
  double branch_threshold = 1e-6;
  std::string out_path;  // defaults to <dir>/extended.obj
};
int run_reflect(const ReflectRequest& request);

struct BjorlingRequest {
  std::string curve_path;
  HalfPlane half = HalfPlane::Plus;
  BjorlingOptions options;
  std::string out_dir = "out";
};
int run_bjorling(const BjorlingRequest& request);

// Full command-line entry point (solve/check/reflect/bjorling).
int run_cli(int argc, char** argv);

// Solution round trip shared by solve, check and reflect.
struct SolutionFiles {
  std::unique_ptr<GluedDomain> domain;
  std::unique_ptr<PiecewiseMap> map;
  int radial_resolution = 0;
  int angular_resolution = 0;
  double matching_mismatch = 0.0;  // from the OBJ read-back
};
void write_solution_files(const std::string& dir, const GluedDomain& domain,
                          const Solution& solution,
                          const RunConfig& config);
SolutionFiles load_solution_files(const std::string& dir);

}  // namespace triplateau
