#pragma once

#include <Eigen/Core>
#include <array>
#include <string>

namespace triplateau {

// The fixed boundary of the problem: three polyline arcs in R^n sharing
// their two endpoints.  Arc-length along each polyline is piecewise linear,
// so evaluation at a fraction is exact and resolution-controlled.
class BoundaryGraph {
 public:
  // Each arc is a (samples x n) matrix; all arcs must share their first row
  // (q_minus) and their last row (q_plus).
  explicit BoundaryGraph(std::array<Eigen::MatrixXd, 3> arcs);

  static BoundaryGraph from_json_file(const std::string& path);
  static BoundaryGraph from_json_text(const std::string& text);

  int dimension() const { return static_cast<int>(arcs_[0].cols()); }
  const Eigen::MatrixXd& arc(int i) const { return arcs_[i]; }
  Eigen::VectorXd q_minus() const { return arcs_[0].row(0); }
  Eigen::VectorXd q_plus() const { return arcs_[0].row(arcs_[0].rows() - 1); }
  double arc_length(int i) const { return lengths_[i].tail(1)(0); }

  // Point of arc i at arc-length fraction t in [0,1]; clamps outside.
  Eigen::VectorXd point_at(int i, double t) const;

  // d(point)/dt by a symmetric difference of point_at; smooth segments are
  // exact, kinks get the average of the two one-sided slopes.
  Eigen::VectorXd derivative_at(int i, double t, double h = 1e-6) const;

 private:
  std::array<Eigen::MatrixXd, 3> arcs_;
  std::array<Eigen::VectorXd, 3> lengths_;  // cumulative, lengths_[i][0] = 0
};

}  // namespace triplateau
