#include "triplateau/boundary_graph.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "triplateau/errors.hpp"

namespace triplateau {

BoundaryGraph::BoundaryGraph(std::array<Eigen::MatrixXd, 3> arcs)
    : arcs_(std::move(arcs)) {
  const int n = static_cast<int>(arcs_[0].cols());
  for (int i = 0; i < 3; ++i) {
    if (arcs_[i].rows() < 2)
      throw std::invalid_argument("arc " + std::to_string(i) +
                                  " needs at least two samples");
    if (arcs_[i].cols() != n)
      throw std::invalid_argument("arcs must share the ambient dimension");
    if (!arcs_[i].allFinite())
      throw std::invalid_argument("arc samples must be finite");
  }
  const double scale = std::max(1.0, arcs_[0].cwiseAbs().maxCoeff());
  for (int i = 1; i < 3; ++i) {
    if ((arcs_[i].row(0) - arcs_[0].row(0)).norm() > 1e-12 * scale ||
        (arcs_[i].row(arcs_[i].rows() - 1) -
         arcs_[0].row(arcs_[0].rows() - 1))
                .norm() > 1e-12 * scale)
      throw std::invalid_argument("arcs must share endpoints q- and q+");
  }
  for (int i = 0; i < 3; ++i) {
    const auto& a = arcs_[i];
    Eigen::VectorXd cum(a.rows());
    cum(0) = 0.0;
    for (int s = 1; s < a.rows(); ++s) {
      const double seg = (a.row(s) - a.row(s - 1)).norm();
      if (!(seg > 0.0))
        throw std::invalid_argument("arc " + std::to_string(i) +
                                    " has a zero-length segment");
      cum(s) = cum(s - 1) + seg;
    }
    if (!(cum(a.rows() - 1) > 0.0))
      throw std::invalid_argument("arc has zero total length");
    lengths_[i] = cum;
  }
}

BoundaryGraph BoundaryGraph::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open boundary graph: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text);
}

BoundaryGraph BoundaryGraph::from_json_text(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  if (!doc.contains("arcs") || !doc["arcs"].is_array() ||
      doc["arcs"].size() != 3)
    throw std::runtime_error("boundary graph JSON must contain three arcs");
  const int n = doc.value("dimension", 3);
  std::array<Eigen::MatrixXd, 3> arcs;
  for (int i = 0; i < 3; ++i) {
    const auto& arr = doc["arcs"][i];
    Eigen::MatrixXd m(arr.size(), n);
    for (std::size_t s = 0; s < arr.size(); ++s) {
      if (static_cast<int>(arr[s].size()) != n)
        throw std::runtime_error("arc point has wrong dimension");
      for (int c = 0; c < n; ++c) m(static_cast<int>(s), c) = arr[s][c];
    }
    arcs[i] = std::move(m);
  }
  return BoundaryGraph(std::move(arcs));
}

Eigen::VectorXd BoundaryGraph::point_at(int i, double t) const {
  const auto& a = arcs_[i];
  const auto& cum = lengths_[i];
  const double target = std::clamp(t, 0.0, 1.0) * cum(cum.size() - 1);
  // First segment whose cumulative end reaches the target.
  int lo = 0, hi = static_cast<int>(cum.size()) - 1;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (cum(mid) < target ? lo : hi) = mid;
  }
  const double seg = cum(hi) - cum(lo);
  const double w = seg > 0.0 ? (target - cum(lo)) / seg : 0.0;
  return (1.0 - w) * a.row(lo).transpose() + w * a.row(hi).transpose();
}

Eigen::VectorXd BoundaryGraph::derivative_at(int i, double t, double h) const {
  const double t0 = std::clamp(t - h, 0.0, 1.0);
  const double t1 = std::clamp(t + h, 0.0, 1.0);
  if (!(t1 > t0)) return Eigen::VectorXd::Zero(dimension());
  return (point_at(i, t1) - point_at(i, t0)) / (t1 - t0);
}

}  // namespace triplateau
