#include "triplateau/energy.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "triplateau/errors.hpp"

namespace triplateau {

WeightVector WeightVector::l2(std::array<double, 3> c) {
  const double sum = c[0] + c[1] + c[2];
  if (std::abs(sum - 1.0) > 1e-9 || c[0] < 0 || c[1] < 0 || c[2] < 0)
    throw std::invalid_argument("l2 weights must lie on the simplex");
  return WeightVector{Mode::L2, c};
}

WeightVector WeightVector::l1(std::array<double, 3> k) {
  if (!(k[0] > 0 && k[1] > 0 && k[2] > 0))
    throw std::invalid_argument("l1 weights must be strictly positive");
  return WeightVector{Mode::L1, k};
}

double dirichlet_energy(const SheetMesh& sheet, const Positions& positions) {
  if (positions.rows() != sheet.vertex_count())
    throw std::invalid_argument("positions must cover every vertex");
  double energy = 0.0;
  for (int t = 0; t < sheet.triangle_count(); ++t) {
    const Eigen::MatrixXd g = triangle_gradient(sheet.mesh, t, positions);
    energy += signed_area(sheet.mesh, t) * g.squaredNorm();
  }
  return energy;
}

double area(const SheetMesh& sheet, const Positions& positions) {
  if (positions.rows() != sheet.vertex_count())
    throw std::invalid_argument("positions must cover every vertex");
  double total = 0.0;
  for (int t = 0; t < sheet.triangle_count(); ++t) {
    const Eigen::MatrixXd g = triangle_gradient(sheet.mesh, t, positions);
    const double gxx = g.row(0).squaredNorm();
    const double gyy = g.row(1).squaredNorm();
    const double gxy = g.row(0).dot(g.row(1));
    total += signed_area(sheet.mesh, t) *
             std::sqrt(std::max(0.0, gxx * gyy - gxy * gxy));
  }
  return total;
}

EnergyTriple sheet_energies(const GluedDomain& domain, const PiecewiseMap& map) {
  EnergyTriple e;
  for (int i = 0; i < 3; ++i)
    e[i] = dirichlet_energy(domain.sheets[i], map.sheet_values(i));
  return e;
}

EnergyTriple sheet_areas(const GluedDomain& domain, const PiecewiseMap& map) {
  EnergyTriple a;
  for (int i = 0; i < 3; ++i)
    a[i] = area(domain.sheets[i], map.sheet_values(i));
  return a;
}

double l2_energy(const EnergyTriple& energies, const WeightVector& c) {
  if (c.mode != WeightVector::Mode::L2)
    throw std::invalid_argument("l2_energy expects l2 weights");
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (c[i] != 0.0) {
      sum += energies[i] * energies[i] / c[i];
    } else if (energies[i] != 0.0) {
      return std::numeric_limits<double>::infinity();  // incompatible
    }
  }
  return std::sqrt(sum);
}

double l1_energy(const EnergyTriple& energies, const WeightVector& k) {
  if (k.mode != WeightVector::Mode::L1)
    throw std::invalid_argument("l1_energy expects l1 weights");
  if (!(k[0] > 0 && k[1] > 0 && k[2] > 0))
    throw std::invalid_argument("l1 weights must be strictly positive");
  return k[0] * energies[0] + k[1] * energies[1] + k[2] * energies[2];
}

WeightVector optimal_weights(const EnergyTriple& energies) {
  const double sum = energies.total();
  if (!(sum > 0.0))
    throw DegenerateMapError("all sheet energies vanish; weights undefined");
  return WeightVector{WeightVector::Mode::L2,
                      {energies[0] / sum, energies[1] / sum, energies[2] / sum}};
}

WeightVector weights_l1_to_l2(const WeightVector& k,
                              const EnergyTriple& energies) {
  if (k.mode != WeightVector::Mode::L1)
    throw std::invalid_argument("expected l1 weights");
  if (!(k[0] > 0 && k[1] > 0 && k[2] > 0))
    throw std::invalid_argument("l1 weights must be strictly positive");
  const double denom =
      energies[0] / k[0] + energies[1] / k[1] + energies[2] / k[2];
  if (!(denom > 0.0))
    throw DegenerateMapError("all sheet energies vanish; weights undefined");
  return WeightVector{WeightVector::Mode::L2,
                      {energies[0] / (k[0] * denom),
                       energies[1] / (k[1] * denom),
                       energies[2] / (k[2] * denom)}};
}

WeightVector weights_l2_to_l1(const WeightVector& c,
                              const EnergyTriple& energies) {
  if (c.mode != WeightVector::Mode::L2)
    throw std::invalid_argument("expected l2 weights");
  for (int i = 0; i < 3; ++i) {
    if (!(c[i] > 0.0))
      throw std::invalid_argument(
          "weights_l2_to_l1 needs strictly positive c (system degenerates)");
    if (!(energies[i] > 0.0))
      throw std::invalid_argument(
          "weights_l2_to_l1 needs strictly positive energies");
  }
  // (C - I)x = 0 where every column of C equals c.
  Eigen::Matrix3d m;
  for (int col = 0; col < 3; ++col)
    for (int row = 0; row < 3; ++row)
      m(row, col) = c[row] - (row == col ? 1.0 : 0.0);
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullV);
  Eigen::Vector3d x = svd.matrixV().col(2);  // null direction
  if (x.sum() < 0.0) x = -x;
  if (!(x.minCoeff() > 0.0))
    throw NumericalError("null vector of (C-I) is not positive",
                         x.minCoeff());
  std::array<double, 3> k{energies[0] / x(0), energies[1] / x(1),
                          energies[2] / x(2)};
  const double kmin = std::min({k[0], k[1], k[2]});
  for (double& v : k) v /= kmin;
  return WeightVector{WeightVector::Mode::L1, k};
}

}  // namespace triplateau
