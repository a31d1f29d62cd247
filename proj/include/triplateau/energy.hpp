#pragma once

#include <array>

#include "triplateau/domain.hpp"
#include "triplateau/mesh.hpp"

namespace triplateau {

// Per-sheet Dirichlet energies E(alpha_i).
struct EnergyTriple {
  std::array<double, 3> values{0.0, 0.0, 0.0};
  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }
  double total() const { return values[0] + values[1] + values[2]; }
};

struct WeightVector {
  enum class Mode { L2, L1 };
  Mode mode = Mode::L2;
  std::array<double, 3> values{1.0 / 3, 1.0 / 3, 1.0 / 3};
  double operator[](int i) const { return values[i]; }

  // Validating constructors: L2 weights live on the simplex, L1 weights are
  // strictly positive.
  static WeightVector l2(std::array<double, 3> c);
  static WeightVector l1(std::array<double, 3> k);
};

// Exact Dirichlet energy of the piecewise-linear map with the convention
// E = \int (|a_x|^2 + |a_y|^2) dx dy (no 1/2); zero iff constant on a
// connected mesh.  Throws DegenerateTriangleError on a zero-area triangle.
double dirichlet_energy(const SheetMesh& sheet, const Positions& positions);

// Mapped area: per triangle, the area of the affine image in R^n.
double area(const SheetMesh& sheet, const Positions& positions);

EnergyTriple sheet_energies(const GluedDomain& domain, const PiecewiseMap& map);
EnergyTriple sheet_areas(const GluedDomain& domain, const PiecewiseMap& map);

// (sum_{c_i != 0} E_i^2 / c_i)^(1/2), or +infinity when some E_i > 0 has
// c_i = 0 (the incompatible branch).
double l2_energy(const EnergyTriple& energies, const WeightVector& c);

// sum k_i E_i.
double l1_energy(const EnergyTriple& energies, const WeightVector& k);

// c_i = E_i / sum_j E_j; throws DegenerateMapError when all energies vanish.
WeightVector optimal_weights(const EnergyTriple& energies);

// c_i = E_i / (k_i sum_j E_j/k_j): the l2 weight whose minimizer coincides
// with the k-weighted l1 minimizer.
WeightVector weights_l1_to_l2(const WeightVector& k,
                              const EnergyTriple& energies);

// Solves (C - I)x = 0 with C the rank-one matrix whose columns all equal c,
// then k_i = E_i / x_i, normalized so min k_i = 1.  Requires strictly
// positive c and E.
WeightVector weights_l2_to_l1(const WeightVector& c,
                              const EnergyTriple& energies);

}  // namespace triplateau
