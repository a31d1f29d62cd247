#pragma once

#include <array>
#include <optional>
#include <vector>

#include "triplateau/boundary_graph.hpp"
#include "triplateau/mesh.hpp"

namespace triplateau {

struct GluedDomain;

// Discrete boundary reparameterization of one sheet.
//
// fixed_params[a] is the arc-length fraction of the boundary graph assigned
// to fixed-chain vertex a; free_params[a] is the normalized position along
// the junction chain assigned to free-chain vertex a.  Both are strictly
// increasing with endpoints pinned at 0 and 1.  The three point condition
// additionally pins the parameter of the semicircle midpoint (0,1), when
// that vertex exists, to 1/2.
struct SheetGluing {
  std::vector<double> fixed_params;
  std::vector<double> free_params;
  int pinned_mid = -1;  // index into fixed_params pinned at 1/2, or -1
};

struct GluingData {
  std::array<SheetGluing, 3> sheets;

  // Uniform parameters (constant-speed boundary condition, identity free
  // correspondence); the discrete counterpart of Phi = Id.
  static GluingData identity(const GluedDomain& domain);
};

// Throws std::invalid_argument unless every parameter chain is strictly
// increasing with endpoints 0 and 1 (discrete non-singularity) and pinned
// midpoints hold their value.
void validate_gluing(const GluedDomain& domain, const GluingData& gluing);

enum class CorrespondencePolicy { Identity };

// The quotient complex: three sheets whose free chains are identified with
// a single chain of junction nodes.
struct GluedDomain {
  std::array<SheetMesh, 3> sheets;
  // correspondence[i][a] = junction node of free-chain position a of sheet i.
  std::array<std::vector<int>, 3> correspondence;
  int junction_count = 0;

  int free_chain_length(int i) const {
    return static_cast<int>(sheets[i].free_boundary.size());
  }
};

// Glues three sheets.  Under the identity policy all free chains must have
// equal length; a chain stored in the reversed orientation (detected from
// its endpoint parameter coordinates) is flipped before gluing.
GluedDomain build_glued_domain(std::array<SheetMesh, 3> sheets,
                               CorrespondencePolicy policy);

// Explicit monotone correspondences (one junction node per free-chain
// position, weakly covering the node range in order).
GluedDomain build_glued_domain(std::array<SheetMesh, 3> sheets,
                               std::array<std::vector<int>, 3> correspondence);

// Boundary targets for one sheet: the point of arc `sheet` at the arc-length
// fraction carried by each fixed-chain vertex.  Row a corresponds to
// fixed_boundary[a]; the first/last rows equal q-/q+.
Eigen::MatrixXd sample_boundary_targets(const BoundaryGraph& graph,
                                        const GluingData& gluing, int sheet);

// Attachment of one free-chain vertex to the junction chain: the vertex
// position is (1-w1)*J[node0] + w1*J[node1] with node1 = node0 + 1 (or a
// one-hot tie when w1 = 0).
struct FreeTie {
  int node0 = 0;
  int node1 = 0;
  double w1 = 0.0;
};

// One-hot ties following the stored correspondence.
std::array<std::vector<FreeTie>, 3> identity_ties(const GluedDomain& domain);

// Interpolating ties derived from the gluing's free-chain parameters
// (sliding correspondence along the junction chain).
std::array<std::vector<FreeTie>, 3> sliding_ties(const GluedDomain& domain,
                                                 const GluingData& gluing);

// A map of the glued complex into R^n.  Junction node positions are stored
// once and mirrored into each sheet, so the matching condition holds exactly
// by construction.  Immutable after construction.
class PiecewiseMap {
 public:
  // sheet_values rows follow each sheet's vertex order; free-chain rows are
  // overwritten from the junction storage (taken from sheet 0 when
  // `junction` is absent) through `ties` (identity ties when absent).
  PiecewiseMap(const GluedDomain& domain,
               std::array<Eigen::MatrixXd, 3> sheet_values,
               std::optional<Eigen::MatrixXd> junction = std::nullopt,
               std::optional<std::array<std::vector<FreeTie>, 3>> ties =
                   std::nullopt);

  static PiecewiseMap constant(const GluedDomain& domain,
                               const Eigen::VectorXd& point);

  int dimension() const { return static_cast<int>(junction_.cols()); }
  const GluedDomain& domain() const { return *domain_; }
  const Eigen::MatrixXd& sheet_values(int i) const { return values_[i]; }
  const Eigen::MatrixXd& junction_positions() const { return junction_; }

  // Affine interpolation between two maps over the same domain.
  static PiecewiseMap lerp(const PiecewiseMap& a, const PiecewiseMap& b,
                           double t);

  const std::array<std::vector<FreeTie>, 3>& ties() const { return ties_; }

 private:
  const GluedDomain* domain_;
  std::array<Eigen::MatrixXd, 3> values_;
  Eigen::MatrixXd junction_;
  std::array<std::vector<FreeTie>, 3> ties_;
};

}  // namespace triplateau
