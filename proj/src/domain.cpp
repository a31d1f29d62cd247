#include "triplateau/domain.hpp"

#include <algorithm>
#include <cmath>

#include "triplateau/errors.hpp"

namespace triplateau {

namespace {

// Chains are stored from (-1,0) to (1,0); a reversed chain is recognized by
// the parameter x-coordinates of its endpoints and flipped in place.
void canonicalize_free_chain(SheetMesh& sheet) {
  auto& chain = sheet.free_boundary;
  const double x_first = sheet.mesh.vertices[chain.front()].x();
  const double x_last = sheet.mesh.vertices[chain.back()].x();
  if (x_first > x_last) {
    std::reverse(chain.begin(), chain.end());
    std::reverse(sheet.fixed_boundary.begin(), sheet.fixed_boundary.end());
  }
}

std::vector<double> uniform_params(std::size_t count) {
  std::vector<double> t(count);
  for (std::size_t a = 0; a < count; ++a)
    t[a] = static_cast<double>(a) / static_cast<double>(count - 1);
  return t;
}

}  // namespace

GluingData GluingData::identity(const GluedDomain& domain) {
  GluingData gluing;
  for (int i = 0; i < 3; ++i) {
    auto& gs = gluing.sheets[i];
    const auto& sheet = domain.sheets[i];
    gs.fixed_params = uniform_params(sheet.fixed_boundary.size());
    gs.free_params = uniform_params(sheet.free_boundary.size());
    // Pin the semicircle midpoint (0,1) when the chain has one.
    gs.pinned_mid = -1;
    for (std::size_t a = 0; a < sheet.fixed_boundary.size(); ++a) {
      const Vec2& p = sheet.mesh.vertices[sheet.fixed_boundary[a]];
      if (std::abs(p.x()) < 1e-12 && std::abs(p.y() - 1.0) < 1e-12) {
        gs.pinned_mid = static_cast<int>(a);
        gs.fixed_params[a] = 0.5;
      }
    }
  }
  return gluing;
}

void validate_gluing(const GluedDomain& domain, const GluingData& gluing) {
  for (int i = 0; i < 3; ++i) {
    const auto& gs = gluing.sheets[i];
    const auto check_chain = [&](const std::vector<double>& t,
                                 std::size_t expected, const char* name) {
      if (t.size() != expected)
        throw std::invalid_argument(std::string(name) +
                                    " parameter count does not match chain");
      if (std::abs(t.front()) > 1e-15 || std::abs(t.back() - 1.0) > 1e-15)
        throw std::invalid_argument(std::string(name) +
                                    " parameters must run from 0 to 1");
      for (std::size_t a = 0; a + 1 < t.size(); ++a)
        if (!(t[a + 1] > t[a]))
          throw std::invalid_argument(std::string(name) +
                                      " parameters must be strictly increasing");
    };
    check_chain(gs.fixed_params, domain.sheets[i].fixed_boundary.size(),
                "fixed");
    check_chain(gs.free_params, domain.sheets[i].free_boundary.size(), "free");
    if (gs.pinned_mid >= 0 &&
        std::abs(gs.fixed_params[gs.pinned_mid] - 0.5) > 1e-12)
      throw std::invalid_argument(
          "three point condition: pinned midpoint parameter must equal 1/2");
  }
}

GluedDomain build_glued_domain(std::array<SheetMesh, 3> sheets,
                               CorrespondencePolicy policy) {
  (void)policy;  // only Identity exists
  for (auto& sheet : sheets) {
    validate_sheet_mesh(sheet);
    canonicalize_free_chain(sheet);
  }
  const std::size_t len = sheets[0].free_boundary.size();
  for (int i = 1; i < 3; ++i) {
    if (sheets[i].free_boundary.size() != len)
      throw StructuralError(
          "identity gluing requires equal free-chain lengths, got " +
          std::to_string(sheets[i].free_boundary.size()) + " vs " +
          std::to_string(len));
  }
  std::array<std::vector<int>, 3> corr;
  for (int i = 0; i < 3; ++i) {
    corr[i].resize(len);
    for (std::size_t a = 0; a < len; ++a) corr[i][a] = static_cast<int>(a);
  }
  GluedDomain domain{std::move(sheets), std::move(corr),
                     static_cast<int>(len)};
  return domain;
}

GluedDomain build_glued_domain(std::array<SheetMesh, 3> sheets,
                               std::array<std::vector<int>, 3> correspondence) {
  for (auto& sheet : sheets) {
    validate_sheet_mesh(sheet);
    canonicalize_free_chain(sheet);
  }
  int junction_count = 0;
  for (int i = 0; i < 3; ++i) {
    const auto& c = correspondence[i];
    if (c.size() != sheets[i].free_boundary.size())
      throw std::invalid_argument("correspondence length must match chain");
    for (std::size_t a = 0; a + 1 < c.size(); ++a)
      if (c[a + 1] < c[a])
        throw std::invalid_argument("correspondence must be monotone");
    junction_count = std::max(junction_count, c.back() + 1);
  }
  for (int i = 0; i < 3; ++i) {
    if (correspondence[i].front() != 0 ||
        correspondence[i].back() != junction_count - 1)
      throw std::invalid_argument(
          "all chains must map onto the same junction endpoints");
  }
  return GluedDomain{std::move(sheets), std::move(correspondence),
                     junction_count};
}

Eigen::MatrixXd sample_boundary_targets(const BoundaryGraph& graph,
                                        const GluingData& gluing, int sheet) {
  const auto& t = gluing.sheets[sheet].fixed_params;
  Eigen::MatrixXd targets(t.size(), graph.dimension());
  for (std::size_t a = 0; a < t.size(); ++a)
    targets.row(a) = graph.point_at(sheet, t[a]);
  return targets;
}

std::array<std::vector<FreeTie>, 3> identity_ties(const GluedDomain& domain) {
  std::array<std::vector<FreeTie>, 3> ties;
  for (int i = 0; i < 3; ++i) {
    const auto& corr = domain.correspondence[i];
    ties[i].resize(corr.size());
    for (std::size_t a = 0; a < corr.size(); ++a)
      ties[i][a] = FreeTie{corr[a], corr[a], 0.0};
  }
  return ties;
}

std::array<std::vector<FreeTie>, 3> sliding_ties(const GluedDomain& domain,
                                                 const GluingData& gluing) {
  std::array<std::vector<FreeTie>, 3> ties;
  const int last = domain.junction_count - 1;
  for (int i = 0; i < 3; ++i) {
    const auto& params = gluing.sheets[i].free_params;
    ties[i].resize(params.size());
    for (std::size_t a = 0; a < params.size(); ++a) {
      const double s = params[a] * last;
      int node0 = std::clamp(static_cast<int>(std::floor(s)), 0, last - 1);
      ties[i][a] = FreeTie{node0, node0 + 1, s - node0};
    }
  }
  return ties;
}

PiecewiseMap::PiecewiseMap(const GluedDomain& domain,
                           std::array<Eigen::MatrixXd, 3> sheet_values,
                           std::optional<Eigen::MatrixXd> junction,
                           std::optional<std::array<std::vector<FreeTie>, 3>> ties)
    : domain_(&domain),
      values_(std::move(sheet_values)),
      ties_(ties ? std::move(*ties) : identity_ties(domain)) {
  const int n = static_cast<int>(values_[0].cols());
  for (int i = 0; i < 3; ++i) {
    if (values_[i].rows() != domain.sheets[i].vertex_count() ||
        values_[i].cols() != n)
      throw std::invalid_argument("sheet value matrix has wrong shape");
  }
  if (junction) {
    junction_ = std::move(*junction);
    if (junction_.rows() != domain.junction_count || junction_.cols() != n)
      throw std::invalid_argument("junction matrix has wrong shape");
  } else {
    junction_.setZero(domain.junction_count, n);
    const auto& chain = domain.sheets[0].free_boundary;
    for (std::size_t a = 0; a < chain.size(); ++a)
      junction_.row(domain.correspondence[0][a]) = values_[0].row(chain[a]);
  }
  // Mirror the shared storage into every sheet; matching becomes exact.
  for (int i = 0; i < 3; ++i) {
    const auto& chain = domain.sheets[i].free_boundary;
    for (std::size_t a = 0; a < chain.size(); ++a) {
      const FreeTie& tie = ties_[i][a];
      values_[i].row(chain[a]) = (1.0 - tie.w1) * junction_.row(tie.node0) +
                                 tie.w1 * junction_.row(tie.node1);
    }
  }
}

PiecewiseMap PiecewiseMap::constant(const GluedDomain& domain,
                                    const Eigen::VectorXd& point) {
  std::array<Eigen::MatrixXd, 3> values;
  for (int i = 0; i < 3; ++i)
    values[i] = point.transpose().replicate(domain.sheets[i].vertex_count(), 1);
  return PiecewiseMap(domain, std::move(values));
}

PiecewiseMap PiecewiseMap::lerp(const PiecewiseMap& a, const PiecewiseMap& b,
                                double t) {
  if (a.domain_ != b.domain_ || a.dimension() != b.dimension())
    throw std::invalid_argument("maps live on different domains");
  std::array<Eigen::MatrixXd, 3> values;
  for (int i = 0; i < 3; ++i)
    values[i] = (1.0 - t) * a.values_[i] + t * b.values_[i];
  Eigen::MatrixXd junction = (1.0 - t) * a.junction_ + t * b.junction_;
  return PiecewiseMap(*a.domain_, std::move(values), std::move(junction),
                      a.ties_);
}

}  // namespace triplateau
