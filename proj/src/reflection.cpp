#include "triplateau/reflection.hpp"

#include <Eigen/Geometry>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <json.hpp>
#include <map>

#include "triplateau/errors.hpp"

namespace triplateau {

void validate_triple(const HalfDiskTriple& triple) {
  if (!triple.mesh) throw std::invalid_argument("triple has no mesh");
  const auto& sheet = *triple.mesh;
  for (int v : sheet.free_boundary) {
    if (std::abs(sheet.mesh.vertices[v].y()) > 1e-13)
      throw std::invalid_argument(
          "free chain must lie on the x-axis for reflection");
  }
  double scale = 1.0;
  for (int i = 0; i < 3; ++i) {
    if (triple.values[i].rows() != sheet.vertex_count())
      throw std::invalid_argument("triple values have wrong shape");
    scale = std::max(scale, triple.values[i].cwiseAbs().maxCoeff());
  }
  for (int v : sheet.free_boundary) {
    for (int i = 1; i < 3; ++i) {
      if ((triple.values[i].row(v) - triple.values[0].row(v)).norm() >
          1e-12 * scale)
        throw std::invalid_argument("triple values do not match along I");
    }
  }
}

DoubledMesh double_across_axis(const SheetMesh& sheet) {
  DoubledMesh doubled;
  const auto& mesh = sheet.mesh;
  doubled.mesh.vertices = mesh.vertices;
  doubled.source_vertex.resize(mesh.vertex_count());
  doubled.mirrored.assign(mesh.vertex_count(), false);
  for (int v = 0; v < mesh.vertex_count(); ++v) doubled.source_vertex[v] = v;

  std::vector<bool> on_axis(mesh.vertex_count(), false);
  for (int v : sheet.free_boundary) on_axis[v] = true;

  std::vector<int> mirror(mesh.vertex_count(), -1);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (on_axis[v]) {
      mirror[v] = v;
      continue;
    }
    mirror[v] = doubled.mesh.vertex_count();
    doubled.mesh.vertices.emplace_back(mesh.vertices[v].x(),
                                       -mesh.vertices[v].y());
    doubled.source_vertex.push_back(v);
    doubled.mirrored.push_back(true);
  }

  doubled.mesh.triangles = mesh.triangles;
  for (const auto& tri : mesh.triangles)
    doubled.mesh.triangles.push_back(
        {mirror[tri[0]], mirror[tri[2]], mirror[tri[1]]});
  doubled.axis_vertices = sheet.free_boundary;
  return doubled;
}

ReflectedMap multi_sheeted_reflect(const HalfDiskTriple& triple, int sheet) {
  if (sheet < 0 || sheet > 2) throw std::invalid_argument("sheet out of range");
  validate_triple(triple);
  DoubledMesh doubled = double_across_axis(*triple.mesh);
  const int n = static_cast<int>(triple.values[0].cols());
  Positions values(doubled.mesh.vertex_count(), n);
  for (int v = 0; v < doubled.mesh.vertex_count(); ++v) {
    const int u = doubled.source_vertex[v];
    if (!doubled.mirrored[v]) {
      values.row(v) = triple.values[sheet].row(u);
    } else {
      values.row(v) = -triple.values[sheet].row(u) +
                      (2.0 / 3.0) * (triple.values[0].row(u) +
                                     triple.values[1].row(u) +
                                     triple.values[2].row(u));
    }
  }
  return ReflectedMap{std::move(doubled), std::move(values)};
}

double harmonic_residual(const TriMesh& mesh, const Positions& values) {
  const Eigen::SparseMatrix<double> stiff = stiffness_matrix(mesh);
  const Eigen::MatrixXd weak = stiff * values;
  const auto boundary = boundary_vertex_mask(mesh);

  std::vector<double> edge_scale(mesh.vertex_count(), 0.0);
  std::vector<int> edge_count(mesh.vertex_count(), 0);
  for (const auto& tri : mesh.triangles) {
    for (int a = 0; a < 3; ++a) {
      const int p = tri[a], q = tri[(a + 1) % 3];
      const double len = (mesh.vertices[p] - mesh.vertices[q]).norm();
      edge_scale[p] += len;
      edge_scale[q] += len;
      ++edge_count[p];
      ++edge_count[q];
    }
  }
  double residual = 0.0;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (boundary[v] || edge_count[v] == 0) continue;
    const double scale = edge_scale[v] / edge_count[v];
    residual = std::max(residual, weak.row(v).norm() / scale);
  }
  return residual;
}

double axis_derivative_jump(const ReflectedMap& map) {
  const auto& mesh = map.domain.mesh;
  const int n = static_cast<int>(map.values.cols());
  // Area-weighted y-derivative per axis vertex, separately per side.
  std::map<int, Eigen::VectorXd> upper, lower;
  std::map<int, double> upper_w, lower_w;
  for (int v : map.domain.axis_vertices) {
    upper[v] = Eigen::VectorXd::Zero(n);
    lower[v] = Eigen::VectorXd::Zero(n);
    upper_w[v] = lower_w[v] = 0.0;
  }
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangles[t];
    const bool is_lower = map.domain.mirrored[tri[0]] ||
                          map.domain.mirrored[tri[1]] ||
                          map.domain.mirrored[tri[2]];
    const Eigen::MatrixXd g = triangle_gradient(mesh, t, map.values);
    const double a = signed_area(mesh, t);
    for (int corner : tri) {
      auto it = upper.find(corner);
      if (it == upper.end()) continue;
      if (is_lower) {
        lower[corner] += a * g.row(1).transpose();
        lower_w[corner] += a;
      } else {
        it->second += a * g.row(1).transpose();
        upper_w[corner] += a;
      }
    }
  }
  double jump = 0.0;
  const auto& axis = map.domain.axis_vertices;
  for (std::size_t i = 1; i + 1 < axis.size(); ++i) {
    const int v = axis[i];
    if (!(upper_w[v] > 0.0) || !(lower_w[v] > 0.0)) continue;
    jump = std::max(
        jump, (upper[v] / upper_w[v] - lower[v] / lower_w[v]).norm());
  }
  return jump;
}

AnalyticCurveData AnalyticCurveData::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open curve file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text);
}

AnalyticCurveData AnalyticCurveData::from_json_text(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  AnalyticCurveData data;
  data.t = doc.at("t").get<std::vector<double>>();
  const auto& g = doc.at("gamma");
  const auto& nrm = doc.at("normal");
  if (g.size() != data.t.size() || nrm.size() != data.t.size())
    throw std::runtime_error("t, gamma, normal must have equal lengths");
  data.gamma.resize(data.t.size(), 3);
  data.normal.resize(data.t.size(), 3);
  for (std::size_t i = 0; i < data.t.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      data.gamma(static_cast<int>(i), c) = g[i].at(c);
      data.normal(static_cast<int>(i), c) = nrm[i].at(c);
    }
  }
  return data;
}

namespace {

Eigen::MatrixXd sample_tangents(const AnalyticCurveData& data) {
  const int m = static_cast<int>(data.t.size());
  Eigen::MatrixXd tangents(m, 3);
  for (int i = 0; i < m; ++i) {
    const int lo = std::max(0, i - 1), hi = std::min(m - 1, i + 1);
    tangents.row(i) =
        (data.gamma.row(hi) - data.gamma.row(lo)) / (data.t[hi] - data.t[lo]);
  }
  return tangents;
}

}  // namespace

void validate_curve_data(const AnalyticCurveData& data,
                         double orthogonality_tol) {
  const int m = static_cast<int>(data.t.size());
  if (m < 4) throw std::invalid_argument("curve needs at least four samples");
  if (data.gamma.rows() != m || data.normal.rows() != m ||
      data.gamma.cols() != 3 || data.normal.cols() != 3)
    throw std::invalid_argument("curve data shapes do not match");
  for (int i = 1; i < m; ++i)
    if (!(data.t[i] > data.t[i - 1]))
      throw std::invalid_argument("parameters must be strictly increasing");
  const Eigen::MatrixXd tangents = sample_tangents(data);
  for (int i = 0; i < m; ++i) {
    if (std::abs(data.normal.row(i).norm() - 1.0) > 1e-10)
      throw std::invalid_argument("normal field must be unit length");
    const double speed = tangents.row(i).norm();
    if (!(speed > 0.0)) throw std::invalid_argument("zero tangent sample");
    // One-sided stencils at the ends are only first order; check interior.
    if (i > 0 && i + 1 < m &&
        std::abs(data.normal.row(i).dot(tangents.row(i))) >
            orthogonality_tol * speed)
      throw std::invalid_argument("normal field is not orthogonal to the curve");
  }
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> balanced_normal_triple(
    const AnalyticCurveData& data) {
  validate_curve_data(data);
  const Eigen::MatrixXd tangents = sample_tangents(data);
  const int m = static_cast<int>(data.t.size());
  Eigen::MatrixXd eta2(m, 3), eta3(m, 3);
  const double c = std::cos(2.0 * M_PI / 3.0), s = std::sin(2.0 * M_PI / 3.0);
  for (int i = 0; i < m; ++i) {
    const Eigen::Vector3d axis = tangents.row(i).normalized();
    Eigen::Vector3d v = data.normal.row(i);
    v -= v.dot(axis) * axis;  // exact orthogonality => exact cancellation
    v.normalize();
    const Eigen::Vector3d av = axis.cross(v);
    eta2.row(i) = c * v + s * av;
    eta3.row(i) = c * v - s * av;
  }
  return {std::move(eta2), std::move(eta3)};
}

// ---- Chebyshev machinery ---------------------------------------------------
namespace cheb {

using Complex = std::complex<double>;

// Least-squares Chebyshev fit of (x, y) samples with x already in [-1, 1].
Eigen::VectorXd fit(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                    int degree) {
  Eigen::MatrixXd design(x.size(), degree + 1);
  for (int r = 0; r < x.size(); ++r) {
    double tkm1 = 1.0, tk = x(r);
    design(r, 0) = 1.0;
    if (degree >= 1) design(r, 1) = tk;
    for (int k = 2; k <= degree; ++k) {
      const double tkp1 = 2.0 * x(r) * tk - tkm1;
      design(r, k) = tkp1;
      tkm1 = tk;
      tk = tkp1;
    }
  }
  return design.colPivHouseholderQr().solve(y);
}

// Clenshaw evaluation at a complex argument.
Complex evaluate(const Eigen::VectorXd& c, Complex xi) {
  Complex b1 = 0.0, b2 = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) {
    const Complex b0 = 2.0 * xi * b1 - b2 + c(k);
    b2 = b1;
    b1 = b0;
  }
  return xi * b1 - b2 + c(0);
}

// Coefficients of the derivative (with respect to xi).
Eigen::VectorXd derivative(const Eigen::VectorXd& c) {
  const int n = static_cast<int>(c.size());
  if (n <= 1) return Eigen::VectorXd::Zero(1);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n - 1);
  double next = 0.0, next2 = 0.0;  // d_{k+1}, d_{k+2}
  for (int k = n - 2; k >= 0; --k) {
    const double dk = next2 + 2.0 * (k + 1) * c(k + 1);
    next2 = next;
    next = dk;
    d(k) = dk;
  }
  d(0) *= 0.5;
  return d;
}

// Product of two series via T_m T_n = (T_{m+n} + T_{|m-n|}) / 2.
Eigen::VectorXd product(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(a.size() + b.size() - 1);
  for (int i = 0; i < a.size(); ++i) {
    for (int j = 0; j < b.size(); ++j) {
      const double half = 0.5 * a(i) * b(j);
      p(i + j) += half;
      p(std::abs(i - j)) += half;
    }
  }
  return p;
}

// Antiderivative (with respect to xi), constant term zero.
Eigen::VectorXd antiderivative(const Eigen::VectorXd& c) {
  const int n = static_cast<int>(c.size());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  if (n > 0) b(1) += c(0);
  if (n > 1) b(2) += c(1) / 4.0;
  for (int k = 2; k < n; ++k) {
    b(k + 1) += c(k) / (2.0 * (k + 1));
    b(k - 1) -= c(k) / (2.0 * (k - 1));
  }
  return b;
}

}  // namespace cheb

BjorlingPatch bjorling_extend(const AnalyticCurveData& data, HalfPlane half,
                              const BjorlingOptions& options) {
  validate_curve_data(data);
  const int m = static_cast<int>(data.t.size());
  const int degree = std::min(options.degree, m - 1);
  const double t_min = data.t.front(), t_max = data.t.back();
  const double mid = 0.5 * (t_min + t_max), span = 0.5 * (t_max - t_min);
  auto to_xi = [&](cheb::Complex z) { return (z - mid) / span; };

  Eigen::VectorXd xi(m);
  for (int i = 0; i < m; ++i) xi(i) = (data.t[i] - mid) / span;

  std::array<Eigen::VectorXd, 3> gamma_fit, normal_fit;
  double fit_residual = 0.0;
  for (int c = 0; c < 3; ++c) {
    gamma_fit[c] = cheb::fit(xi, data.gamma.col(c), degree);
    normal_fit[c] = cheb::fit(xi, data.normal.col(c), degree);
    for (int i = 0; i < m; ++i) {
      fit_residual = std::max(
          fit_residual, std::abs(cheb::evaluate(gamma_fit[c], xi(i)).real() -
                                 data.gamma(i, c)));
      fit_residual = std::max(
          fit_residual, std::abs(cheb::evaluate(normal_fit[c], xi(i)).real() -
                                 data.normal(i, c)));
    }
  }
  if (fit_residual > options.fit_threshold)
    throw AccuracyError("Bjorling fit residual above threshold", fit_residual);

  // Integrand N x gamma' as Chebyshev series in xi; the antiderivative picks
  // up the d(t)/d(xi) = span factor.
  std::array<Eigen::VectorXd, 3> dgamma;
  for (int c = 0; c < 3; ++c)
    dgamma[c] = cheb::derivative(gamma_fit[c]) / span;
  std::array<Eigen::VectorXd, 3> integral;
  for (int c = 0; c < 3; ++c) {
    const int c1 = (c + 1) % 3, c2 = (c + 2) % 3;
    Eigen::VectorXd cross = cheb::product(normal_fit[c1], dgamma[c2]);
    const Eigen::VectorXd other = cheb::product(normal_fit[c2], dgamma[c1]);
    cross.head(other.size()) -= other;
    integral[c] = span * cheb::antiderivative(cross);
  }

  BjorlingPatch patch;
  patch.fit_residual = fit_residual;
  patch.t = data.t;
  const double width =
      options.width > 0.0 ? options.width : 0.5 * (t_max - t_min);
  const int ns = std::max(2, options.normal_samples);
  const double sign = half == HalfPlane::Plus ? 1.0 : -1.0;
  patch.s.resize(ns);
  for (int j = 0; j < ns; ++j)
    patch.s[j] = sign * width * static_cast<double>(j) / (ns - 1);

  patch.positions.resize(m * ns, 3);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < ns; ++j) {
      const cheb::Complex z(data.t[i], patch.s[j]);
      const cheb::Complex xiz = to_xi(z);
      Eigen::Vector3d p;
      for (int c = 0; c < 3; ++c)
        p(c) = cheb::evaluate(gamma_fit[c], xiz).real() +
               cheb::evaluate(integral[c], xiz).imag();
      patch.positions.row(i * ns + j) = p;
    }
  }
  return patch;
}

std::pair<TriMesh, Positions> patch_mesh(const BjorlingPatch& patch) {
  TriMesh mesh;
  const int nt = static_cast<int>(patch.t.size());
  const int ns = static_cast<int>(patch.s.size());
  mesh.vertices.reserve(nt * ns);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < ns; ++j)
      mesh.vertices.emplace_back(patch.t[i], patch.s[j]);
  auto vid = [&](int i, int j) { return i * ns + j; };
  for (int i = 0; i + 1 < nt; ++i) {
    for (int j = 0; j + 1 < ns; ++j) {
      std::array<int, 3> t1{vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)};
      std::array<int, 3> t2{vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)};
      mesh.triangles.push_back(t1);
      mesh.triangles.push_back(t2);
    }
  }
  for (auto& tri : mesh.triangles) {
    const Vec2 e1 = mesh.vertices[tri[1]] - mesh.vertices[tri[0]];
    const Vec2 e2 = mesh.vertices[tri[2]] - mesh.vertices[tri[0]];
    if (e1.x() * e2.y() - e1.y() * e2.x() < 0.0) std::swap(tri[1], tri[2]);
  }
  return {std::move(mesh), patch.positions};
}

double patch_mean_curvature_residual(const BjorlingPatch& patch) {
  auto [mesh, positions] = patch_mesh(patch);
  const Eigen::SparseMatrix<double> stiff =
      stiffness_from_positions(mesh, positions);
  const Eigen::MatrixXd weak = stiff * positions;
  const auto boundary = boundary_vertex_mask(mesh);

  std::vector<double> lumped(mesh.vertex_count(), 0.0);
  std::vector<double> edges;
  for (const auto& tri : mesh.triangles) {
    const Eigen::Vector3d u = positions.row(tri[1]) - positions.row(tri[0]);
    const Eigen::Vector3d v = positions.row(tri[2]) - positions.row(tri[0]);
    const double a = 0.5 * u.cross(v).norm();
    for (int corner : tri) lumped[corner] += a / 3.0;
    edges.push_back(u.norm());
    edges.push_back(v.norm());
    edges.push_back((u - v).norm());
  }
  std::nth_element(edges.begin(), edges.begin() + edges.size() / 2, edges.end());
  const double scale = edges[edges.size() / 2];

  double residual = 0.0;
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (boundary[v] || !(lumped[v] > 0.0)) continue;
    residual = std::max(residual, weak.row(v).norm() / lumped[v] * scale);
  }
  return residual;
}

}  // namespace triplateau
