#include "triplateau/uniformize.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "triplateau/errors.hpp"

namespace triplateau {

MetricField pullback_metric(const SheetMesh& sheet, const Positions& positions) {
  MetricField field(sheet.triangle_count());
  for (int t = 0; t < sheet.triangle_count(); ++t) {
    const Eigen::MatrixXd g = triangle_gradient(sheet.mesh, t, positions);
    MetricSample& s = field[t];
    s.g11 = g.row(0).squaredNorm();
    s.g12 = g.row(0).dot(g.row(1));
    s.g22 = g.row(1).squaredNorm();
    const double trace = s.g11 + s.g22;
    s.degenerate = !(s.g11 > 0.0) || !(s.g22 > 0.0) ||
                   !(s.det() > 1e-20 * trace * trace);
  }
  return field;
}

std::complex<double> beltrami_of_metric(const MetricSample& g) {
  const double root = std::sqrt(std::max(0.0, g.det()));
  const double denom = g.g11 + g.g22 + 2.0 * root;
  if (!(denom > 0.0)) return {0.0, 0.0};
  return {(g.g11 - g.g22) / denom, 2.0 * g.g12 / denom};
}

std::vector<BeltramiSample> beltrami_coefficient(const MetricField& metric) {
  std::vector<BeltramiSample> result(metric.size());
  for (std::size_t i = 0; i < metric.size(); ++i) {
    result[i].mu = beltrami_of_metric(metric[i]);
    result[i].degenerate = metric[i].degenerate;
  }
  return result;
}

MuFunction beltrami_interpolant(const SheetMesh& sheet,
                                const Positions& positions) {
  // Area-weighted vertex metrics, interpolated barycentrically; positive
  // definite metrics form a convex cone, so interpolation stays inside.
  const MetricField per_triangle = pullback_metric(sheet, positions);
  std::vector<Eigen::Vector3d> vertex_metric(sheet.vertex_count(),
                                             Eigen::Vector3d::Zero());
  std::vector<double> weight(sheet.vertex_count(), 0.0);
  for (int t = 0; t < sheet.triangle_count(); ++t) {
    const double a = signed_area(sheet.mesh, t);
    const Eigen::Vector3d g(per_triangle[t].g11, per_triangle[t].g12,
                            per_triangle[t].g22);
    for (int corner : sheet.mesh.triangles[t]) {
      vertex_metric[corner] += a * g;
      weight[corner] += a;
    }
  }
  for (int v = 0; v < sheet.vertex_count(); ++v)
    if (weight[v] > 0.0) vertex_metric[v] /= weight[v];

  // Capture the mesh geometry by value; the interpolant outlives the caller.
  struct Locator {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Eigen::Vector3d> metric;
  };
  auto loc = std::make_shared<Locator>();
  loc->vertices = sheet.mesh.vertices;
  loc->triangles = sheet.mesh.triangles;
  loc->metric = std::move(vertex_metric);

  return [loc](double x, double y) {
    const Vec2 p(x, y);
    const Eigen::Vector3d* best = nullptr;
    Eigen::Vector3d interpolated;
    for (const auto& tri : loc->triangles) {
      const Vec2& a = loc->vertices[tri[0]];
      const Vec2& b = loc->vertices[tri[1]];
      const Vec2& c = loc->vertices[tri[2]];
      const double det =
          (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
      if (std::abs(det) < 1e-30) continue;
      const double l1 = ((p.x() - a.x()) * (c.y() - a.y()) -
                         (p.y() - a.y()) * (c.x() - a.x())) /
                        det;
      const double l2 = ((b.x() - a.x()) * (p.y() - a.y()) -
                         (b.y() - a.y()) * (p.x() - a.x())) /
                        det;
      const double l0 = 1.0 - l1 - l2;
      if (l0 < -1e-12 || l1 < -1e-12 || l2 < -1e-12) continue;
      interpolated = l0 * loc->metric[tri[0]] + l1 * loc->metric[tri[1]] +
                     l2 * loc->metric[tri[2]];
      best = &interpolated;
      break;
    }
    if (!best) {
      // Outside the mesh: nearest vertex value.
      double best_d = std::numeric_limits<double>::infinity();
      int best_v = 0;
      for (std::size_t v = 0; v < loc->vertices.size(); ++v) {
        const double d = (loc->vertices[v] - p).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best_v = static_cast<int>(v);
        }
      }
      interpolated = loc->metric[best_v];
      best = &interpolated;
    }
    MetricSample g;
    g.g11 = (*best)(0);
    g.g12 = (*best)(1);
    g.g22 = (*best)(2);
    return beltrami_of_metric(g);
  };
}

namespace {

// First-order system equivalent to w_zbar = mu w_z: with mu = eta + i zeta,
//   u_y = (2 zeta u_x - (1 - |mu|^2) v_x) / |1 + mu|^2
//   v_y = ((1 - |mu|^2) u_x + 2 zeta v_x) / |1 + mu|^2,
// which reduces to the Cauchy-Riemann pair u_y = -v_x, v_y = u_x at mu = 0.
Eigen::Matrix2d system_matrix(std::complex<double> mu) {
  const double eta = mu.real(), zeta = mu.imag();
  const double denom = (1.0 + eta) * (1.0 + eta) + zeta * zeta;
  const double one_minus = 1.0 - std::norm(mu);
  Eigen::Matrix2d b;
  b << 2.0 * zeta, -one_minus, one_minus, 2.0 * zeta;
  return b / denom;
}

// 4th-order x-derivative on [lo, hi] (centered inside, one-sided at edges).
void derivative4(const Eigen::VectorXd& f, int lo, int hi, double h,
                 Eigen::VectorXd& out) {
  auto stencil_left = [&](int i) {
    return (-25.0 * f(i) + 48.0 * f(i + 1) - 36.0 * f(i + 2) +
            16.0 * f(i + 3) - 3.0 * f(i + 4)) /
           (12.0 * h);
  };
  auto stencil_left1 = [&](int i) {
    return (-3.0 * f(i - 1) - 10.0 * f(i) + 18.0 * f(i + 1) - 6.0 * f(i + 2) +
            f(i + 3)) /
           (12.0 * h);
  };
  out(lo) = stencil_left(lo);
  out(lo + 1) = stencil_left1(lo + 1);
  for (int i = lo + 2; i <= hi - 2; ++i)
    out(i) = (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2)) /
             (12.0 * h);
  out(hi - 1) = -(-3.0 * f(hi - 1 + 1) - 10.0 * f(hi - 1) +
                  18.0 * f(hi - 2) - 6.0 * f(hi - 3) + f(hi - 4)) /
                (12.0 * h);
  out(hi) = -(-25.0 * f(hi) + 48.0 * f(hi - 1) - 36.0 * f(hi - 2) +
              16.0 * f(hi - 3) - 3.0 * f(hi - 4)) /
            (12.0 * h);
}

struct State {
  Eigen::VectorXd u, v;
};

}  // namespace

IsothermalChart isothermal_march(const MuFunction& mu, const MarchGrid& grid,
                                 double x0, double step, double extent,
                                 const MarchOptions& options) {
  if (!(step > 0) || !(extent >= 0))
    throw std::invalid_argument("step must be positive, extent nonnegative");
  if (grid.nx < 9) throw std::invalid_argument("grid too narrow to march");
  if (!(x0 >= grid.x_min && x0 <= grid.x_max))
    throw std::invalid_argument("x0 must lie inside the grid");
  const double h = grid.spacing();
  const int steps = static_cast<int>(std::llround(extent / step));

  // Stability pre-scan over every stage level of the requested march.
  double max_mu = 0.0;
  for (int r = 0; r <= 2 * steps; ++r) {
    const double y = 0.5 * step * r;
    for (int i = 0; i < grid.nx; ++i)
      max_mu = std::max(max_mu, std::abs(mu(grid.x_min + i * h, y)));
  }
  if (max_mu > 1.0 - options.margin)
    throw StabilityError(
        "|mu| exceeds 1 - margin on the march grid; chart undefined",
        max_mu);

  IsothermalChart chart;
  chart.x0 = x0;
  chart.x.resize(grid.nx);
  for (int i = 0; i < grid.nx; ++i) chart.x[i] = grid.x_min + i * h;

  State state{Eigen::VectorXd(grid.nx), Eigen::VectorXd::Zero(grid.nx)};
  for (int i = 0; i < grid.nx; ++i) state.u(i) = chart.x[i] - x0;

  const int rows = steps + 1;
  chart.u.setZero(rows, grid.nx);
  chart.v.setZero(rows, grid.nx);
  chart.u_x.setZero(rows, grid.nx);
  chart.v_x.setZero(rows, grid.nx);
  chart.u_y.setZero(rows, grid.nx);
  chart.v_y.setZero(rows, grid.nx);
  chart.y.push_back(0.0);
  chart.u.row(0) = state.u;
  chart.v.row(0) = state.v;

  int lo = 0, hi = grid.nx - 1;

  Eigen::VectorXd ux(grid.nx), vx(grid.nx);
  auto rhs = [&](const State& s, double y, int wlo, int whi, State& out) {
    derivative4(s.u, wlo, whi, h, ux);
    derivative4(s.v, wlo, whi, h, vx);
    out.u.setZero(grid.nx);
    out.v.setZero(grid.nx);
    for (int i = wlo; i <= whi; ++i) {
      const Eigen::Matrix2d b = system_matrix(mu(chart.x[i], y));
      out.u(i) = b(0, 0) * ux(i) + b(0, 1) * vx(i);
      out.v(i) = b(1, 0) * ux(i) + b(1, 1) * vx(i);
    }
  };

  auto fill_row = [&](int row, double y) {
    derivative4(state.u, lo, hi, h, ux);
    derivative4(state.v, lo, hi, h, vx);
    for (int i = lo; i <= hi; ++i) {
      const Eigen::Matrix2d b = system_matrix(mu(chart.x[i], y));
      chart.u_x(row, i) = ux(i);
      chart.v_x(row, i) = vx(i);
      chart.u_y(row, i) = b(0, 0) * ux(i) + b(0, 1) * vx(i);
      chart.v_y(row, i) = b(1, 0) * ux(i) + b(1, 1) * vx(i);
    }
  };
  fill_row(0, 0.0);

  State k1{Eigen::VectorXd(grid.nx), Eigen::VectorXd(grid.nx)};
  State k2 = k1, k3 = k1, k4 = k1, tmp = k1;
  int completed = 0;
  for (int r = 0; r < steps; ++r) {
    if (hi - lo < 8) {
      chart.truncated = true;
      chart.diagnostic = "x-window exhausted by domain-of-determinacy cuts";
      break;
    }
    const double y = r * step;
    rhs(state, y, lo, hi, k1);
    tmp.u = state.u + 0.5 * step * k1.u;
    tmp.v = state.v + 0.5 * step * k1.v;
    rhs(tmp, y + 0.5 * step, lo, hi, k2);
    tmp.u = state.u + 0.5 * step * k2.u;
    tmp.v = state.v + 0.5 * step * k2.v;
    rhs(tmp, y + 0.5 * step, lo, hi, k3);
    tmp.u = state.u + step * k3.u;
    tmp.v = state.v + step * k3.v;
    rhs(tmp, y + step, lo, hi, k4);
    state.u += step / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
    state.v += step / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    lo += 2;
    hi -= 2;

    const double magnitude =
        std::max(state.u.segment(lo, hi - lo + 1).cwiseAbs().maxCoeff(),
                 state.v.segment(lo, hi - lo + 1).cwiseAbs().maxCoeff());
    if (!std::isfinite(magnitude) ||
        magnitude > options.growth_guard *
                        (1.0 + grid.x_max - grid.x_min + extent)) {
      chart.truncated = true;
      chart.diagnostic = "march aborted: residual growth past the guard";
      break;
    }
    ++completed;
    chart.y.push_back((r + 1) * step);
    chart.u.row(completed) = state.u;
    chart.v.row(completed) = state.v;
    fill_row(completed, (r + 1) * step);
  }

  chart.col_lo = lo;
  chart.col_hi = hi;
  const int kept = chart.rows();
  chart.u.conservativeResize(kept, grid.nx);
  chart.v.conservativeResize(kept, grid.nx);
  chart.u_x.conservativeResize(kept, grid.nx);
  chart.v_x.conservativeResize(kept, grid.nx);
  chart.u_y.conservativeResize(kept, grid.nx);
  chart.v_y.conservativeResize(kept, grid.nx);
  return chart;
}

namespace {

// 4th-order derivative across rows at row r (needs 5 rows).
double y_derivative(const Eigen::MatrixXd& f, int r, int col, double step,
                    int rows) {
  if (rows >= 5) {
    int base = std::clamp(r - 2, 0, rows - 5);
    const int o = r - base;
    static const double w0[5] = {-25, 48, -36, 16, -3};
    static const double w1[5] = {-3, -10, 18, -6, 1};
    static const double w2[5] = {1, -8, 0, 8, -1};
    static const double w3[5] = {-1, 6, -18, 10, 3};
    static const double w4[5] = {3, -16, 36, -48, 25};
    const double* w = o == 0 ? w0 : o == 1 ? w1 : o == 2 ? w2 : o == 3 ? w3 : w4;
    double acc = 0.0;
    for (int k = 0; k < 5; ++k) acc += w[k] * f(base + k, col);
    return acc / (12.0 * step);
  }
  if (r == 0) return (f(1, col) - f(0, col)) / step;
  if (r == rows - 1) return (f(r, col) - f(r - 1, col)) / step;
  return (f(r + 1, col) - f(r - 1, col)) / (2.0 * step);
}

}  // namespace

double beltrami_residual(const IsothermalChart& chart, const MuFunction& mu) {
  const int rows = chart.rows();
  if (rows < 2) return 0.0;
  const double hx = chart.x[1] - chart.x[0];
  const double hy = chart.y[1] - chart.y[0];
  double residual = 0.0;
  const int r0 = rows >= 5 ? 2 : 1;
  for (int r = r0; r < rows - r0; ++r) {
    for (int col = chart.col_lo + 2; col <= chart.col_hi - 2; ++col) {
      const double ux = (chart.u(r, col - 2) - 8 * chart.u(r, col - 1) +
                         8 * chart.u(r, col + 1) - chart.u(r, col + 2)) /
                        (12.0 * hx);
      const double vx = (chart.v(r, col - 2) - 8 * chart.v(r, col - 1) +
                         8 * chart.v(r, col + 1) - chart.v(r, col + 2)) /
                        (12.0 * hx);
      const double uy = y_derivative(chart.u, r, col, hy, rows);
      const double vy = y_derivative(chart.v, r, col, hy, rows);
      const std::complex<double> wz(0.5 * (ux + vy), 0.5 * (vx - uy));
      const std::complex<double> wzbar(0.5 * (ux - vy), 0.5 * (vx + uy));
      const std::complex<double> m = mu(chart.x[col], chart.y[r]);
      residual = std::max(residual,
                          std::abs(wzbar - m * wz) / (std::abs(wz) + 1e-30));
    }
  }
  return residual;
}

double min_chart_jacobian(const IsothermalChart& chart) {
  double jac = std::numeric_limits<double>::infinity();
  for (int r = 0; r < chart.rows(); ++r)
    for (int col = chart.col_lo; col <= chart.col_hi; ++col)
      jac = std::min(jac, chart.u_x(r, col) * chart.v_y(r, col) -
                              chart.u_y(r, col) * chart.v_x(r, col));
  return jac;
}

double composed_conformality_residual(
    const IsothermalChart& chart,
    const std::function<Eigen::MatrixXd(double, double)>& dT, int skip) {
  const int rows = chart.rows();
  if (rows < 5) throw std::invalid_argument("need at least five chart rows");
  const double hx = chart.x[1] - chart.x[0];
  const double hy = chart.y[1] - chart.y[0];
  double residual = 0.0;
  for (int r = std::max(2, skip); r < rows - std::max(2, skip); ++r) {
    for (int col = chart.col_lo + 2 + skip; col <= chart.col_hi - 2 - skip;
         ++col) {
      Eigen::Matrix2d dw;
      dw(0, 0) = (chart.u(r, col - 2) - 8 * chart.u(r, col - 1) +
                  8 * chart.u(r, col + 1) - chart.u(r, col + 2)) /
                 (12.0 * hx);
      dw(1, 0) = (chart.v(r, col - 2) - 8 * chart.v(r, col - 1) +
                  8 * chart.v(r, col + 1) - chart.v(r, col + 2)) /
                 (12.0 * hx);
      dw(0, 1) = y_derivative(chart.u, r, col, hy, rows);
      dw(1, 1) = y_derivative(chart.v, r, col, hy, rows);
      const Eigen::MatrixXd dt = dT(chart.x[col], chart.y[r]);
      const Eigen::MatrixXd ds = dt * dw.inverse();
      const double guu = ds.col(0).squaredNorm();
      const double gvv = ds.col(1).squaredNorm();
      const double guv = ds.col(0).dot(ds.col(1));
      const double d1 = guu - gvv, d2 = 2.0 * guv;
      residual = std::max(residual, std::sqrt(d1 * d1 + d2 * d2) /
                                        (guu + gvv + 1e-30));
    }
  }
  return residual;
}

std::string chart_to_json(const IsothermalChart& chart, double residual,
                          int indent) {
  nlohmann::json doc;
  auto dump = [&](const Eigen::MatrixXd& m) {
    auto rows = nlohmann::json::array();
    for (int r = 0; r < chart.rows(); ++r) {
      auto row = nlohmann::json::array();
      for (int col = chart.col_lo; col <= chart.col_hi; ++col)
        row.push_back(m(r, col));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  doc["u"] = dump(chart.u);
  doc["v"] = dump(chart.v);
  doc["residual"] = residual;
  doc["y"] = chart.y;
  doc["x"] = std::vector<double>(chart.x.begin() + chart.col_lo,
                                 chart.x.begin() + chart.col_hi + 1);
  doc["truncated"] = chart.truncated;
  if (!chart.diagnostic.empty()) doc["diagnostic"] = chart.diagnostic;
  return doc.dump(indent);
}

}  // namespace triplateau
