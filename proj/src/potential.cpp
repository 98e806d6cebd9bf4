#include "wavetank/potential.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "wavetank/mesh.hpp"
#include "wavetank/quadrature.hpp"

namespace wavetank {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);
constexpr double kNearRho = 4.0;

cplx ell_c(const Vec2& x, cplx omega, Sign s) { return ell(x, omega, s); }

void require_off_axis(const ComplexFrequency& f, const char* what) {
  if (f.side != Side::off_axis || f.omega.imag() == 0.0)
    throw std::invalid_argument(std::string(what) + " needs Im omega != 0");
}

struct PanelGeom {
  Vec2 a;     // start point
  Vec2 u;     // unit tangent (straight panels)
  double L;   // length
  bool straight;
};

PanelGeom panel_geom(const PlanarDomain& d, const Panel& p) {
  const Edge& e = d.edges()[p.edge];
  PanelGeom g;
  g.a = edge_point(e, p.t_start);
  g.L = p.length;
  g.straight = is_straight(e);
  g.u = edge_tangent(e, p.t_start);
  return g;
}

Vec2 panel_point(const PlanarDomain& d, const Panel& p, double t) {
  return edge_point(d.edges()[p.edge], p.t_start + (p.t_end - p.t_start) * 0.5 * (t + 1.0));
}

// Local coordinate of the boundary point on the panel (may lie outside [-1,1]).
double local_coord(const Panel& p, const BoundaryPoint& bp) {
  return 2.0 * (bp.local_param - p.t_start) / (p.t_end - p.t_start) - 1.0;
}

// Root t* of l(x - y(t)) on a straight panel, with l(x - y(t)) = k (t - t*).
void straight_root(const PanelGeom& g, const Vec2& x, cplx omega, Sign s, cplx& k, cplx& tstar) {
  const cplx lu = ell_c(g.u, omega, s);
  k = -0.5 * g.L * lu;
  tstar = 2.0 * ell_c(x - g.a, omega, s) / (g.L * lu) - 1.0;
}

// Recursive Gauss on [lo, hi] subsets of the panel, refining where the
// linearized root of l(x - y) comes close.
void adaptive_rows(const PlanarDomain& d, const Panel& p, const GaussRule& rule, double lo, double hi, int depth,
                   const Vec2& x, cplx omega, const std::function<cplx(const Vec2&, const Vec2&)>& kernel,
                   Eigen::VectorXcd& row) {
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  const Edge& e = d.edges()[p.edge];
  const double len_half = half * 0.5 * p.length;
  bool refine = false;
  if (depth < 40) {
    const Vec2 ym = panel_point(d, p, mid);
    const Vec2 tm = edge_tangent(e, p.t_start + (p.t_end - p.t_start) * 0.5 * (mid + 1.0));
    for (Sign s : {Sign::plus, Sign::minus}) {
      const double dist = std::abs(ell_c(x - ym, omega, s)) / std::abs(ell_c(tm, omega, s));
      if (dist < 2.0 * len_half) refine = true;
    }
  }
  if (refine) {
    adaptive_rows(d, p, rule, lo, mid, depth + 1, x, omega, kernel, row);
    adaptive_rows(d, p, rule, mid, hi, depth + 1, x, omega, kernel, row);
    return;
  }
  for (Eigen::Index j = 0; j < rule.nodes.size(); ++j) {
    const double t = mid + half * rule.nodes[j];
    const Vec2 y = panel_point(d, p, t);
    const cplx kv = kernel(x, y) * rule.weights[j] * half * 0.5 * p.length;
    row += kv * lagrange_basis(rule, t);
  }
}

Eigen::VectorXcd panel_values(const BoundaryDensity& v, std::size_t pi) {
  return v.values.segment(Eigen::Index(pi) * v.order, v.order);
}

// Row r with r . v_panel = int_panel E(x - y) v ds for x off the panel.
Eigen::VectorXcd single_layer_row(const PlanarDomain& d, const Panel& p, const GaussRule& rule, const Vec2& x,
                                  const ComplexFrequency& f) {
  const cplx c = c_omega(f);
  const cplx w = f.omega;
  const PanelGeom g = panel_geom(d, p);
  const Eigen::Index n = rule.nodes.size();
  Eigen::VectorXcd row = Eigen::VectorXcd::Zero(n);
  auto E = [&](const Vec2& xx, const Vec2& yy) { return fundamental_solution(xx - yy, f); };
  if (g.straight) {
    cplx kp, km, tp, tm;
    straight_root(g, x, w, Sign::plus, kp, tp);
    straight_root(g, x, w, Sign::minus, km, tm);
    if (std::min(bernstein_rho(tp), bernstein_rho(tm)) < kNearRho) {
      // log A = log k+ + log(t - t+) + log k- + log(t - t-) + 2 pi i n
      const cplx ref = std::log(char_quadratic(x - g.a, w)) -
                       (std::log(kp) + std::log(-1.0 - tp) + std::log(km) + std::log(-1.0 - tm));
      const double nn = std::round(ref.imag() / (2.0 * kPi));
      const cplx constant = std::log(kp) + std::log(km) + 2.0 * kPi * kI * nn;
      row = constant * rule.weights.cast<cplx>();
      // product integration only for a near root; extrapolating to a far one loses digits with the order
      for (const cplx ts : {tp, tm}) {
        if (bernstein_rho(ts) < kNearRho) {
          row += log_row(rule, ts, false);
        } else {
          for (Eigen::Index j = 0; j < n; ++j) row[j] += rule.weights[j] * (std::log(-1.0 - ts) + std::log((rule.nodes[j] - ts) / (-1.0 - ts)));
        }
      }
      return c * 0.5 * g.L * row;
    }
    for (Eigen::Index j = 0; j < n; ++j)
      row[j] = E(x, panel_point(d, p, rule.nodes[j])) * rule.weights[j] * 0.5 * g.L;
    return row;
  }
  adaptive_rows(d, p, rule, -1.0, 1.0, 0, x, w, E, row);
  return row;
}

}  // namespace

ComplexFrequency ComplexFrequency::off_axis(cplx w) {
  check_frequency(w.real());
  if (w.imag() == 0.0) throw std::invalid_argument("off-axis frequency needs Im omega != 0");
  return {w, Side::off_axis};
}

cplx c_omega(const ComplexFrequency& f) {
  check_frequency(f.omega.real());
  if (f.side == Side::off_axis) {
    if (f.omega.imag() == 0.0) throw std::invalid_argument("off-axis frequency needs Im omega != 0");
    const double sg = f.omega.imag() > 0 ? 1.0 : -1.0;
    return kI * sg / (4.0 * kPi * f.omega * std::sqrt(1.0 - f.omega * f.omega));
  }
  if (f.omega.imag() != 0.0) throw std::invalid_argument("boundary-value side needs real omega");
  const double l = f.omega.real();
  const cplx cl = kI / (4.0 * kPi * l * std::sqrt(1.0 - l * l));
  return f.side == Side::plus_i0 ? cl : -cl;
}

cplx char_quadratic(const Vec2& x, cplx omega) {
  return -x.x() * x.x() / (omega * omega) + x.y() * x.y() / (1.0 - omega * omega);
}

cplx fundamental_solution(const Vec2& x, const ComplexFrequency& f) {
  if (x.norm() == 0.0) throw std::invalid_argument("fundamental solution at the origin");
  const cplx c = c_omega(f);
  const cplx A = char_quadratic(x, f.omega);
  if (f.side == Side::off_axis) return c * std::log(A);
  const double l = f.omega.real();
  const double scale = x.x() * x.x() / (l * l) + x.y() * x.y() / (1.0 - l * l);
  const double a = A.real();
  if (std::abs(a) < 1e-12 * scale) throw OnCharacteristic("point on a characteristic line through the origin");
  const double sg = f.side == Side::plus_i0 ? 1.0 : -1.0;
  return c * cplx(std::log(std::abs(a)), a < 0 ? sg * kPi : 0.0);
}

Vec2c fundamental_gradient(const Vec2& x, const ComplexFrequency& f) {
  const cplx c = c_omega(f);
  const cplx w = f.omega;
  const cplx A = char_quadratic(x, w);
  if (f.side != Side::off_axis) {
    const double l = w.real();
    const double scale = x.x() * x.x() / (l * l) + x.y() * x.y() / (1.0 - l * l);
    if (std::abs(A.real()) < 1e-12 * scale) throw OnCharacteristic("point on a characteristic line through the origin");
  }
  Vec2c g;
  g << c * (-2.0 * x.x() / (w * w)) / A, c * (2.0 * x.y() / (1.0 - w * w)) / A;
  return g;
}

double Bump::operator()(const Vec2& y) const {
  const double q = (y - center).squaredNorm() / (radius * radius);
  if (q >= 1.0) return 0.0;
  return amplitude * std::exp(1.0 - 1.0 / (1.0 - q));
}

Vec2 Bump::gradient(const Vec2& y) const {
  const double q = (y - center).squaredNorm() / (radius * radius);
  if (q >= 1.0) return Vec2::Zero();
  const double v = amplitude * std::exp(1.0 - 1.0 / (1.0 - q));
  return -v / ((1.0 - q) * (1.0 - q)) * 2.0 * (y - center) / (radius * radius);
}

double Bump::integral() const {
  // pi R^2 int_0^1 exp(1 - 1/(1-u)) du
  const GaussRule& r = gauss_legendre(64);
  double s = 0.0;
  for (Eigen::Index j = 0; j < r.nodes.size(); ++j) {
    const double u = 0.5 * (r.nodes[j] + 1.0);
    s += 0.5 * r.weights[j] * std::exp(1.0 - 1.0 / (1.0 - u));
  }
  return amplitude * kPi * radius * radius * s;
}

namespace {

// int E(x - y) (f, d1 f, d2 f)(y) dy in polar coordinates about x.
Eigen::Vector3cd volume_moments(const Bump& f, const ComplexFrequency& freq, const Vec2& x, int order) {
  const GaussRule& rule = gauss_legendre(order);
  const cplx c = c_omega(freq);
  const cplx w = freq.omega;
  const Vec2 dc = f.center - x;
  const double d = dc.norm();
  const double R = f.radius;
  const bool inside = d < R;
  std::vector<double> breaks;
  double phi_lo, phi_hi;
  if (inside) {
    phi_lo = 0.0;
    phi_hi = 2.0 * kPi;
  } else {
    const double beta = std::asin(std::min(1.0, R / d));
    const double phic = std::atan2(dc.y(), dc.x());
    phi_lo = phic - beta;
    phi_hi = phic + beta;
  }
  breaks.push_back(phi_lo);
  const bool real_side = freq.side != Side::off_axis;
  {
    // characteristic directions: log A(e) is singular there (real side) or nearly so (small eps)
    const double l = w.real();
    const double p0 = std::atan2(std::sqrt(1.0 - l * l), l);
    for (double base : {p0, kPi - p0, kPi + p0, 2.0 * kPi - p0})
      for (int k = -2; k <= 2; ++k) {
        const double ph = base + 2.0 * kPi * k;
        if (ph > phi_lo + 1e-15 && ph < phi_hi - 1e-15) breaks.push_back(ph);
      }
  }
  breaks.push_back(phi_hi);
  std::sort(breaks.begin(), breaks.end());

  Eigen::Vector3cd acc = Eigen::Vector3cd::Zero();
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double a0 = breaks[b], a1 = breaks[b + 1];
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
      const double u = 0.5 * (rule.nodes[i] + 1.0);
      double g = u, gp = 1.0;
      if (real_side) {
        g = u * u * u * u * (35.0 - 84.0 * u + 70.0 * u * u - 20.0 * u * u * u);
        gp = 140.0 * std::pow(u * (1.0 - u), 3);
      }
      const double phi = a0 + (a1 - a0) * g;
      const double wphi = 0.5 * rule.weights[i] * (a1 - a0) * gp;
      const Vec2 e(std::cos(phi), std::sin(phi));
      const double b1 = e.dot(dc);
      const double disc = R * R - d * d + b1 * b1;
      if (disc <= 0.0) continue;
      const double sq = std::sqrt(disc);
      const double r_hi = b1 + sq;
      const double r_lo = inside ? 0.0 : std::max(0.0, b1 - sq);
      if (r_hi <= r_lo) continue;
      const cplx Ae = char_quadratic(e, w);
      cplx logAe;
      if (real_side) {
        const double sg = freq.side == Side::plus_i0 ? 1.0 : -1.0;
        logAe = cplx(std::log(std::abs(Ae.real())), Ae.real() < 0 ? sg * kPi : 0.0);
      } else {
        logAe = std::log(Ae);
      }
      for (Eigen::Index j = 0; j < rule.nodes.size(); ++j) {
        const double s = 0.5 * (rule.nodes[j] + 1.0);
        double rho, wr;
        if (inside) {
          rho = r_hi * s * s;
          wr = 0.5 * rule.weights[j] * 2.0 * r_hi * s;
        } else {
          rho = r_lo + (r_hi - r_lo) * s;
          wr = 0.5 * rule.weights[j] * (r_hi - r_lo);
        }
        if (rho <= 0.0) continue;
        const Vec2 y = x + rho * e;
        const double fv = f(y);
        if (fv == 0.0) continue;
        // log A(rho e) = 2 log rho + log A(e); for off-axis A stays in one half plane.
        const cplx E = c * (2.0 * std::log(rho) + logAe);
        const Vec2 gf = f.gradient(y);
        const cplx wgt = E * wphi * wr * rho;
        acc[0] += wgt * fv;
        acc[1] += wgt * gf.x();
        acc[2] += wgt * gf.y();
      }
    }
  }
  return acc;
}

Eigen::Vector3cd volume_converged(const Bump& f, const ComplexFrequency& freq, const Vec2& x,
                                  const VolumeOptions& opt) {
  int n = opt.min_order;
  Eigen::Vector3cd prev = volume_moments(f, freq, x, n);
  while (true) {
    const int next = std::min(2 * n, opt.max_order);
    const Eigen::Vector3cd cur = volume_moments(f, freq, x, next);
    const double diff = (cur - prev).cwiseAbs().maxCoeff();
    const double scale = std::max(cur.cwiseAbs().maxCoeff(), 1e-300);
    if (diff <= opt.tol * scale) return cur;
    if (next >= opt.max_order) {
      if (diff > 10.0 * opt.tol * scale)
        throw QuadratureNotConverged("volume potential: refinements disagree by " + std::to_string(diff / scale));
      return cur;
    }
    prev = cur;
    n = next;
  }
}

}  // namespace

cplx volume_potential(const Bump& f, const ComplexFrequency& freq, const Vec2& x, const VolumeOptions& opt) {
  return volume_converged(f, freq, x, opt)[0];
}

Vec2c volume_potential_gradient(const Bump& f, const ComplexFrequency& freq, const Vec2& x,
                                const VolumeOptions& opt) {
  const Eigen::Vector3cd m = volume_converged(f, freq, x, opt);
  return Vec2c(m[1], m[2]);
}

cplx BoundaryDensity::mass() const {
  cplx s = 0.0;
  for (Eigen::Index i = 0; i < size(); ++i) s += weights[std::size_t(i)] * values[i];
  return s;
}

BoundaryDensity make_panel_density(const PlanarDomain& domain, const PanelOptions& opt) {
  if (opt.order < 2 || opt.panels_per_half_edge < 1) throw std::invalid_argument("panel options");
  const GaussRule& rule = gauss_legendre(opt.order);
  BoundaryDensity v;
  v.order = opt.order;
  v.grading_exponent = opt.grading_exponent;
  const std::size_t ne = domain.edge_count();
  const int m = opt.panels_per_half_edge;
  for (std::size_t e = 0; e < ne; ++e) {
    const bool g0 = domain.is_corner(e), g1 = domain.is_corner((e + 1) % ne);
    std::vector<double> br;
    for (int j = 0; j <= m; ++j) {
      const double s = double(j) / m;
      br.push_back(0.5 * (g0 ? std::pow(s, opt.grading_exponent) : s));
    }
    for (int j = m - 1; j >= 0; --j) {
      const double s = double(j) / m;
      br.push_back(1.0 - 0.5 * (g1 ? std::pow(s, opt.grading_exponent) : s));
    }
    const double len = edge_length(domain.edges()[e]);
    for (std::size_t k = 0; k + 1 < br.size(); ++k) {
      Panel p{e, br[k], br[k + 1], (br[k + 1] - br[k]) * len};
      v.panels.push_back(p);
      for (Eigen::Index j = 0; j < rule.nodes.size(); ++j) {
        const double t = p.t_start + (p.t_end - p.t_start) * 0.5 * (rule.nodes[j] + 1.0);
        v.nodes.push_back(domain.at_edge(e, t));
        v.weights.push_back(0.5 * rule.weights[j] * p.length);
      }
    }
  }
  v.values = Eigen::VectorXcd::Zero(Eigen::Index(v.nodes.size()));
  return v;
}

cplx single_layer(const PlanarDomain& domain, const BoundaryDensity& v, const ComplexFrequency& f, const Vec2& x) {
  require_off_axis(f, "single_layer");
  if (v.panels.empty()) {
    cplx s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (v.values[i] != cplx(0.0)) s += v.weights[std::size_t(i)] * v.values[i] * fundamental_solution(x - v.nodes[std::size_t(i)].xy, f);
    return s;
  }
  const GaussRule& rule = gauss_legendre(v.order);
  cplx s = 0.0;
  for (std::size_t p = 0; p < v.panels.size(); ++p) {
    const Eigen::VectorXcd vals = panel_values(v, p);
    if (vals.cwiseAbs().maxCoeff() == 0.0) continue;
    s += (single_layer_row(domain, v.panels[p], rule, x, f).transpose() * vals)(0);
  }
  return s;
}

Vec2c single_layer_gradient(const PlanarDomain& domain, const BoundaryDensity& v, const ComplexFrequency& f,
                            const Vec2& x) {
  require_off_axis(f, "single_layer_gradient");
  Vec2c g = Vec2c::Zero();
  if (v.panels.empty()) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
      g += v.weights[std::size_t(i)] * v.values[i] * fundamental_gradient(x - v.nodes[std::size_t(i)].xy, f);
    return g;
  }
  const GaussRule& rule = gauss_legendre(v.order);
  for (std::size_t p = 0; p < v.panels.size(); ++p) {
    const Eigen::VectorXcd vals = panel_values(v, p);
    for (int comp = 0; comp < 2; ++comp) {
      Eigen::VectorXcd row = Eigen::VectorXcd::Zero(v.order);
      auto kern = [&](const Vec2& xx, const Vec2& yy) { return fundamental_gradient(xx - yy, f)[comp]; };
      adaptive_rows(domain, v.panels[p], rule, -1.0, 1.0, 0, x, f.omega, kern, row);
      g[comp] += (row.transpose() * vals)(0);
    }
  }
  return g;
}

cplx restricted_single_layer(const PlanarDomain& domain, const BoundaryDensity& v, const ComplexFrequency& f,
                             const BoundaryPoint& bp, bool subtract) {
  require_off_axis(f, "restricted_single_layer");
  if (v.panels.empty()) throw std::invalid_argument("restricted_single_layer needs a panel density");
  const GaussRule& rule = gauss_legendre(v.order);
  const cplx c = c_omega(f);
  const cplx w = f.omega;
  cplx s = 0.0;
  for (std::size_t pi = 0; pi < v.panels.size(); ++pi) {
    const Panel& p = v.panels[pi];
    const Eigen::VectorXcd vals = panel_values(v, pi);
    const bool same_edge = p.edge == bp.edge_index;
    const double tp = same_edge ? local_coord(p, bp) : 10.0;
    const bool self = same_edge && tp >= -1.0 - 1e-12 && tp <= 1.0 + 1e-12;
    if (!subtract) {
      for (Eigen::Index j = 0; j < rule.nodes.size(); ++j)
        if ((panel_point(domain, p, rule.nodes[j]) - bp.xy).norm() < p.length)
          throw NearDiagonalBreakdown("evaluation point within one panel of a node");
      Eigen::VectorXcd row(v.order);
      for (Eigen::Index j = 0; j < rule.nodes.size(); ++j)
        row[j] = fundamental_solution(bp.xy - panel_point(domain, p, rule.nodes[j]), f) * rule.weights[j] * 0.5 * p.length;
      s += (row.transpose() * vals)(0);
      continue;
    }
    if (!self) {
      s += (single_layer_row(domain, p, rule, bp.xy, f).transpose() * vals)(0);
      continue;
    }
    double t0 = std::clamp(tp, -1.0 + 1e-9, 1.0 - 1e-9);
    const double te = t0 < 0 ? 1.0 : -1.0;
    const Vec2 ye = panel_point(domain, p, te);
    const Vec2 xp = panel_point(domain, p, t0);
    Eigen::VectorXcd row;
    if (is_straight(domain.edges()[p.edge])) {
      const PanelGeom g = panel_geom(domain, p);
      const cplx kk = 0.25 * g.L * g.L * ell_c(g.u, w, Sign::plus) * ell_c(g.u, w, Sign::minus);
      const cplx ref = std::log(char_quadratic(xp - ye, w)) - std::log(kk) - 2.0 * std::log(std::abs(te - t0));
      const double nn = std::round(ref.imag() / (2.0 * kPi));
      row = (std::log(kk) + 2.0 * kPi * kI * nn) * rule.weights.cast<cplx>() + 2.0 * log_row(rule, t0, true);
    } else {
      // Smooth remainder log(A / (t - t0)^2) by Gauss plus the closed-form log part.
      row = 2.0 * log_row(rule, t0, true);
      for (Eigen::Index j = 0; j < rule.nodes.size(); ++j) {
        const double t = rule.nodes[j];
        const Vec2 y = panel_point(domain, p, t);
        const cplx rem = std::log(char_quadratic(xp - y, w) / ((t - t0) * (t - t0)));
        row[j] += rule.weights[j] * rem;
      }
    }
    s += c * 0.5 * p.length * (row.transpose() * vals)(0);
  }
  return s;
}

Eigen::MatrixXcd differentiated_single_layer_matrix(const PlanarDomain& domain, const BoundaryDensity& v,
                                                    const ComplexFrequency& f) {
  require_off_axis(f, "differentiated_single_layer_matrix");
  if (v.panels.empty()) throw std::invalid_argument("dC needs a panel density");
  const GaussRule& rule = gauss_legendre(v.order);
  const cplx c = c_omega(f);
  const cplx w = f.omega;
  const Eigen::Index N = v.size();
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const BoundaryPoint& bp = v.nodes[std::size_t(i)];
    const Vec2 x = bp.xy;
    const Edge& te = domain.edges()[bp.edge_index];
    const Vec2 tau = edge_tangent(te, bp.local_param);
    const cplx lt[2] = {ell_c(tau, w, Sign::plus), ell_c(tau, w, Sign::minus)};
    auto kernel = [&](const Vec2& xx, const Vec2& yy) {
      return c * (lt[0] / ell_c(xx - yy, w, Sign::plus) + lt[1] / ell_c(xx - yy, w, Sign::minus));
    };
    for (std::size_t pi = 0; pi < v.panels.size(); ++pi) {
      const Panel& p = v.panels[pi];
      const PanelGeom g = panel_geom(domain, p);
      Eigen::VectorXcd row = Eigen::VectorXcd::Zero(v.order);
      const bool same_edge = p.edge == bp.edge_index;
      if (g.straight && same_edge) {
        // 2c/(s_i - s'): exact on a straight edge, principal value on the self panel
        const double t0 = local_coord(p, bp);
        const bool self = t0 > -1.0 && t0 < 1.0;
        if (self || bernstein_rho(t0) < kNearRho) {
          cplx tt = t0;
          if (self) {
            // snap to the exact node so the principal value sees the coincidence
            for (Eigen::Index j = 0; j < rule.nodes.size(); ++j)
              if (std::abs(rule.nodes[j] - t0) < 1e-12) tt = rule.nodes[j];
          }
          row = -2.0 * c * cauchy_row(rule, tt);
        } else {
          for (Eigen::Index j = 0; j < rule.nodes.size(); ++j)
            row[j] = kernel(x, panel_point(domain, p, rule.nodes[j])) * rule.weights[j] * 0.5 * g.L;
        }
      } else if (g.straight) {
        for (Sign s : {Sign::plus, Sign::minus}) {
          cplx k, ts;
          straight_root(g, x, w, s, k, ts);
          const cplx coef = c * ell_c(tau, w, s) * 0.5 * g.L / k;
          if (bernstein_rho(ts) < kNearRho) {
            row += coef * cauchy_row(rule, ts);
          } else {
            for (Eigen::Index j = 0; j < rule.nodes.size(); ++j) row[j] += coef * rule.weights[j] / (rule.nodes[j] - ts);
          }
        }
      } else {
        const double t0 = same_edge ? local_coord(p, bp) : 10.0;
        if (same_edge && t0 > -1.0 && t0 < 1.0) {
          Eigen::Index hit = -1;
          for (Eigen::Index j = 0; j < rule.nodes.size(); ++j)
            if (std::abs(rule.nodes[j] - t0) < 1e-12) hit = j;
          const cplx tt = hit >= 0 ? cplx(rule.nodes[hit]) : cplx(t0);
          row = -2.0 * c * cauchy_row(rule, tt);
          const Vec2 curv = edge_curvature_vector(te, bp.local_param);
          for (Eigen::Index j = 0; j < rule.nodes.size(); ++j) {
            const double ds = 0.5 * p.length;
            cplx rem;
            if (j == hit) {
              rem = c * 0.5 * (ell_c(curv, w, Sign::plus) / lt[0] + ell_c(curv, w, Sign::minus) / lt[1]);
            } else {
              const Vec2 y = panel_point(domain, p, rule.nodes[j]);
              const double sdiff = ds * (tt.real() - rule.nodes[j]);
              rem = kernel(x, y) - 2.0 * c / sdiff;
            }
            row[j] += rem * rule.weights[j] * ds;
          }
        } else {
          adaptive_rows(domain, p, rule, -1.0, 1.0, 0, x, w, kernel, row);
        }
      }
      D.block(i, Eigen::Index(pi) * v.order, 1, v.order) += row.transpose();
    }
  }
  return D;
}

BoundaryDensity neumann_data(const PlanarDomain& domain, const TriMesh& mesh, const Eigen::VectorXcd& u,
                             const ComplexFrequency& f) {
  if (u.size() != Eigen::Index(mesh.vertices.size())) throw std::invalid_argument("field size does not match mesh");
  const cplx w = f.omega;
  const cplx root = std::sqrt(1.0 - w * w);
  // boundary edge -> owning triangle
  std::vector<int> owner(mesh.boundary_edges.size(), -1);
  {
    std::vector<std::vector<std::pair<int, int>>> by_vertex(mesh.vertices.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
      for (int k = 0; k < 3; ++k) by_vertex[std::size_t(mesh.triangles[t][k])].push_back({int(t), mesh.triangles[t][(k + 1) % 3]});
    for (std::size_t b = 0; b < mesh.boundary_edges.size(); ++b)
      for (auto [t, nxt] : by_vertex[std::size_t(mesh.boundary_edges[b][0])])
        if (nxt == mesh.boundary_edges[b][1]) owner[b] = t;
  }
  BoundaryDensity out;
  out.values.resize(Eigen::Index(mesh.boundary_edges.size()));
  for (std::size_t b = 0; b < mesh.boundary_edges.size(); ++b) {
    const int t = owner[b];
    if (t < 0) throw MeshFailure("boundary edge without an adjacent triangle");
    const auto& tri = mesh.triangles[std::size_t(t)];
    const Vec2 &p0 = mesh.vertices[std::size_t(tri[0])], &p1 = mesh.vertices[std::size_t(tri[1])],
               &p2 = mesh.vertices[std::size_t(tri[2])];
    Eigen::Matrix2d J;
    J << p1 - p0, p2 - p0;
    const Eigen::Matrix2d Jit = J.inverse().transpose();
    const Vec2c du(u[tri[1]] - u[tri[0]], u[tri[2]] - u[tri[0]]);
    const Vec2c grad = Jit.cast<cplx>() * du;
    const cplx Lp = 0.5 * (w * grad[0] + root * grad[1]);
    const BoundaryPoint &a = mesh.boundary_point[std::size_t(mesh.boundary_edges[b][0])],
                        &bb = mesh.boundary_point[std::size_t(mesh.boundary_edges[b][1])];
    const Vec2 mid = 0.5 * (mesh.vertices[std::size_t(mesh.boundary_edges[b][0])] + mesh.vertices[std::size_t(mesh.boundary_edges[b][1])]);
    BoundaryPoint mp = domain.project(mid);
    const Vec2 tau = domain.tangent(mp);
    double weight = PlanarDomain::theta_distance(a.theta, bb.theta) * domain.total_length();
    const cplx dl = ell_c(tau, w, Sign::plus);
    out.nodes.push_back(mp);
    out.weights.push_back(weight);
    out.values[Eigen::Index(b)] = -2.0 * w * root * Lp * dl;
  }
  return out;
}

Vec2 corner_param_point(const CornerClass& corner, double theta) {
  if (corner.mu != Sign::plus || corner.nu != Sign::plus)
    throw std::invalid_argument("chart parameterization is defined for (+,+) corners; reflect the domain first");
  const double lp = theta >= 0 ? corner.alpha_plus * theta : corner.alpha_minus * theta;
  const double lm = theta >= 0 ? theta : -theta;
  const double l = corner.lambda;
  return corner.corner.xy + Vec2(l * (lp - lm) / 2.0, std::sqrt(1.0 - l * l) * (lp + lm) / 2.0);
}

KernelEval corner_kernel_closed_form(double theta, double theta_prime, const CornerClass& corner,
                                     const ComplexFrequency& f, ZChoice zc, double regularization) {
  if (corner.mu != Sign::plus || corner.nu != Sign::plus)
    throw std::invalid_argument("closed-form kernel is written for (+,+) corners; reflect the domain first");
  const cplx c = c_omega(f);
  const double eps = f.omega.imag();
  const double alpha = corner.alpha_plus / corner.alpha_minus;
  KernelEval k;
  if ((theta > 0) == (theta_prime > 0) || theta == 0.0 || theta_prime == 0.0) {
    k.regime = KernelRegime::diagonal;
    k.quadrant = theta > 0 ? 3 : 4;
    k.descriptor = "c/(theta - theta' + i0) + c/(theta - theta' - i0)";
    if (theta == theta_prime) {
      if (!(regularization > 0)) throw DiagonalSingular("kernel evaluated on the diagonal without regularization");
      k.K_plus = c / (kI * regularization);
      k.K_minus = c / (-kI * regularization);
      return k;
    }
    k.K_plus = c / (theta - theta_prime);
    k.K_minus = c / (theta - theta_prime);
    return k;
  }
  const std::array<cplx, 4> z = zc == ZChoice::exact ? exact_z(corner.alpha_plus, corner.alpha_minus, f.omega)
                                                     : leading_order_z(corner.alpha_plus, corner.alpha_minus, corner.lambda);
  const cplx ie = kI * eps;
  k.regime = KernelRegime::off_diagonal;
  if (theta < 0) {
    k.quadrant = 1;
    k.K_plus = c / (theta - alpha * (1.0 + ie * z[0]) * theta_prime);
    k.K_minus = c / (theta + (1.0 + ie * z[2]) * theta_prime);
  } else {
    k.quadrant = 2;
    k.K_plus = c / (theta - (1.0 - ie * z[1]) * theta_prime / alpha);
    k.K_minus = c / (theta + (1.0 - ie * z[3]) * theta_prime);
  }
  return k;
}

KernelEval corner_kernel_numeric(double theta, double theta_prime, const CornerClass& corner,
                                 const ComplexFrequency& f) {
  const cplx c = c_omega(f);
  const Vec2 y = corner_param_point(corner, theta_prime);
  const double h = 1e-4 * std::abs(theta);
  const Vec2 xp = corner_param_point(corner, theta + h), xm = corner_param_point(corner, theta - h);
  KernelEval k;
  k.quadrant = (theta > 0) == (theta_prime > 0) ? (theta > 0 ? 3 : 4) : (theta < 0 ? 1 : 2);
  k.regime = k.quadrant <= 2 ? KernelRegime::off_diagonal : KernelRegime::diagonal;
  k.K_plus = c * std::log(ell_c(xp - y, f.omega, Sign::plus) / ell_c(xm - y, f.omega, Sign::plus)) / (2.0 * h);
  k.K_minus = c * std::log(ell_c(xp - y, f.omega, Sign::minus) / ell_c(xm - y, f.omega, Sign::minus)) / (2.0 * h);
  k.descriptor = "central difference of c log l(x(theta) - x(theta'))";
  return k;
}

KernelCheckReport kernel_check(const CornerClass& corner, const ComplexFrequency& f, int samples, double chart_size) {
  KernelCheckReport rep;
  rep.samples_per_quadrant = samples * samples;
  for (int q = 0; q < 4; ++q) {
    for (int i = 0; i < samples; ++i)
      for (int j = 0; j < samples; ++j) {
        const double a = chart_size * std::pow(1e-3, 1.0 - double(i) / std::max(1, samples - 1));
        double b = chart_size * std::pow(1e-3, 1.0 - (double(j) + 0.37) / std::max(1, samples - 1));
        b = std::min(b, chart_size);
        double th, tp;
        switch (q) {
          case 0: th = -a; tp = b; break;
          case 1: th = a; tp = -b; break;
          case 2: th = a; tp = b; break;
          default: th = -a; tp = -b; break;
        }
        if (th == tp) continue;
        const KernelEval num = corner_kernel_numeric(th, tp, corner, f);
        // Numerical total through the fundamental solution.
        const Vec2 y = corner_param_point(corner, tp);
        const double h = 1e-4 * std::abs(th);
        const cplx total = (fundamental_solution(corner_param_point(corner, th + h) - y, f) -
                            fundamental_solution(corner_param_point(corner, th - h) - y, f)) / (2.0 * h);
        for (int zc = 0; zc < 2; ++zc) {
          const KernelEval cf = corner_kernel_closed_form(th, tp, corner, f, zc == 0 ? ZChoice::exact : ZChoice::leading_order);
          double err = std::abs(cf.K_plus - num.K_plus) / std::abs(num.K_plus);
          err = std::max(err, std::abs(cf.K_minus - num.K_minus) / std::abs(num.K_minus));
          err = std::max(err, std::abs(cf.total() - total) / std::abs(total));
          auto& slot = zc == 0 ? rep.max_rel_error_exact[std::size_t(q)] : rep.max_rel_error_leading[std::size_t(q)];
          slot = std::max(slot, err);
        }
      }
  }
  return rep;
}

BoundarySolveResult boundary_solve(const PlanarDomain& domain, const ComplexFrequency& f, const BoundaryDensity& g,
                                   cplx mass) {
  require_off_axis(f, "boundary_solve");
  if (std::abs(f.omega.imag()) < 0.02) throw std::invalid_argument("boundary_solve is validated for |Im omega| >= 0.02");
  const Eigen::MatrixXcd D = differentiated_single_layer_matrix(domain, g, f);
  const Eigen::Index N = g.size();
  Eigen::MatrixXcd B(N + 1, N + 1);
  B.topLeftCorner(N, N) = D;
  B.topRightCorner(N, 1).setOnes();
  for (Eigen::Index j = 0; j < N; ++j) B(N, j) = g.weights[std::size_t(j)];
  B(N, N) = 0.0;
  Eigen::VectorXcd rhs(N + 1);
  rhs.head(N) = g.values;
  rhs[N] = mass;
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(B);
  const double rc = lu.rcond();
  BoundarySolveResult out;
  out.condition_estimate = rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  if (out.condition_estimate > 1e12) throw IllConditioned("boundary system condition estimate " + std::to_string(out.condition_estimate));
  const Eigen::VectorXcd sol = lu.solve(rhs);
  out.residual = (B * sol - rhs).norm() / std::max(rhs.norm(), 1e-300);
  out.v = g;
  out.v.values = sol.head(N);
  out.multiplier = sol[N];
  return out;
}

}  // namespace wavetank
