#pragma once

// Independent reference computations shared by the unit tests and the acceptance runner.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

#include "wavetank/evolution.hpp"
#include "wavetank/potential.hpp"

namespace wavetank::oracle {

// int_0^t sin(s sqrt(mu)) / sqrt(mu) exp(-i lambda s) ds by adaptive Gauss-Kronrod.
inline cplx W_quadrature(double t, double lambda, double mu) {
  using boost::math::quadrature::gauss_kronrod;
  const double s0 = std::sqrt(mu);
  auto kernel = [&](double s) { return s0 > 0.0 ? std::sin(s * s0) / s0 : s; };
  const double re = gauss_kronrod<double, 61>::integrate([&](double s) { return kernel(s) * std::cos(lambda * s); }, 0.0, t, 20, 1e-14);
  const double im = gauss_kronrod<double, 61>::integrate([&](double s) { return -kernel(s) * std::sin(lambda * s); }, 0.0, t, 20, 1e-14);
  return {re, im};
}

inline cplx smooth_density(const BoundaryPoint& p) {
  const double t = p.theta, pi = std::numbers::pi;
  return cplx(std::cos(2 * pi * t) + 0.3 * std::sin(4 * pi * t), 0.5 * std::sin(2 * pi * t));
}

inline BoundaryDensity sampled(const PlanarDomain& d, cplx (*fn)(const BoundaryPoint&), const PanelOptions& o = {}) {
  BoundaryDensity v = make_panel_density(d, o);
  for (Eigen::Index i = 0; i < v.size(); ++i) v.values[i] = fn(v.nodes[std::size_t(i)]);
  return v;
}

// dC v at a boundary point by adaptive Gauss-Kronrod over every edge: principal value on the
// point's own edge via subtraction, the plain kernel c l(tau)/l(x - y) elsewhere. Straight edges only.
inline cplx dC_quadrature(const PlanarDomain& d, const ComplexFrequency& f, cplx (*fn)(const BoundaryPoint&),
                          const BoundaryPoint& x) {
  using boost::math::quadrature::gauss_kronrod;
  auto gk = [](auto g, double a, double b) { return gauss_kronrod<double, 31>::integrate(g, a, b, 15, 1e-11); };
  const cplx c = c_omega(f), w = f.omega;
  const Vec2 tau = d.tangent(x);
  const cplx lp = ell(tau, w, Sign::plus), lm = ell(tau, w, Sign::minus);
  cplx sum = 0.0;
  for (std::size_t e = 0; e < d.edge_count(); ++e) {
    const double L = edge_length(d.edges()[e]);
    if (e == x.edge_index) {
      const double sx = x.local_param * L;
      const cplx vx = fn(x);
      auto rem = [&](double s) {
        if (s == sx) return cplx(0.0);
        return 2.0 * c * (fn(d.at_edge(e, s / L)) - vx) / (sx - s);
      };
      sum += gk(rem, 0.0, sx) + gk(rem, sx, L) + 2.0 * c * vx * std::log(sx / (L - sx));
    } else {
      auto k = [&](double s) {
        const BoundaryPoint y = d.at_edge(e, s / L);
        const Vec2 r = x.xy - y.xy;
        if (r.norm() == 0.0) return cplx(0.0);
        return c * (lp / ell(r, w, Sign::plus) + lm / ell(r, w, Sign::minus)) * fn(y);
      };
      sum += gk(k, 0.0, L);
    }
  }
  return sum;
}

}  // namespace wavetank::oracle
