#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "wavetank/fem.hpp"
#include "wavetank/potential.hpp"
#include "oracles.hpp"

using namespace wavetank;
using oracle::sampled;
using oracle::smooth_density;

namespace {

const double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

ComplexFrequency off(double l, double e) { return ComplexFrequency::off_axis(cplx(l, e)); }

CornerClass trapezoid_corner(const PlanarDomain& d, double lambda) {
  return classify_corner(d, lambda, d.project(Vec2(2, 0)));
}

// P(omega) u = d2^2 u - omega^2 (d1^2 + d2^2) u by five-point differences.
template <class F>
cplx apply_P(const F& u, const Vec2& x, cplx w, double h) {
  const cplx c = u(x);
  const cplx d11 = (u(x + Vec2(h, 0)) - 2.0 * c + u(x - Vec2(h, 0))) / (h * h);
  const cplx d22 = (u(x + Vec2(0, h)) - 2.0 * c + u(x - Vec2(0, h))) / (h * h);
  return d22 - w * w * (d11 + d22);
}

// Tensor midpoint rule over the bump's bounding square.
cplx volume_midpoint(const Bump& b, const ComplexFrequency& f, const Vec2& x, int n) {
  const double h = 2.0 * b.radius / n;
  cplx s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vec2 y = b.center + Vec2(-b.radius + (i + 0.5) * h, -b.radius + (j + 0.5) * h);
      const double fv = b(y);
      if (fv != 0.0) s += fundamental_solution(x - y, f) * fv;
    }
  return s * h * h;
}

cplx interpolate_field(const TriMesh& m, const Eigen::VectorXcd& u, const Vec2& x) {
  Eigen::Vector3d bc;
  const int t = locate(m, x, &bc);
  REQUIRE(t >= 0);
  const auto& tr = m.triangles[std::size_t(t)];
  return bc[0] * u[tr[0]] + bc[1] * u[tr[1]] + bc[2] * u[tr[2]];
}

std::vector<Vec2> interior_points() {
  std::vector<Vec2> pts;
  for (int i = 0; i < 20; ++i) pts.push_back(Vec2(0.15 + 0.04 * i, 0.2 + 0.03 * (i % 7)));
  return pts;
}

}  // namespace

TEST_CASE("c_omega examples") {
  CHECK(std::abs(c_omega(ComplexFrequency::upper(1 / std::sqrt(2.0))) - kI / (2 * kPi)) < 1e-15);
  CHECK(std::abs(c_omega(ComplexFrequency::upper(0.8)) - kI / (1.92 * kPi)) < 1e-15);
  CHECK(std::abs(c_omega(ComplexFrequency::lower(0.8)) + kI / (1.92 * kPi)) < 1e-15);
  const cplx up = c_omega(off(0.8, 0.1)), down = c_omega(off(0.8, -0.1));
  CHECK(std::abs(down - std::conj(up)) < 1e-15);
  CHECK_THROWS_AS(ComplexFrequency::off_axis(cplx(0.8, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(ComplexFrequency::off_axis(cplx(1.2, 0.1)), std::invalid_argument);
}

TEST_CASE("fundamental solution examples") {
  const auto f = ComplexFrequency::upper(1 / std::sqrt(2.0));
  CHECK(std::abs(fundamental_solution(Vec2(0, 1), f) - kI * std::log(2.0) / (2 * kPi)) < 1e-15);
  CHECK(std::abs(fundamental_solution(Vec2(1, 0), f) - cplx(-0.5, std::log(2.0) / (2 * kPi))) < 1e-15);
  const double l = 0.8;
  CHECK_THROWS_AS(fundamental_solution(Vec2(l, std::sqrt(1 - l * l)), ComplexFrequency::upper(l)), OnCharacteristic);
  CHECK_THROWS_AS(fundamental_solution(Vec2(0, 0), off(0.8, 0.1)), std::invalid_argument);
}

TEST_CASE("lower limit is the conjugate of the upper limit") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 200; ++k) {
    const Vec2 x(u(rng), u(rng));
    for (double l : {0.3, 0.8}) {
      const cplx a = fundamental_solution(x, ComplexFrequency::upper(l));
      const cplx b = fundamental_solution(x, ComplexFrequency::lower(l));
      CHECK(std::abs(b - std::conj(a)) < 1e-14 * std::max(1.0, std::abs(a)));
      const cplx c = fundamental_solution(x, off(l, 0.05));
      const cplx d = fundamental_solution(x, off(l, -0.05));
      CHECK(std::abs(d - std::conj(c)) < 1e-14 * std::max(1.0, std::abs(c)));
    }
  }
}

TEST_CASE("off-axis limit approaches the upper side") {
  const Vec2 x(0.3, 0.9);
  const cplx lim = fundamental_solution(x, ComplexFrequency::upper(0.8));
  double prev = 1e300;
  for (double e : {1e-2, 1e-3, 1e-4}) {
    const double err = std::abs(fundamental_solution(x, off(0.8, e)) - lim);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("fundamental solution satisfies the PDE away from the origin") {
  const auto f = off(0.8, 0.1);
  auto E = [&](const Vec2& y) { return fundamental_solution(y, f); };
  for (int k = 0; k < 12; ++k) {
    const double a = 2 * kPi * k / 12;
    for (double r : {0.3, 0.7}) {
      const Vec2 x = r * Vec2(std::cos(a), std::sin(a));
      const cplx res = apply_P(E, x, f.omega, 1e-3);
      // scale of the individual second derivatives
      const double scale = std::abs((E(x + Vec2(1e-3, 0)) - 2.0 * E(x) + E(x - Vec2(1e-3, 0))) / 1e-6) +
                           std::abs((E(x + Vec2(0, 1e-3)) - 2.0 * E(x) + E(x - Vec2(0, 1e-3))) / 1e-6);
      CHECK(std::abs(res) < 1e-4 * scale);
    }
  }
}

TEST_CASE("fundamental gradient matches differences") {
  const auto f = off(0.8, 0.1);
  const Vec2 x(0.4, -0.25);
  const double h = 1e-6;
  const Vec2c g = fundamental_gradient(x, f);
  const cplx d1 = (fundamental_solution(x + Vec2(h, 0), f) - fundamental_solution(x - Vec2(h, 0), f)) / (2 * h);
  const cplx d2 = (fundamental_solution(x + Vec2(0, h), f) - fundamental_solution(x - Vec2(0, h), f)) / (2 * h);
  CHECK(std::abs(g[0] - d1) < 1e-8);
  CHECK(std::abs(g[1] - d2) < 1e-8);
}

TEST_CASE("volume potential against a midpoint oracle") {
  const Bump b{Vec2(0.6, 0.45), 0.2, 1.0};
  for (const auto& [f, x] : {std::pair{off(0.8, 0.1), Vec2(1.5, 0.9)}, std::pair{ComplexFrequency::upper(0.8), Vec2(0.6, 1.5)}}) {
    const cplx coarse = volume_midpoint(b, f, x, 100), fine = volume_midpoint(b, f, x, 400);
    CHECK(std::abs(coarse - fine) < 1e-7 * std::abs(fine));
    CHECK(std::abs(volume_potential(b, f, x) - fine) < 1e-6 * std::abs(fine));
  }
}

TEST_CASE("volume potential is linear") {
  const Bump b{Vec2(0.6, 0.45), 0.2, 1.0}, b2{Vec2(0.6, 0.45), 0.2, 2.0};
  for (const Vec2& x : {Vec2(0.6, 0.45), Vec2(0.1, 0.9), Vec2(1.4, 0.2)}) {
    const auto f = off(0.8, 0.05);
    CHECK(std::abs(volume_potential(b2, f, x) - 2.0 * volume_potential(b, f, x)) < 1e-14 * std::abs(volume_potential(b2, f, x)));
  }
}

TEST_CASE("volume potential solves P(omega) R f = f") {
  const Bump b{Vec2(0.6, 0.45), 0.2, 1.0};
  const auto f = off(0.8, 0.1);
  const double h = 1e-3;
  for (const Vec2& x : {Vec2(0.6, 0.45), Vec2(0.66, 0.5), Vec2(0.52, 0.4)}) {
    // derivatives of the gradient potential
    auto G = [&](const Vec2& y) { return volume_potential_gradient(b, f, y); };
    const cplx d11 = (G(x + Vec2(h, 0))[0] - G(x - Vec2(h, 0))[0]) / (2 * h);
    const cplx d22 = (G(x + Vec2(0, h))[1] - G(x - Vec2(0, h))[1]) / (2 * h);
    const cplx Pu = d22 - f.omega * f.omega * (d11 + d22);
    CHECK(std::abs(Pu - b(x)) < 1e-3 * std::abs(b(x)));
  }
}

TEST_CASE("volume gradient matches differences of the potential") {
  const Bump b{Vec2(0.6, 0.45), 0.2, 1.0};
  const auto f = off(0.8, 0.1);
  const Vec2 x(0.7, 0.5);
  const double h = 1e-4;
  const Vec2c g = volume_potential_gradient(b, f, x);
  const cplx d1 = (volume_potential(b, f, x + Vec2(h, 0)) - volume_potential(b, f, x - Vec2(h, 0))) / (2 * h);
  const cplx d2 = (volume_potential(b, f, x + Vec2(0, h)) - volume_potential(b, f, x - Vec2(0, h))) / (2 * h);
  CHECK(std::abs(g[0] - d1) < 1e-5 * std::abs(g[0]));
  CHECK(std::abs(g[1] - d2) < 1e-5 * std::abs(g[1]));
}

TEST_CASE("single layer basics") {
  const PlanarDomain d = make_trapezoid(1, 1);
  const auto f = off(0.8, 0.1);
  BoundaryDensity z = make_panel_density(d);
  CHECK(z.size() == 512);
  double wsum = 0.0;
  for (double w : z.weights) wsum += w;
  CHECK(std::abs(wsum - d.total_length()) < 1e-10);
  CHECK(single_layer(d, z, f, Vec2(0.5, 0.5)) == cplx(0.0));
  CHECK(restricted_single_layer(d, z, f, d.at_edge(0, 0.3)) == cplx(0.0));

  const BoundaryDensity v = sampled(d, smooth_density);
  SUBCASE("self-convergence in the panel order") {
    PanelOptions o;
    o.order = 16;
    const BoundaryDensity v16 = sampled(d, smooth_density, o);
    for (const Vec2& x : {Vec2(0.5, 0.5), Vec2(1.2, 0.3), Vec2(0.2, 0.8)})
      CHECK(std::abs(single_layer(d, v, f, x) - single_layer(d, v16, f, x)) < 1e-8);
  }
  SUBCASE("gradient matches differences") {
    const Vec2 x(0.7, 0.4);
    const double h = 1e-5;
    const Vec2c g = single_layer_gradient(d, v, f, x);
    const cplx d1 = (single_layer(d, v, f, x + Vec2(h, 0)) - single_layer(d, v, f, x - Vec2(h, 0))) / (2 * h);
    const cplx d2 = (single_layer(d, v, f, x + Vec2(0, h)) - single_layer(d, v, f, x - Vec2(0, h))) / (2 * h);
    CHECK(std::abs(g[0] - d1) < 1e-6);
    CHECK(std::abs(g[1] - d2) < 1e-6);
  }
  SUBCASE("restriction is the boundary limit") {
    for (double t : {0.3, 0.55}) {
      const BoundaryPoint p = d.at_edge(0, t);
      const Vec2 inward(0, 1);
      const cplx lim = restricted_single_layer(d, v, f, p);
      CHECK(std::abs(single_layer(d, v, f, p.xy + 1e-7 * inward) - lim) < 1e-5 * std::abs(lim));
    }
    CHECK_THROWS_AS(restricted_single_layer(d, v, f, v.nodes[100], false), NearDiagonalBreakdown);
  }
}

TEST_CASE("closed-form corner kernel examples") {
  const PlanarDomain d = make_trapezoid(1, 1);
  const CornerClass k = trapezoid_corner(d, 0.8);
  const std::array<cplx, 4> z = leading_order_z(k.alpha_plus, k.alpha_minus, 0.8);
  CHECK(std::abs(z[2] - (8.0 / 7.0) / (2 * 0.8 * 0.36)) < 1e-12);
  CHECK(std::abs(z[2] - 1.98413) < 1e-5);
  const auto f0 = ComplexFrequency::upper(0.8);
  const KernelEval e = corner_kernel_closed_form(-0.1, 0.2, k, f0);
  CHECK(e.quadrant == 1);
  CHECK(e.regime == KernelRegime::off_diagonal);
  CHECK(std::abs(e.K_plus - c_omega(f0) / (-0.1 - 0.2 / 7)) < 1e-12);
  CHECK(std::abs(-0.1 - 0.2 / 7 + 0.12857) < 1e-5);
  const KernelEval s = corner_kernel_closed_form(0.1, 0.3, k, f0);
  CHECK(s.regime == KernelRegime::diagonal);
  CHECK(std::abs(s.K_plus - c_omega(f0) / (0.1 - 0.3)) < 1e-14);
  CHECK_THROWS_AS(corner_kernel_closed_form(0.2, 0.2, k, f0), DiagonalSingular);
}

TEST_CASE("closed-form kernel is Lipschitz in eps") {
  const PlanarDomain d = make_trapezoid(1, 1);
  const CornerClass k = trapezoid_corner(d, 0.8);
  for (auto [th, tp] : {std::pair{-0.1, 0.2}, std::pair{0.15, -0.05}}) {
    const KernelEval e0 = corner_kernel_closed_form(th, tp, k, ComplexFrequency::upper(0.8));
    std::vector<double> ratio;
    for (double e : {1e-2, 1e-3, 1e-4}) {
      const KernelEval ee = corner_kernel_closed_form(th, tp, k, off(0.8, e));
      ratio.push_back((std::abs(ee.K_plus - e0.K_plus) + std::abs(ee.K_minus - e0.K_minus)) / e);
    }
    for (double r : ratio) CHECK(r < 2.0 * ratio.back() + 1e-9);
  }
}

TEST_CASE("closed-form kernel matches differentiated point sources") {
  const PlanarDomain d = make_trapezoid(1, 1);
  const CornerClass k = trapezoid_corner(d, 0.8);
  const auto f = off(0.8, 0.1);
  const KernelCheckReport r = kernel_check(k, f, 20, 0.05);
  for (int q = 0; q < 4; ++q) CHECK(r.max_rel_error_exact[std::size_t(q)] < 1e-3);
  // an independent sample through E directly
  const Vec2 y = corner_param_point(k, 0.02);
  const double th = -0.01, h = 1e-7;
  const cplx dE = (fundamental_solution(corner_param_point(k, th + h) - y, f) -
                   fundamental_solution(corner_param_point(k, th - h) - y, f)) / (2 * h);
  const KernelEval cf = corner_kernel_closed_form(th, 0.02, k, f, ZChoice::exact);
  CHECK(std::abs(cf.total() - dE) < 1e-3 * std::abs(dE));
}

TEST_CASE("kernels agree at mirrored corners") {
  const PlanarDomain d = make_trapezoid(1, 1);
  const PlanarDomain r = reflect(d, Reflection::x1);
  const CornerClass a = trapezoid_corner(d, 0.8);
  const CornerClass b = classify_corner(r, 0.8, r.project(reflect_point(Vec2(2, 0), Reflection::x1)));
  CHECK(std::abs(a.alpha_plus / a.alpha_minus - b.alpha_plus / b.alpha_minus) < 1e-12);
  CHECK(std::abs(a.alpha - b.alpha) < 1e-12);
}

TEST_CASE("Neumann data") {
  SUBCASE("zero field") {
    const PlanarDomain d = make_unit_square();
    const TriMesh m = triangulate(d, 0.1);
    const BoundaryDensity n = neumann_data(d, m, Eigen::VectorXcd::Zero(Eigen::Index(m.vertices.size())), off(0.8, 0.1));
    CHECK(n.values.norm() == 0.0);
  }
  SUBCASE("interpolated eigenfunction on the bottom edge") {
    const PlanarDomain d = make_unit_square();
    const double h = 0.02;
    const TriMesh m = triangulate(d, h);
    Eigen::VectorXcd u(Eigen::Index(m.vertices.size()));
    for (std::size_t i = 0; i < m.vertices.size(); ++i)
      u[Eigen::Index(i)] = std::sin(kPi * m.vertices[i].x()) * std::sin(kPi * m.vertices[i].y());
    const cplx w(0.8, 0.1);
    const BoundaryDensity n = neumann_data(d, m, u, ComplexFrequency::off_axis(w));
    double worst = 0.0;
    int count = 0;
    for (Eigen::Index i = 0; i < n.size(); ++i) {
      const Vec2 x = n.nodes[std::size_t(i)].xy;
      if (std::abs(x.y()) > 1e-14) continue;
      // -2 w sqrt(1-w^2) * (1/2) sqrt(1-w^2) pi sin(pi x1) * l+(tau) with tau = (1, 0)
      const cplx exact = -2.0 * w * std::sqrt(1.0 - w * w) * 0.5 * std::sqrt(1.0 - w * w) * kPi * std::sin(kPi * x.x()) / w;
      worst = std::max(worst, std::abs(n.values[i] - exact));
      ++count;
    }
    CHECK(count > 20);
    CHECK(worst < 3 * h * kPi);
  }
  SUBCASE("corner scaling exponent") {
    const PlanarDomain d = make_trapezoid(1, 1);
    MeshOptions o;
    o.h = 0.02;
    o.graded_points = {Vec2(2, 0)};
    o.grading = 0.05;
    o.h_min = 1e-5;
    const TriMesh m = triangulate(d, o);
    const StiffnessForms forms = assemble_forms(m);
    const Eigen::VectorXd F = load_vector(m, forms, Bump{Vec2(0.6, 0.45), 0.2, 1.0});
    const CornerClass k = trapezoid_corner(d, 0.8);
    const cplx w(0.8, 0.05);
    const Eigen::VectorXcd u = forms.to_nodal(resolvent_solve(forms, F.cast<cplx>(), w));
    const BoundaryDensity n = neumann_data(d, m, u, ComplexFrequency::off_axis(w));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (Eigen::Index i = 0; i < n.size(); ++i) {
      const Vec2 x = n.nodes[std::size_t(i)].xy;
      const double r = (x - Vec2(2, 0)).norm();
      if (std::abs(x.y()) > 1e-14 || r < 1e-3 || r > 1e-1) continue;
      const double X = std::log(r), Y = std::log(std::abs(n.values[i]));
      sx += X, sy += Y, sxx += X * X, sxy += X * Y, ++cnt;
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    CHECK(cnt > 20);
    CHECK(std::abs(slope - (indicial_exponent(k, w).real() - 1.0)) < 0.1);
  }
}

TEST_CASE("FEM field equals R f - S(N u) inside") {
  const PlanarDomain d = make_trapezoid(1, 1);
  const TriMesh m = triangulate(d, 0.01);
  const StiffnessForms forms = assemble_forms(m);
  const Bump b{Vec2(0.6, 0.45), 0.2, 1.0};
  const auto f = off(0.8, 0.1);
  const Eigen::VectorXcd u = forms.to_nodal(resolvent_solve(forms, load_vector(m, forms, b).cast<cplx>(), f.omega));
  const BoundaryDensity v = neumann_data(d, m, u, f);
  double worst = 0.0;
  for (const Vec2& x : interior_points())
    worst = std::max(worst, std::abs(interpolate_field(m, u, x) - (volume_potential(b, f, x) - single_layer(d, v, f, x))));
  CHECK(worst < 1e-2 * u.cwiseAbs().maxCoeff());
}

TEST_CASE("boundary solve") {
  const PlanarDomain d = make_trapezoid(1, 1);
  const auto f = off(0.8, 0.1);

  SUBCASE("zero data") {
    BoundaryDensity g = make_panel_density(d);
    const BoundarySolveResult r = boundary_solve(d, f, g, 0.0);
    CHECK(r.v.values.norm() == 0.0);
  }
  SUBCASE("validation range") {
    CHECK_THROWS_AS(boundary_solve(d, off(0.8, 0.01), make_panel_density(d), 0.0), std::invalid_argument);
  }
  SUBCASE("manufactured density is recovered") {
    const BoundaryDensity v = sampled(d, smooth_density);
    BoundaryDensity g = v;
    for (Eigen::Index i = 0; i < g.size(); ++i) g.values[i] = oracle::dC_quadrature(d, f, smooth_density, g.nodes[std::size_t(i)]);
    const BoundarySolveResult r = boundary_solve(d, f, g, v.mass());
    CHECK(r.residual < 1e-6);
    CHECK((r.v.values - v.values).norm() < 1e-4 * v.values.norm());
  }
}

TEST_CASE("boundary-reduced reconstruction matches the FEM field") {
  const PlanarDomain d = make_trapezoid(1, 1);
  const Bump b{Vec2(0.6, 0.45), 0.2, 1.0};
  const auto f = off(0.8, 0.05);
  // g = tangential derivative of R f along the boundary
  BoundaryDensity g = make_panel_density(d);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const Vec2c gr = volume_potential_gradient(b, f, g.nodes[std::size_t(i)].xy);
    const Vec2 tau = d.tangent(g.nodes[std::size_t(i)]);
    g.values[i] = gr[0] * tau[0] + gr[1] * tau[1];
  }
  // the mass fixes the constant in C v = R f
  const BoundarySolveResult s0 = boundary_solve(d, f, g, 0.0), s1 = boundary_solve(d, f, g, 1.0);
  const BoundaryPoint p = g.nodes[std::size_t(g.size() / 3)];
  const cplx c0 = restricted_single_layer(d, s0.v, f, p), c1 = restricted_single_layer(d, s1.v, f, p);
  const cplx mass = (volume_potential(b, f, p.xy) - c0) / (c1 - c0);
  BoundaryDensity v = s0.v;
  v.values = s0.v.values + mass * (s1.v.values - s0.v.values);
  double bmax = 0.0, berr = 0.0;
  for (std::size_t j = 0; j < g.nodes.size(); j += 4) {
    const cplx rhs = volume_potential(b, f, g.nodes[j].xy);
    bmax = std::max(bmax, std::abs(rhs));
    berr = std::max(berr, std::abs(restricted_single_layer(d, v, f, g.nodes[j]) - rhs));
  }
  CHECK(berr < 0.05 * bmax);

  const TriMesh m = triangulate(d, 0.01);
  const StiffnessForms forms = assemble_forms(m);
  const Eigen::VectorXcd u = forms.to_nodal(resolvent_solve(forms, load_vector(m, forms, b).cast<cplx>(), f.omega));
  double worst = 0.0;
  for (const Vec2& x : interior_points())
    worst = std::max(worst, std::abs(interpolate_field(m, u, x) - (volume_potential(b, f, x) - single_layer(d, v, f, x))));
  CHECK(worst < 0.05 * u.cwiseAbs().maxCoeff());
}
