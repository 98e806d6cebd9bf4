#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "wavetank/billiard.hpp"
#include "wavetank/evolution.hpp"
#include "wavetank/lanczos.hpp"

using namespace wavetank;

namespace {

const double kPi = std::numbers::pi;

Eigen::VectorXd interpolate(const TriMesh& m, const StiffnessForms& f, double (*fn)(const Vec2&)) {
  Eigen::VectorXd x(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) x[i] = fn(m.vertices[std::size_t(f.vertex[std::size_t(i)])]);
  return x;
}

double sinsin(const Vec2& x) { return std::sin(kPi * x.x()) * std::sin(kPi * x.y()); }

// Dense generalized eigenvalues of (K2, K).
Eigen::VectorXd dense_spectrum(const StiffnessForms& f) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Eigen::MatrixXd(f.K2), Eigen::MatrixXd(f.K));
  return ges.eigenvalues();
}

MeshOptions square_lattice(double h) {
  MeshOptions o;
  o.h = h;
  o.lattice = Lattice::square;
  return o;
}

}  // namespace

TEST_CASE("forms are symmetric and ordered") {
  for (const PlanarDomain& d : {make_unit_square(), make_trapezoid(1, 1), make_tilted_square(kPi / 16)}) {
    const TriMesh m = triangulate(d, 0.08);
    const StiffnessForms f = assemble_forms(m);
    for (const SpMat* A : {&f.K1, &f.K2, &f.K, &f.M}) CHECK((Eigen::MatrixXd(*A) - Eigen::MatrixXd(A->transpose())).norm() < 1e-14);
    const Eigen::VectorXd mu = dense_spectrum(f);
    CHECK(mu.minCoeff() >= -1e-10);
    CHECK(mu.maxCoeff() <= 1.0 + 1e-10);
    std::mt19937 rng(4);
    std::normal_distribution<double> g;
    for (int k = 0; k < 20; ++k) {
      Eigen::VectorXd x(f.size());
      for (auto& v : x) v = g(rng);
      const double q1 = x.dot(f.K1 * x), q2 = x.dot(f.K2 * x), qm = x.dot(f.M * x);
      CHECK(q1 >= 0.0);
      CHECK(q2 >= 0.0);
      CHECK(qm > 0.0);
      CHECK(q2 <= x.dot(f.K * x) * (1.0 + 1e-14));
    }
  }
}

TEST_CASE("forms on an interpolated eigenfunction") {
  // int (d1 u)^2 = int (d2 u)^2 = pi^2/4 and int u^2 = 1/4 for sin(pi x1) sin(pi x2)
  std::vector<double> err;
  for (double h : {0.08, 0.04, 0.02}) {
    const TriMesh m = triangulate(make_unit_square(), h);
    const StiffnessForms f = assemble_forms(m);
    const Eigen::VectorXd x = interpolate(m, f, sinsin);
    const double e1 = std::abs(x.dot(f.K1 * x) - kPi * kPi / 4) / (kPi * kPi / 4);
    const double e2 = std::abs(x.dot(f.K2 * x) - kPi * kPi / 4) / (kPi * kPi / 4);
    const double em = std::abs(x.dot(f.M * x) - 0.25) / 0.25;
    CHECK(e1 < 3 * h * h);
    CHECK(e2 < 3 * h * h);
    CHECK(em < 3 * h * h);
    err.push_back(e1 + e2);
  }
  CHECK(err[2] < err[0] / 4);
}

TEST_CASE("load vector of an interior bump") {
  const TriMesh m = triangulate(make_trapezoid(1, 1), 0.02);
  const StiffnessForms f = assemble_forms(m);
  const Bump b{Vec2(0.6, 0.45), 0.2, 1.5};
  // interior hat functions sum to one away from the boundary
  const Eigen::VectorXd F = load_vector(m, f, b);
  CHECK(std::abs(F.sum() - b.integral()) < 1e-4 * b.integral());
  const Eigen::VectorXd G = load_vector(m, f, [](const Vec2&) { return 0.0; });
  CHECK(G.norm() == 0.0);
}

TEST_CASE("resolvent solve") {
  const TriMesh m = triangulate(make_trapezoid(1, 1), 0.04);
  const StiffnessForms f = assemble_forms(m);
  const Eigen::VectorXcd F = load_vector(m, f, Bump{Vec2(0.6, 0.45), 0.2, 1.0}).cast<cplx>();
  const cplx w(0.8, 0.05);
  const Eigen::VectorXcd u = resolvent_solve(f, F, w);
  const Eigen::SparseMatrix<cplx> A = (w * w) * f.K.cast<cplx>() - f.K2.cast<cplx>();
  CHECK((A * u - F).norm() < 1e-10 * F.norm());

  SUBCASE("conjugation") {
    const Eigen::VectorXcd v = resolvent_solve(f, F, cplx(0.8, -0.05));
    CHECK((v - u.conjugate()).norm() < 1e-12 * u.norm());
  }
  SUBCASE("decay for large imaginary part") {
    const Eigen::VectorXcd far = resolvent_solve(f, F, cplx(0.8, 10.0));
    const Eigen::VectorXcd near = resolvent_solve(f, F, cplx(0.8, 0.1));
    CHECK(far.norm() < 0.02 * near.norm());
  }
  SUBCASE("real axis rejected") { CHECK_THROWS_AS(resolvent_solve(f, F, cplx(0.8, 0.0)), std::invalid_argument); }
  SUBCASE("zero load") { CHECK(resolvent_solve(f, Eigen::VectorXcd::Zero(f.size()), w).norm() == 0.0); }
}

TEST_CASE("modal identity against the direct solve") {
  const TriMesh m = triangulate(make_trapezoid(1, 1), 0.06);
  const StiffnessForms f = assemble_forms(m);
  const Eigen::VectorXd F = load_vector(m, f, Bump{Vec2(0.6, 0.45), 0.2, 1.0});
  const cplx w(0.8, 0.05);
  // all modes from a dense solve, K-normalized
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Eigen::MatrixXd(f.K2), Eigen::MatrixXd(f.K));
  const Eigen::VectorXd c = ges.eigenvectors().transpose() * F;
  Eigen::VectorXcd modal = Eigen::VectorXcd::Zero(f.size());
  for (Eigen::Index k = 0; k < c.size(); ++k)
    modal += (c[k] / (w * w - ges.eigenvalues()[k])) * ges.eigenvectors().col(k).cast<cplx>();
  const Eigen::VectorXcd direct = resolvent_solve(f, F.cast<cplx>(), w);
  CHECK((modal - direct).norm() < 1e-8 * direct.norm());

  // a Lanczos window with the load projected onto it
  const ModeSet win = eigenmodes(f, 0, std::make_pair(0.5, 0.8));
  double rem = 0.0;
  const Eigen::VectorXd P = project_load(f, win, F, &rem);
  CHECK(rem > 0.0);
  const Eigen::VectorXd cw = win.phis.transpose() * P;
  Eigen::VectorXcd modal_w = Eigen::VectorXcd::Zero(f.size());
  for (Eigen::Index k = 0; k < cw.size(); ++k) modal_w += (cw[k] / (w * w - win.mus[k])) * win.phis.col(k).cast<cplx>();
  const Eigen::VectorXcd direct_w = resolvent_solve(f, P.cast<cplx>(), w);
  CHECK((modal_w - direct_w).norm() < 1e-8 * direct_w.norm());
}

TEST_CASE("inertia count matches the dense spectrum") {
  const TriMesh m = triangulate(make_tilted_square(kPi / 16), 0.08);
  const StiffnessForms f = assemble_forms(m);
  const Eigen::VectorXd mu = dense_spectrum(f);
  for (double s : {0.1, 0.37, 0.5, 0.64, 0.9}) {
    const Eigen::Index dense = (mu.array() < s).count();
    CHECK(count_below(f.K2, f.K, s) == dense);
  }
}

TEST_CASE("windowed modes equal the dense modes in the window") {
  const TriMesh m = triangulate(make_trapezoid(1, 1), 0.06);
  const StiffnessForms f = assemble_forms(m);
  const Eigen::VectorXd mu = dense_spectrum(f);
  const double lam = 0.8, delta = 0.03;
  const ModeSet w = eigenmodes(f, 0, std::make_pair(lam * lam - delta, lam * lam + delta));
  std::vector<double> expected;
  for (double v : mu) if (v >= lam * lam - delta && v <= lam * lam + delta) expected.push_back(v);
  REQUIRE(w.count() == Eigen::Index(expected.size()));
  for (std::size_t k = 0; k < expected.size(); ++k) CHECK(std::abs(w.mus[Eigen::Index(k)] - expected[k]) < 1e-10);
  // K-orthonormal, small residuals
  const Eigen::MatrixXd G = w.phis.transpose() * (f.K * w.phis);
  CHECK((G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).norm() < 1e-9);
  CHECK(w.residuals.maxCoeff() < 1e-8);
}

TEST_CASE("lowest modes equal the dense lowest modes") {
  const TriMesh m = triangulate(make_unit_square(), 0.08);
  const StiffnessForms f = assemble_forms(m);
  const Eigen::VectorXd mu = dense_spectrum(f);
  const ModeSet lo = eigenmodes(f, 30);
  REQUIRE(lo.count() == 30);
  for (Eigen::Index k = 0; k < 30; ++k) CHECK(std::abs(lo.mus[k] - mu[k]) < 1e-10);
  CHECK_THROWS_AS(eigenmodes(f, 0, std::make_pair(0.5, 0.4)), std::invalid_argument);
}

TEST_CASE("unit square Ritz values on Laplacian modes") {
  // (m, n) eigenfunction sin(m pi x1) sin(n pi x2) has P-eigenvalue n^2/(m^2+n^2)
  std::vector<double> exact;
  for (int a = 1; a <= 6; ++a)
    for (int b = 1; b <= 6; ++b)
      if (a * a + b * b <= 32) exact.push_back(double(b * b) / (a * a + b * b));
  std::sort(exact.begin(), exact.end());
  std::vector<double> errs;
  const std::vector<double> hs = {0.08, 0.04, 0.02};
  for (double h : hs) {
    const TriMesh m = triangulate(make_unit_square(), square_lattice(h));
    const StiffnessForms f = assemble_forms(m);
    const ModeSet L = laplacian_modes(f, 20, true);
    const ModeSet R = ritz_restrict(f, L.phis);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < 20; ++k) {
      CHECK(R.mus[k] >= -1e-10);
      CHECK(R.mus[k] <= 1.0 + 1e-10);
      worst = std::max(worst, std::abs(R.mus[k] - exact[std::size_t(k)]) / exact[std::size_t(k)]);
    }
    errs.push_back(worst);
  }
  CHECK(errs[2] < 0.01);
  // least-squares slope of log err against log h
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < hs.size(); ++k) {
    const double x = std::log(hs[k]), y = std::log(errs[k]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
  // the (5,1) mode is pre-asymptotic at h = 0.08
  CHECK(slope > 1.75);
  CHECK(slope < 2.25);
}

TEST_CASE("square lattice meshes are valid") {
  const TriMesh m = triangulate(make_unit_square(), square_lattice(0.05));
  CHECK(m.min_angle_degrees() >= 20.0);
  CHECK(std::abs(m.min_angle_degrees() - 45.0) < 1e-9);
  double area = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) area += m.triangle_area(t);
  CHECK(std::abs(area - 1.0) < 1e-12);
}

TEST_CASE("LAP sweep on the trapezoid") {
  const PlanarDomain d = make_trapezoid(1, 1);
  const double lam = 0.8, h = 0.02;
  REQUIRE(morse_smale_check(d, lam).verdict);
  const TriMesh m = triangulate(d, h);
  const StiffnessForms f = assemble_forms(m);
  const Eigen::VectorXd F = load_vector(m, f, Bump{Vec2(0.6, 0.45), 0.2, 1.0});
  const std::vector<char> tube = tube_mask(m, attractor_chords(d, lam), 3 * h);
  const LapReport r = lap_sweep(m, f, F, lam, {0.1, 0.05, 0.025}, tube);
  REQUIRE(r.cauchy_off_tube.size() == 2);
  CHECK(r.cauchy_decreasing);
  CHECK(r.localization_increasing);
  CHECK(r.h1[2] > r.h1[0]);
  for (double x : r.tube_energy_fraction) {
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
  }
  CHECK_THROWS_AS(lap_sweep(m, f, F, lam, {0.05, 0.1}, tube), std::invalid_argument);
  CHECK_THROWS_AS(lap_sweep(m, f, F, lam, {0.1, 0.0}, tube), std::invalid_argument);
}
