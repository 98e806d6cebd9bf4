#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wavetank/evolution.hpp"

using namespace wavetank;
using oracle::W_quadrature;

namespace {

const double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

// Every mode of a small mesh from a dense solve, K-orthonormal.
ModeSet dense_modes(const StiffnessForms& f) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Eigen::MatrixXd(f.K2), Eigen::MatrixXd(f.K));
  ModeSet m;
  m.mus = ges.eigenvalues().cwiseMax(0.0);
  m.phis = ges.eigenvectors();
  m.residuals = Eigen::VectorXd::Zero(m.mus.size());
  return m;
}

ModeSet single_mode(const ModeSet& all, Eigen::Index j) {
  ModeSet m;
  m.mus = all.mus.segment(j, 1);
  m.phis = all.phis.col(j);
  m.residuals = Eigen::VectorXd::Zero(1);
  return m;
}

double rel_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).norm() / b.norm(); }

struct Setup {
  TriMesh mesh;
  StiffnessForms forms;
  Eigen::VectorXd F;
};

Setup trapezoid(double h) {
  Setup s;
  s.mesh = triangulate(make_trapezoid(1, 1), h);
  s.forms = assemble_forms(s.mesh);
  s.F = load_vector(s.mesh, s.forms, Bump{Vec2(0.6, 0.45), 0.2, 1.0});
  return s;
}

}  // namespace

TEST_CASE("W at t = 0 and the resonant closed form") {
  for (double mu : {0.0, 0.2, 0.64, 1.0}) CHECK(W_coeff(0.0, 0.8, mu) == cplx(0.0));
  for (double lam : {0.3, 0.8}) {
    for (double t : {0.5, 7.3, 40.0}) {
      const cplx expected = t / (2.0 * kI * lam) + (1.0 - std::exp(-2.0 * kI * lam * t)) / (4.0 * lam * lam);
      CHECK(std::abs(W_coeff(t, lam, lam * lam) - expected) < 1e-12 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST_CASE("W matches quadrature of its defining integral") {
  CHECK(std::abs(W_coeff(7.3, 0.8, 0.37) - W_quadrature(7.3, 0.8, 0.37)) < 1e-10);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      for (int k = 0; k < 10; ++k) {
        const double t = 0.25 + 3.0 * i, lam = 0.05 + 0.1 * j, mu = k / 9.0;
        worst = std::max(worst, std::abs(W_coeff(t, lam, mu) - W_quadrature(t, lam, mu)));
      }
  CHECK(worst < 1e-10);
  // near resonance and near mu = 0 the cancellation-free branches take over
  for (double d : {1e-3, 1e-6, 1e-9, 1e-12}) {
    CHECK(std::abs(W_coeff(9.0, 0.8, std::pow(0.8 + d, 2)) - W_quadrature(9.0, 0.8, std::pow(0.8 + d, 2))) < 1e-10);
    CHECK(std::abs(W_coeff(9.0, 0.8, d * d) - W_quadrature(9.0, 0.8, d * d)) < 1e-10);
  }
  CHECK_THROWS_AS(W_coeff(-1.0, 0.8, 0.5), std::invalid_argument);
}

TEST_CASE("Re(exp(i lambda t) W) is the Duhamel integral") {
  // (cos(lambda t) - cos(s t)) / (s^2 - lambda^2)
  for (double mu : {0.1, 0.5, 0.9}) {
    const double t = 11.0, lam = 0.8, s = std::sqrt(mu);
    const double expected = (std::cos(lam * t) - std::cos(s * t)) / (mu - lam * lam);
    CHECK(std::abs((std::exp(kI * lam * t) * W_coeff(t, lam, mu)).real() - expected) < 1e-12);
  }
}

TEST_CASE("modal evolution of single eigen-loads") {
  const Setup s = trapezoid(0.08);
  const ModeSet all = dense_modes(s.forms);
  const double lam = 0.8;
  std::vector<double> times;
  for (int k = 0; k <= 400; ++k) times.push_back(0.25 * k);

  SUBCASE("off resonance stays bounded") {
    for (Eigen::Index j : {Eigen::Index(3), all.count() / 2, all.count() - 2}) {
      const ModeSet one = single_mode(all, j);
      const Eigen::VectorXd F = s.forms.K * one.phis.col(0);
      const double c = one.phis.col(0).dot(F);
      const EvolutionTrace tr = evolve_modal(s.forms, one, F, lam, times);
      CHECK(tr.warnings.empty());
      double sup = 0.0;
      for (const Eigen::VectorXd& u : tr.fields) {
        const Eigen::VectorXd x = s.forms.from_nodal(u.cast<cplx>()).real();
        sup = std::max(sup, std::abs(one.phis.col(0).dot(s.forms.K * x)));
      }
      CHECK(sup <= 2.0 / std::abs(one.mus[0] - lam * lam) * std::abs(c) * (1 + 1e-10));
    }
  }
  SUBCASE("resonance grows linearly") {
    const ModeSet one = single_mode(all, all.count() / 2);
    const double lr = std::sqrt(one.mus[0]);
    const Eigen::VectorXd F = s.forms.K * one.phis.col(0);
    const double c = one.phis.col(0).dot(F);
    // envelope peaks where sin(lr t) = +-1
    std::vector<double> peaks;
    for (int k = 20; k < 40; ++k) peaks.push_back((kPi / 2 + k * kPi) / lr);
    const EvolutionTrace tr = evolve_modal(s.forms, one, F, lr, peaks);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < peaks.size(); ++k) {
      const Eigen::VectorXd x = s.forms.from_nodal(tr.fields[k].cast<cplx>()).real();
      const double a = std::abs(one.phis.col(0).dot(s.forms.K * x));
      sx += peaks[k], sy += a, sxx += peaks[k] * peaks[k], sxy += peaks[k] * a;
    }
    const double n = double(peaks.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(std::abs(slope - std::abs(c) / (2 * lr)) < 0.01 * std::abs(c) / (2 * lr));
  }
  SUBCASE("t = 0 gives zero") {
    const EvolutionTrace tr = evolve_modal(s.forms, all, s.F, lam, {0.0});
    CHECK(tr.fields[0].norm() == 0.0);
  }
  SUBCASE("too few modes warns") {
    const EvolutionTrace tr = evolve_modal(s.forms, single_mode(all, 0), s.F, lam, {1.0});
    REQUIRE(tr.warnings.size() == 1);
    CHECK(tr.warnings[0].find("InsufficientModes") == 0);
  }
}

TEST_CASE("leapfrog against the modal solution") {
  const Setup s = trapezoid(0.08);
  const ModeSet all = dense_modes(s.forms);
  const double lam = 0.8, T = 30.0;
  const EvolutionTrace modal = evolve_modal(s.forms, all, s.F, lam, {T});
  CHECK(modal.warnings.empty());
  std::vector<double> dev;
  for (double dt : {0.1, 0.05, 0.025}) {
    LeapfrogOptions o;
    o.dt = dt;
    o.T = T;
    o.record_times = {T};
    const EvolutionTrace lf = evolve_leapfrog(s.forms, s.F, lam, o);
    REQUIRE(lf.fields.size() == 1);
    dev.push_back(rel_diff(lf.fields[0], modal.fields[0]));
  }
  CHECK(dev[2] < 0.01);
  // second order
  CHECK(dev[0] / dev[1] > 3.5);
  CHECK(dev[0] / dev[1] < 4.5);
  CHECK(dev[1] / dev[2] > 3.5);
  CHECK(dev[1] / dev[2] < 4.5);
}

TEST_CASE("leapfrog against a windowed modal run with a projected load") {
  const Setup s = trapezoid(0.04);
  const double lam = 0.8, T = 50.0;
  const ModeSet win = eigenmodes(s.forms, 0, std::make_pair(0.35, 0.95));
  REQUIRE(win.count() >= 400);
  const Eigen::VectorXd P = project_load(s.forms, win, s.F);
  const EvolutionTrace modal = evolve_modal(s.forms, win, P, lam, {T});
  LeapfrogOptions o;
  o.dt = 0.01;
  o.T = T;
  o.record_times = {T};
  const EvolutionTrace lf = evolve_leapfrog(s.forms, P, lam, o);
  CHECK(rel_diff(lf.fields[0], modal.fields[0]) < 0.02);
}

TEST_CASE("leapfrog conserves the discrete energy without forcing") {
  const Setup s = trapezoid(0.06);
  std::mt19937 rng(7);
  std::normal_distribution<double> g;
  LeapfrogOptions o;
  o.dt = 0.05;
  o.T = 100.0;
  o.track_energy = true;
  o.u0.resize(s.forms.size());
  for (auto& v : o.u0) v = g(rng);
  o.v0 = Eigen::VectorXd::Zero(s.forms.size());
  const EvolutionTrace tr = evolve_leapfrog(s.forms, Eigen::VectorXd::Zero(s.forms.size()), 0.8, o);
  const double e0 = tr.energy.front();
  const double periods = o.T / (2 * kPi / 0.8);
  double drift = 0.0;
  for (double e : tr.energy) drift = std::max(drift, std::abs(e - e0) / e0);
  CHECK(drift / periods < 1e-6);
}

TEST_CASE("zero forcing gives zero fields and diagnostics") {
  const PlanarDomain d = make_trapezoid(1, 1);
  const Setup s = trapezoid(0.06);
  LeapfrogOptions o;
  o.dt = 0.1;
  o.T = 20.0;
  o.record_times = {0.0, 10.0, 20.0};
  const EvolutionTrace tr = evolve_leapfrog(s.forms, Eigen::VectorXd::Zero(s.forms.size()), 0.8, o);
  REQUIRE(tr.fields.size() == 3);
  for (const auto& u : tr.fields) CHECK(u.norm() == 0.0);
  const ConcentrationSeries cs = concentration_diagnostics(s.mesh, tr, tube_mask(s.mesh, attractor_chords(d, 0.8), 0.18));
  for (std::size_t k = 0; k < cs.times.size(); ++k) {
    CHECK(cs.tube_ratio[k] == 0.0);
    CHECK(cs.total_h1[k] == 0.0);
  }
  CHECK_THROWS_AS(evolve_leapfrog(s.forms, s.F, 0.8, LeapfrogOptions{0.6, 1.0, {}, {}, {}, false}), std::invalid_argument);
}

TEST_CASE("tube diagnostics stay in range") {
  const PlanarDomain d = make_trapezoid(1, 1);
  const Setup s = trapezoid(0.04);
  const std::vector<char> tube = tube_mask(s.mesh, attractor_chords(d, 0.8), 0.12);
  const double frac = double(std::count(tube.begin(), tube.end(), 1)) / double(tube.size());
  CHECK(frac > 0.05);
  CHECK(frac < 0.6);
  LeapfrogOptions o;
  o.dt = 0.1;
  o.T = 60.0;
  for (int k = 1; k <= 6; ++k) o.record_times.push_back(10.0 * k);
  const EvolutionTrace tr = evolve_leapfrog(s.forms, s.F, 0.8, o);
  const ConcentrationSeries cs = concentration_diagnostics(s.mesh, tr, tube);
  for (std::size_t k = 0; k < cs.times.size(); ++k) {
    CHECK(cs.tube_ratio[k] >= 0.0);
    CHECK(cs.tube_ratio[k] <= 1.0);
    CHECK(std::abs(cs.in_tube_h1[k] * cs.in_tube_h1[k] + cs.off_tube_h1[k] * cs.off_tube_h1[k] -
                   cs.total_h1[k] * cs.total_h1[k]) < 1e-12 * cs.total_h1[k] * cs.total_h1[k]);
  }
}

TEST_CASE("fractional norm on Laplacian modes") {
  const Setup s = trapezoid(0.06);
  const ModeSet L = laplacian_modes(s.forms, 10);
  const Eigen::VectorXd u = L.phis.col(2) + 0.5 * L.phis.col(7);
  CHECK(std::abs(fractional_norm(s.forms, L, u, 0.0) - std::sqrt(1.25)) < 1e-10);
  CHECK(std::abs(fractional_norm(s.forms, L, u, 1.0) - std::sqrt(u.dot(s.forms.K * u))) < 1e-9);
  CHECK(std::abs(fractional_norm(s.forms, L, L.phis.col(4), 0.5) - std::pow(L.mus[4], 0.25)) < 1e-10);
}
