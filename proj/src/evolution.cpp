#include "wavetank/evolution.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>

namespace wavetank {

namespace {

const cplx kI(0.0, 1.0);

// (e^z - 1) / z
cplx expm1_over(cplx z) {
  if (std::abs(z) < 1e-4) return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
  return (std::exp(z) - 1.0) / z;
}

double point_segment_distance(const Vec2& x, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + t * ab - x).norm();
}

}  // namespace

cplx W_coeff(double t, double lambda, double mu) {
  if (t < 0.0) throw std::invalid_argument("W_coeff needs t >= 0");
  check_frequency(lambda);
  if (mu < 0.0) throw std::invalid_argument("W_coeff needs mu >= 0");
  if (t == 0.0) return 0.0;
  const double s = std::sqrt(mu);
  if (s < 0.5 * lambda) {
    // [-1 + exp(-i lambda t)(cos st + i lambda sin(st)/s)] / (lambda^2 - mu), no 1/s cancellation
    const double sinc = s * t < 1e-4 ? t * (1.0 - s * s * t * t / 6.0) : std::sin(s * t) / s;
    return (-1.0 + std::exp(-kI * t * lambda) * (std::cos(s * t) + kI * lambda * sinc)) / (lambda * lambda - mu);
  }
  const cplx plus = (1.0 - std::exp(-kI * t * (lambda + s))) / (2.0 * s * (s + lambda));
  // (1 - exp(-i t d)) / (2 s (s - lambda)) with d = lambda - s, stable at d = 0
  const double d = lambda - s;
  const cplx minus = -t * kI * expm1_over(-kI * t * d) / (2.0 * s);
  return plus + minus;
}

EvolutionTrace evolve_modal(const StiffnessForms& forms, const ModeSet& modes, const Eigen::VectorXd& F,
                            double lambda, const std::vector<double>& times) {
  check_frequency(lambda);
  EvolutionTrace tr;
  double remainder = 0.0;
  project_load(forms, modes, F, &remainder);
  if (remainder > 0.01)
    tr.warnings.push_back("InsufficientModes: modes leave " + std::to_string(remainder) + " of the load unresolved");
  const Eigen::VectorXd c = modes.phis.transpose() * F;
  for (double t : times) {
    Eigen::VectorXd a(modes.count());
    for (Eigen::Index k = 0; k < modes.count(); ++k)
      a[k] = t == 0.0 ? 0.0 : -c[k] * (std::exp(kI * lambda * t) * W_coeff(t, lambda, std::max(0.0, modes.mus[k]))).real();
    const Eigen::VectorXd u = forms.to_nodal(Eigen::VectorXd(modes.phis * a));
    tr.times.push_back(t);
    tr.sup_norm.push_back(u.cwiseAbs().maxCoeff());
    tr.fields.push_back(u);
  }
  return tr;
}

EvolutionTrace evolve_leapfrog(const StiffnessForms& forms, const Eigen::VectorXd& F, double lambda,
                               const LeapfrogOptions& opt) {
  check_frequency(lambda);
  if (!(opt.dt > 0.0 && opt.dt <= 0.5)) throw std::invalid_argument("leapfrog needs 0 < dt <= 0.5");
  if (!(opt.T >= 0.0)) throw std::invalid_argument("leapfrog needs T >= 0");
  const Eigen::Index n = forms.size();
  if (F.size() != n) throw std::invalid_argument("load size does not match the forms");
  Eigen::SimplicialLLT<SpMat> llt(forms.K);
  if (llt.info() != Eigen::Success) throw SolverBreakdown("Cholesky of K failed");
  const double dt = opt.dt;
  const long steps = long(std::llround(opt.T / dt));
  std::vector<long> rec;
  for (double t : opt.record_times) rec.push_back(std::clamp(long(std::llround(t / dt)), 0L, steps));
  std::sort(rec.begin(), rec.end());
  rec.erase(std::unique(rec.begin(), rec.end()), rec.end());

  EvolutionTrace tr;
  Eigen::VectorXd u_prev = opt.u0.size() == n ? opt.u0 : Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd v0 = opt.v0.size() == n ? opt.v0 : Eigen::VectorXd::Zero(n);
  const Eigen::VectorXd a0 = llt.solve(Eigen::VectorXd(-(forms.K2 * u_prev) - F));
  Eigen::VectorXd u = u_prev + dt * v0 + 0.5 * dt * dt * a0;
  std::size_t ri = 0;
  auto record = [&](long step, const Eigen::VectorXd& x) {
    while (ri < rec.size() && rec[ri] == step) {
      const Eigen::VectorXd nodal = forms.to_nodal(x);
      tr.times.push_back(double(step) * dt);
      tr.fields.push_back(nodal);
      tr.sup_norm.push_back(nodal.size() ? nodal.cwiseAbs().maxCoeff() : 0.0);
      ++ri;
    }
  };
  auto energy = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd v = (b - a) / dt;
    return 0.5 * v.dot(forms.K * v) + 0.5 * b.dot(forms.K2 * a);
  };
  record(0, u_prev);
  if (steps >= 1) record(1, u);
  if (opt.track_energy) tr.energy.push_back(energy(u_prev, u));
  for (long k = 1; k < steps; ++k) {
    const double t = double(k) * dt;
    const Eigen::VectorXd rhs = -(forms.K2 * u) - F * std::cos(lambda * t);
    Eigen::VectorXd u_next = 2.0 * u - u_prev + dt * dt * llt.solve(rhs);
    u_prev.swap(u);
    u.swap(u_next);
    if (opt.track_energy) tr.energy.push_back(energy(u_prev, u));
    const double nrm = u.norm();
    if (!(nrm < 1e12)) throw BlowupDetected("leapfrog field norm " + std::to_string(nrm) + " at t = " + std::to_string(t + dt));
    record(k + 1, u);
  }
  return tr;
}

std::vector<char> tube_mask(const TriMesh& mesh, const RaySet& rays, double width) {
  std::vector<std::pair<Vec2, Vec2>> segs;
  for (const Chord& c : rays.attractor_chords) segs.push_back({c.a.xy, c.b.xy});
  for (const Chord& c : rays.special_rays) segs.push_back({c.a.xy, c.b.xy});
  std::vector<char> mask(mesh.triangles.size(), 0);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    const Vec2 c = (mesh.vertices[std::size_t(tr[0])] + mesh.vertices[std::size_t(tr[1])] + mesh.vertices[std::size_t(tr[2])]) / 3.0;
    for (const auto& [a, b] : segs)
      if (point_segment_distance(c, a, b) < width) {
        mask[t] = 1;
        break;
      }
  }
  return mask;
}

ConcentrationSeries concentration_diagnostics(const TriMesh& mesh, const EvolutionTrace& trace,
                                              const std::vector<char>& tube) {
  if (tube.size() != mesh.triangles.size()) throw std::invalid_argument("tube mask size");
  ConcentrationSeries out;
  for (std::size_t k = 0; k < trace.fields.size(); ++k) {
    const Eigen::VectorXd e = element_energy(mesh, trace.fields[k].cast<cplx>());
    double in = 0.0, total = 0.0;
    for (Eigen::Index t = 0; t < e.size(); ++t) {
      total += e[t];
      if (tube[std::size_t(t)]) in += e[t];
    }
    out.times.push_back(trace.times[k]);
    out.tube_ratio.push_back(total > 0.0 ? in / total : 0.0);
    out.in_tube_h1.push_back(std::sqrt(in));
    out.off_tube_h1.push_back(std::sqrt(std::max(0.0, total - in)));
    out.total_h1.push_back(std::sqrt(total));
  }
  return out;
}

double fractional_norm(const StiffnessForms& forms, const ModeSet& laplace, const Eigen::VectorXd& u_dofs, double s) {
  const Eigen::VectorXd c = laplace.phis.transpose() * (forms.M * u_dofs);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k) acc += std::pow(laplace.mus[k], s) * c[k] * c[k];
  return std::sqrt(acc);
}

}  // namespace wavetank
