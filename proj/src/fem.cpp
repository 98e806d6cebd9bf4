#include "wavetank/fem.hpp"

#include <Eigen/SparseLU>

#include <cmath>

namespace wavetank {

namespace {

// Degree-5 seven point rule on the reference triangle (weights sum to 1).
struct TriRule {
  std::array<std::array<double, 3>, 7> bary;
  std::array<double, 7> w;
};

const TriRule& rule7() {
  static const TriRule r = [] {
    TriRule t;
    const double a1 = 0.059715871789770, b1 = 0.470142064105115;
    const double a2 = 0.797426985353087, b2 = 0.101286507323456;
    const double w0 = 0.225, w1 = 0.132394152788506, w2 = 0.125939180544827;
    t.bary = {{{1.0 / 3, 1.0 / 3, 1.0 / 3},
               {a1, b1, b1},
               {b1, a1, b1},
               {b1, b1, a1},
               {a2, b2, b2},
               {b2, a2, b2},
               {b2, b2, a2}}};
    t.w = {w0, w1, w1, w1, w2, w2, w2};
    return t;
  }();
  return r;
}

struct ElementGeom {
  double area;
  Eigen::Matrix<double, 3, 2> grad;  // gradients of the barycentric functions
};

ElementGeom element(const TriMesh& m, std::size_t t) {
  const auto& tr = m.triangles[t];
  const Vec2& p0 = m.vertices[std::size_t(tr[0])];
  const Vec2& p1 = m.vertices[std::size_t(tr[1])];
  const Vec2& p2 = m.vertices[std::size_t(tr[2])];
  const double det = (p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x();
  ElementGeom g;
  g.area = 0.5 * det;
  g.grad.row(0) = Eigen::RowVector2d(p1.y() - p2.y(), p2.x() - p1.x()) / det;
  g.grad.row(1) = Eigen::RowVector2d(p2.y() - p0.y(), p0.x() - p2.x()) / det;
  g.grad.row(2) = Eigen::RowVector2d(p0.y() - p1.y(), p1.x() - p0.x()) / det;
  return g;
}

double masked_sum(const Eigen::VectorXd& per_tri, const std::vector<char>& mask) {
  double s = 0.0;
  for (Eigen::Index t = 0; t < per_tri.size(); ++t)
    if (mask.empty() || mask[std::size_t(t)]) s += per_tri[t];
  return s;
}

}  // namespace

Eigen::VectorXcd StiffnessForms::to_nodal(const Eigen::VectorXcd& x) const {
  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(Eigen::Index(dof.size()));
  for (Eigen::Index i = 0; i < size(); ++i) u[vertex[std::size_t(i)]] = x[i];
  return u;
}

Eigen::VectorXd StiffnessForms::to_nodal(const Eigen::VectorXd& x) const {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(Eigen::Index(dof.size()));
  for (Eigen::Index i = 0; i < size(); ++i) u[vertex[std::size_t(i)]] = x[i];
  return u;
}

Eigen::VectorXcd StiffnessForms::from_nodal(const Eigen::VectorXcd& u) const {
  Eigen::VectorXcd x(size());
  for (Eigen::Index i = 0; i < size(); ++i) x[i] = u[vertex[std::size_t(i)]];
  return x;
}

StiffnessForms assemble_forms(const TriMesh& mesh) {
  StiffnessForms f;
  f.dof.assign(mesh.vertices.size(), -1);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    if (!mesh.boundary[v]) {
      f.dof[v] = int(f.vertex.size());
      f.vertex.push_back(int(v));
    }
  const Eigen::Index n = f.size();
  std::vector<Eigen::Triplet<double>> t1, t2, tm;
  t1.reserve(9 * mesh.triangles.size());
  t2.reserve(9 * mesh.triangles.size());
  tm.reserve(9 * mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const ElementGeom g = element(mesh, t);
    if (!(g.area > 0.0)) throw MeshFailure("degenerate or inverted triangle");
    const auto& tr = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      const int di = f.dof[std::size_t(tr[std::size_t(i)])];
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int dj = f.dof[std::size_t(tr[std::size_t(j)])];
        if (dj < 0) continue;
        t1.emplace_back(di, dj, g.area * g.grad(i, 0) * g.grad(j, 0));
        t2.emplace_back(di, dj, g.area * g.grad(i, 1) * g.grad(j, 1));
        tm.emplace_back(di, dj, g.area * (i == j ? 2.0 : 1.0) / 12.0);
      }
    }
  }
  f.K1.resize(n, n);
  f.K2.resize(n, n);
  f.M.resize(n, n);
  f.K1.setFromTriplets(t1.begin(), t1.end());
  f.K2.setFromTriplets(t2.begin(), t2.end());
  f.M.setFromTriplets(tm.begin(), tm.end());
  f.K = f.K1 + f.K2;
  return f;
}

Eigen::VectorXd load_vector(const TriMesh& mesh, const StiffnessForms& forms,
                            const std::function<double(const Vec2&)>& fn) {
  Eigen::VectorXd F = Eigen::VectorXd::Zero(forms.size());
  const TriRule& r = rule7();
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    const double area = mesh.triangle_area(t);
    for (std::size_t q = 0; q < 7; ++q) {
      Vec2 x = Vec2::Zero();
      for (std::size_t i = 0; i < 3; ++i) x += r.bary[q][i] * mesh.vertices[std::size_t(tr[i])];
      const double fx = fn(x);
      if (fx == 0.0) continue;
      for (std::size_t i = 0; i < 3; ++i) {
        const int d = forms.dof[std::size_t(tr[i])];
        if (d >= 0) F[d] += area * r.w[q] * fx * r.bary[q][i];
      }
    }
  }
  return F;
}

Eigen::VectorXd load_vector(const TriMesh& mesh, const StiffnessForms& forms, const Bump& f) {
  return load_vector(mesh, forms, [&](const Vec2& x) { return f(x); });
}

Eigen::VectorXcd resolvent_solve(const StiffnessForms& forms, const Eigen::VectorXcd& F, cplx omega) {
  if (omega.imag() == 0.0) throw std::invalid_argument("resolvent_solve needs Im omega != 0");
  if (F.size() != forms.size()) throw std::invalid_argument("load size does not match the forms");
  const Eigen::SparseMatrix<cplx> A = (omega * omega) * forms.K.cast<cplx>() - forms.K2.cast<cplx>();
  Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw SolverBreakdown("sparse LU failed: " + lu.lastErrorMessage());
  Eigen::VectorXcd u = lu.solve(F);
  // one step of iterative refinement
  const Eigen::VectorXcd r = F - A * u;
  u += lu.solve(r);
  const double rel = (F - A * u).norm() / std::max(F.norm(), 1e-300);
  if (!(rel < 1e-10)) throw SolverBreakdown("resolvent residual " + std::to_string(rel));
  return u;
}

Eigen::VectorXd element_energy(const TriMesh& mesh, const Eigen::VectorXcd& u) {
  Eigen::VectorXd e(Eigen::Index(mesh.triangles.size()));
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const ElementGeom g = element(mesh, t);
    const auto& tr = mesh.triangles[t];
    const Eigen::Vector3cd ul(u[tr[0]], u[tr[1]], u[tr[2]]);
    const Eigen::Vector2cd grad = g.grad.transpose().cast<cplx>() * ul;
    e[Eigen::Index(t)] = g.area * grad.squaredNorm();
  }
  return e;
}

Eigen::VectorXd element_mass(const TriMesh& mesh, const Eigen::VectorXcd& u) {
  Eigen::VectorXd e(Eigen::Index(mesh.triangles.size()));
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    const cplx a = u[tr[0]], b = u[tr[1]], c = u[tr[2]];
    // exact P1 mass: area/12 * (|a+b+c|^2 + |a|^2 + |b|^2 + |c|^2)
    const double s = std::norm(a + b + c) + std::norm(a) + std::norm(b) + std::norm(c);
    e[Eigen::Index(t)] = mesh.triangle_area(t) / 12.0 * s;
  }
  return e;
}

double l2_norm(const TriMesh& mesh, const Eigen::VectorXcd& u, const std::vector<char>& mask) {
  return std::sqrt(masked_sum(element_mass(mesh, u), mask));
}

double h1_norm(const TriMesh& mesh, const Eigen::VectorXcd& u, const std::vector<char>& mask) {
  return std::sqrt(masked_sum(element_energy(mesh, u), mask));
}

LapReport lap_sweep(const TriMesh& mesh, const StiffnessForms& forms, const Eigen::VectorXd& F, double lambda,
                    const std::vector<double>& eps_list, const std::vector<char>& tube) {
  check_frequency(lambda);
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (!(eps_list[k] > 0.0)) throw std::invalid_argument("lap_sweep needs eps > 0");
    if (k > 0 && !(eps_list[k] < eps_list[k - 1])) throw std::invalid_argument("lap_sweep needs decreasing eps");
  }
  if (!tube.empty() && tube.size() != mesh.triangles.size()) throw std::invalid_argument("tube mask size");
  std::vector<char> off(tube.size());
  for (std::size_t t = 0; t < tube.size(); ++t) off[t] = !tube[t];
  LapReport rep;
  rep.eps = eps_list;
  const Eigen::VectorXcd Fc = F.cast<cplx>();
  for (double eps : eps_list) {
    const Eigen::VectorXcd u = forms.to_nodal(resolvent_solve(forms, Fc, cplx(lambda, eps)));
    const Eigen::VectorXd e = element_energy(mesh, u);
    const double total = e.sum();
    rep.tube_energy_fraction.push_back(tube.empty() || total == 0.0 ? 0.0 : masked_sum(e, tube) / total);
    rep.h1.push_back(std::sqrt(total));
    rep.fields.push_back(u);
  }
  for (std::size_t k = 0; k + 1 < rep.fields.size(); ++k)
    rep.cauchy_off_tube.push_back(l2_norm(mesh, rep.fields[k] - rep.fields[k + 1], off));
  rep.cauchy_decreasing = true;
  for (std::size_t k = 0; k + 1 < rep.cauchy_off_tube.size(); ++k)
    if (!(rep.cauchy_off_tube[k + 1] < rep.cauchy_off_tube[k])) rep.cauchy_decreasing = false;
  rep.localization_increasing = true;
  for (std::size_t k = 0; k + 1 < rep.tube_energy_fraction.size(); ++k)
    if (!(rep.tube_energy_fraction[k + 1] > rep.tube_energy_fraction[k])) rep.localization_increasing = false;
  return rep;
}

}  // namespace wavetank
