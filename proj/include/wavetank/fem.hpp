#pragma once

#include <Eigen/Sparse>

#include <functional>
#include <vector>

#include "wavetank/mesh.hpp"
#include "wavetank/potential.hpp"

namespace wavetank {

using SpMat = Eigen::SparseMatrix<double>;

// P1 forms on the interior (Dirichlet) degrees of freedom.
struct StiffnessForms {
  SpMat K1;  // int d1 u d1 v
  SpMat K2;  // int d2 u d2 v
  SpMat K;   // K1 + K2
  SpMat M;   // int u v
  std::vector<int> dof;     // per vertex, -1 on the boundary
  std::vector<int> vertex;  // per dof

  Eigen::Index size() const { return Eigen::Index(vertex.size()); }
  // Nodal field with zeros on the boundary.
  Eigen::VectorXcd to_nodal(const Eigen::VectorXcd& x) const;
  Eigen::VectorXd to_nodal(const Eigen::VectorXd& x) const;
  Eigen::VectorXcd from_nodal(const Eigen::VectorXcd& u) const;
};

StiffnessForms assemble_forms(const TriMesh& mesh);

// F_i = int f phi_i by a degree-5 rule per triangle.
Eigen::VectorXd load_vector(const TriMesh& mesh, const StiffnessForms& forms,
                            const std::function<double(const Vec2&)>& f);
Eigen::VectorXd load_vector(const TriMesh& mesh, const StiffnessForms& forms, const Bump& f);

// Solves (omega^2 K - K2) u = F; discrete P(omega) u = f.
Eigen::VectorXcd resolvent_solve(const StiffnessForms& forms, const Eigen::VectorXcd& F, cplx omega);

// Per-triangle int |grad u|^2 of a nodal field.
Eigen::VectorXd element_energy(const TriMesh& mesh, const Eigen::VectorXcd& u);
// Per-triangle int |u|^2 of a nodal field.
Eigen::VectorXd element_mass(const TriMesh& mesh, const Eigen::VectorXcd& u);

// Masked L2 and energy norms; mask[t] selects triangles (empty mask selects all).
double l2_norm(const TriMesh& mesh, const Eigen::VectorXcd& u, const std::vector<char>& mask = {});
double h1_norm(const TriMesh& mesh, const Eigen::VectorXcd& u, const std::vector<char>& mask = {});

struct LapReport {
  std::vector<double> eps;
  std::vector<Eigen::VectorXcd> fields;  // nodal
  std::vector<double> cauchy_off_tube;   // ||u_k - u_{k+1}|| in L2 off the tube
  std::vector<double> tube_energy_fraction;
  std::vector<double> h1;
  bool cauchy_decreasing = false;
  bool localization_increasing = false;
};

// Resolvent solves at omega = lambda + i eps for decreasing eps.
LapReport lap_sweep(const TriMesh& mesh, const StiffnessForms& forms, const Eigen::VectorXd& F, double lambda,
                    const std::vector<double>& eps_list, const std::vector<char>& tube);

}  // namespace wavetank
