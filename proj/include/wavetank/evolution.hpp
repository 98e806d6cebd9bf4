#pragma once

#include <string>
#include <vector>

#include "wavetank/billiard.hpp"
#include "wavetank/fem.hpp"
#include "wavetank/lanczos.hpp"

namespace wavetank {

// sum over +- of (1 - exp(-i t (lambda +- sqrt(mu)))) / (2 sqrt(mu) (sqrt(mu) +- lambda)).
cplx W_coeff(double t, double lambda, double mu);

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> fields;  // nodal
  std::vector<double> sup_norm;
  std::vector<double> energy;           // discrete energy (leapfrog, f = 0 mode)
  std::vector<std::string> warnings;
};

// u(t) = sum_k a_k(t) phi_k, a_k = -(phi_k^T F) Re(exp(i lambda t) W(t, lambda, mu_k)).
EvolutionTrace evolve_modal(const StiffnessForms& forms, const ModeSet& modes, const Eigen::VectorXd& F,
                            double lambda, const std::vector<double>& times);

struct LeapfrogOptions {
  double dt = 0.05;
  double T = 10.0;
  std::vector<double> record_times;  // snapped to the step grid
  // Initial data (dof vectors); empty means zero.
  Eigen::VectorXd u0;
  Eigen::VectorXd v0;
  bool track_energy = false;
};

// K u'' = -K2 u - F cos(lambda t) by central differences.
EvolutionTrace evolve_leapfrog(const StiffnessForms& forms, const Eigen::VectorXd& F, double lambda,
                               const LeapfrogOptions& opt);

// Triangles whose centroid lies within width of an attractor chord or special ray.
std::vector<char> tube_mask(const TriMesh& mesh, const RaySet& rays, double width);

struct ConcentrationSeries {
  std::vector<double> times;
  std::vector<double> tube_ratio;
  std::vector<double> in_tube_h1;
  std::vector<double> off_tube_h1;
  std::vector<double> total_h1;
};

ConcentrationSeries concentration_diagnostics(const TriMesh& mesh, const EvolutionTrace& trace,
                                              const std::vector<char>& tube);

// sum_k kappa_k^s |phi_k^T M u|^2 over M-orthonormal Laplacian modes, square-rooted.
double fractional_norm(const StiffnessForms& forms, const ModeSet& laplace, const Eigen::VectorXd& u_dofs, double s);

}  // namespace wavetank
