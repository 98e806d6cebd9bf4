#pragma once

#include <optional>
#include <utility>

#include "wavetank/fem.hpp"

namespace wavetank {

// Generalized eigenpairs A phi = mu B phi, B-orthonormal columns.
struct ModeSet {
  Eigen::VectorXd mus;
  Eigen::MatrixXd phis;
  Eigen::VectorXd residuals;  // ||A phi - mu B phi|| / ||B phi||

  Eigen::Index count() const { return mus.size(); }
};

struct LanczosOptions {
  int block = 4;
  double tol = 1e-10;
  int max_dim = 6000;
  unsigned seed = 12345;
};

// Number of eigenvalues of A phi = mu B phi below sigma (Sylvester inertia of A - sigma B).
Eigen::Index count_below(const SpMat& A, const SpMat& B, double sigma);

// The m eigenvalues closest to sigma from above when window is empty, else all in [a, b].
ModeSet pencil_modes(const SpMat& A, const SpMat& B, double sigma, int m,
                     std::optional<std::pair<double, double>> window, const LanczosOptions& opt = {});

// K2 phi = mu K phi: lowest m modes, or every mode in the window.
ModeSet eigenmodes(const StiffnessForms& forms, int m, std::optional<std::pair<double, double>> window = {},
                   const LanczosOptions& opt = {});

// The m lowest Dirichlet modes K phi = kappa M phi (row-sum lumped M if requested).
ModeSet laplacian_modes(const StiffnessForms& forms, int m, bool lumped = false, const LanczosOptions& opt = {});

// Rayleigh-Ritz of (K2, K) on span(basis).
ModeSet ritz_restrict(const StiffnessForms& forms, const Eigen::MatrixXd& basis);

// sum_k (phi_k^T F) K phi_k and the relative size of what is left out.
Eigen::VectorXd project_load(const StiffnessForms& forms, const ModeSet& modes, const Eigen::VectorXd& F,
                             double* relative_remainder = nullptr);

}  // namespace wavetank
