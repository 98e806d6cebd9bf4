#pragma once

#include <Eigen/Dense>

#include <complex>

namespace wavetank {

struct GaussRule {
  Eigen::VectorXd nodes;    // on [-1, 1]
  Eigen::VectorXd weights;
  Eigen::VectorXd bary;     // barycentric interpolation weights for the nodes
};

// Cached n-point Gauss-Legendre rule.
const GaussRule& gauss_legendre(int n);

// Lagrange basis of the rule's nodes evaluated at complex t.
Eigen::VectorXcd lagrange_basis(const GaussRule& rule, std::complex<double> t);

// Row r with r.dot(values) = int_{-1}^{1} p(t) / (t - t0) dt, p the interpolant
// of the nodal values; principal value when t0 lies on the segment.
Eigen::VectorXcd cauchy_row(const GaussRule& rule, std::complex<double> t0);

// Row for int_{-1}^{1} p(t) log(t - t0) dt with log continuous along the
// segment (t0 off the segment), or log|t - t0| when real_log is set.
Eigen::VectorXcd log_row(const GaussRule& rule, std::complex<double> t0, bool real_log);

// Bernstein ellipse parameter of t relative to [-1, 1].
double bernstein_rho(std::complex<double> t);

}  // namespace wavetank
