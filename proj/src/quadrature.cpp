#include "wavetank/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace wavetank {

namespace {

using cplx = std::complex<double>;

GaussRule build_rule(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.nodes[n - 1 - i] = x;
    r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  r.bary.resize(n);
  for (int j = 0; j < n; ++j) {
    double prod = 1.0;
    for (int k = 0; k < n; ++k)
      if (k != j) prod *= r.nodes[j] - r.nodes[k];
    r.bary[j] = 1.0 / prod;
  }
  return r;
}

cplx q0(cplx t0) {
  const cplx v = std::log((1.0 - t0) / (-1.0 - t0));
  if (t0.imag() == 0.0 && std::abs(t0.real()) < 1.0) return v.real();
  return v;
}

// Row giving P(t) = int_{-1}^t p for complex t.
Eigen::VectorXcd antiderivative_row(const GaussRule& rule, cplx t) {
  const Eigen::Index n = rule.nodes.size();
  Eigen::VectorXcd row = Eigen::VectorXcd::Zero(n);
  const cplx half = 0.5 * (t + 1.0);
  for (Eigen::Index m = 0; m < n; ++m) row += rule.weights[m] * half * lagrange_basis(rule, -1.0 + half * (rule.nodes[m] + 1.0));
  return row;
}

// Index of the node equal to t0, or -1.
Eigen::Index node_index(const GaussRule& rule, cplx t0) {
  if (t0.imag() != 0.0) return -1;
  for (Eigen::Index j = 0; j < rule.nodes.size(); ++j)
    if (rule.nodes[j] == t0.real()) return j;
  return -1;
}

// Row for int P(t)/(t - t0) where P is given by rows at nodes and at t0.
Eigen::VectorXcd cauchy_of(const GaussRule& rule, const Eigen::MatrixXcd& at_nodes, const Eigen::VectorXcd& at_t0,
                           const Eigen::VectorXcd& deriv_at_node, cplx t0) {
  const Eigen::Index n = rule.nodes.size();
  const Eigen::Index hit = node_index(rule, t0);
  Eigen::VectorXcd row = at_t0 * q0(t0);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == hit) row += rule.weights[j] * deriv_at_node;
    else row += rule.weights[j] * (at_nodes.row(j).transpose() - at_t0) / (rule.nodes[j] - t0);
  }
  return row;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1 || n > 512) throw std::invalid_argument("gauss_legendre: order out of range");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(n));
  return *slot;
}

Eigen::VectorXcd lagrange_basis(const GaussRule& rule, cplx t) {
  const Eigen::Index n = rule.nodes.size();
  Eigen::VectorXcd out(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (t == cplx(rule.nodes[j])) {
      out.setZero();
      out[j] = 1.0;
      return out;
    }
  }
  cplx den = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    out[j] = rule.bary[j] / (t - rule.nodes[j]);
    den += out[j];
  }
  return out / den;
}

Eigen::VectorXcd cauchy_row(const GaussRule& rule, cplx t0) {
  const Eigen::Index n = rule.nodes.size();
  const Eigen::MatrixXcd at_nodes = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::VectorXcd at_t0 = lagrange_basis(rule, t0);
  Eigen::VectorXcd deriv = Eigen::VectorXcd::Zero(n);
  const Eigen::Index hit = node_index(rule, t0);
  if (hit >= 0) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == hit) continue;
      const double d = rule.bary[j] / rule.bary[hit] / (rule.nodes[hit] - rule.nodes[j]);
      deriv[j] = d;
      deriv[hit] -= d;
    }
  }
  return cauchy_of(rule, at_nodes, at_t0, deriv, t0);
}

Eigen::VectorXcd log_row(const GaussRule& rule, cplx t0, bool real_log) {
  const Eigen::Index n = rule.nodes.size();
  Eigen::MatrixXcd at_nodes(n, n);
  for (Eigen::Index j = 0; j < n; ++j) at_nodes.row(j) = antiderivative_row(rule, rule.nodes[j]).transpose();
  const Eigen::VectorXcd at_t0 = antiderivative_row(rule, t0);
  const Eigen::VectorXcd at_one = antiderivative_row(rule, 1.0);
  Eigen::VectorXcd deriv = Eigen::VectorXcd::Zero(n);
  const Eigen::Index hit = node_index(rule, t0);
  if (hit >= 0) deriv[hit] = 1.0;
  const Eigen::VectorXcd c = cauchy_of(rule, at_nodes, at_t0, deriv, t0);
  cplx log_end;
  if (real_log) log_end = std::log(std::abs(1.0 - t0));
  else log_end = std::log(-1.0 - t0) + q0(t0);
  return at_one * log_end - c;
}

double bernstein_rho(cplx t) {
  const cplx r = std::sqrt(t - 1.0) * std::sqrt(t + 1.0);
  return std::max(std::abs(t + r), std::abs(t - r));
}

}  // namespace wavetank
