#include "wavetank/corner_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wavetank {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

}  // namespace

cplx branch_log(cplx z) {
  if (z == cplx(0.0) || (std::abs(z.real()) <= 1e-15 * std::abs(z) && z.imag() > 0))
    throw BranchViolation("base lies on the cut i[0, inf)");
  double arg = std::arg(z);
  if (arg > kPi / 2) arg -= 2.0 * kPi;
  return {std::log(std::abs(z)), arg};
}

cplx branch_pow(cplx z, cplx s) { return std::exp(s * branch_log(z)); }

LFactorTable l_factors(cplx omega) {
  const double lambda = omega.real();
  check_frequency(lambda);
  LFactorTable t;
  t.omega = omega;
  const cplx root = std::sqrt(cplx(1.0) - omega * omega) / std::sqrt(1.0 - lambda * lambda);
  for (Sign mu : {Sign::plus, Sign::minus})
    for (Sign nu : {Sign::plus, Sign::minus}) {
      const double mn = to_int(mu) * to_int(nu);
      t.values[2 * (mu == Sign::minus) + (nu == Sign::minus)] = 0.5 * (mn * omega / lambda + root);
    }
  return t;
}

cplx indicial_exponent(double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
  return 2.0 * kPi * kI / (kI * kPi - std::log(alpha));
}

namespace {

struct RootBases {
  cplx a, b, c, d;  // rows (a b; c d) before exponentiation
};

RootBases root_bases(double ap, double am, cplx omega) {
  const LFactorTable L = l_factors(omega);
  const cplx mp = L(Sign::minus, Sign::plus), mm = L(Sign::minus, Sign::minus);
  const cplx pp = L(Sign::plus, Sign::plus), pm = L(Sign::plus, Sign::minus);
  return {mp - mm * ap, pp - pm * ap, mp + mm * am, pp + pm * am};
}

}  // namespace

cplx indicial_exponent(const CornerClass& corner, cplx omega) {
  const RootBases r = root_bases(corner.alpha_plus, corner.alpha_minus, omega);
  const cplx big_lambda = branch_log(r.a) + branch_log(r.d) - branch_log(r.b) - branch_log(r.c);
  return -2.0 * kPi * kI / big_lambda;
}

bool energy_space_flag(double alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
  const double l = std::log(alpha);
  return l * l < 3.0 * kPi * kPi;
}

cplx corner_root_det(cplx s, double alpha_plus, double alpha_minus, cplx omega) {
  const RootBases r = root_bases(alpha_plus, alpha_minus, omega);
  return branch_pow(r.a, s) * branch_pow(r.d, s) - branch_pow(r.b, s) * branch_pow(r.c, s);
}

cplx corner_root_det(cplx s, const CornerClass& corner, cplx omega) {
  return corner_root_det(s, corner.alpha_plus, corner.alpha_minus, omega);
}

std::vector<cplx> limiting_roots(double alpha, double s_max) {
  const cplx l1 = indicial_exponent(alpha);
  const cplx l2 = 2.0 * kPi * kI / (3.0 * kI * kPi + std::log(alpha));
  std::vector<cplx> out;
  for (cplx base : {l1, l2}) {
    for (int k = 1; double(k) * base.real() < s_max; ++k) {
      const cplx s = double(k) * base;
      bool dup = false;
      for (const cplx& o : out)
        if (std::abs(o - s) < 1e-8) dup = true;
      if (!dup) out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  return out;
}

std::array<cplx, 4> leading_order_z(double alpha_plus, double alpha_minus, double lambda) {
  const double d = 2.0 * lambda * (1.0 - lambda * lambda);
  const cplx zp = (1.0 / alpha_plus + 1.0 / alpha_minus) / d;
  const cplx zm = (alpha_plus + alpha_minus) / d;
  return {zp, zp, zm, zm};
}

std::array<cplx, 4> exact_z(double alpha_plus, double alpha_minus, cplx omega) {
  const double lambda = omega.real();
  const double eps = omega.imag();
  if (eps == 0.0) return leading_order_z(alpha_plus, alpha_minus, lambda);
  const cplx S = std::sqrt(1.0 - lambda * lambda) / std::sqrt(cplx(1.0) - omega * omega);
  const cplx r = lambda / omega;
  auto lw = [&](Sign s, double dp, double dm) {
    const double k = to_int(s);
    return 0.5 * ((S + k * r) * dp + (S - k * r) * dm);
  };
  const double alpha = alpha_plus / alpha_minus;
  const cplx ie = kI * eps;
  const cplx rho_p1 = lw(Sign::plus, alpha_plus, 1.0) / lw(Sign::plus, alpha_minus, -1.0);
  const cplx rho_m1 = lw(Sign::minus, alpha_plus, 1.0) / lw(Sign::minus, alpha_minus, -1.0);
  const cplx rho_p2 = lw(Sign::plus, alpha_minus, -1.0) / lw(Sign::plus, alpha_plus, 1.0);
  const cplx rho_m2 = lw(Sign::minus, alpha_minus, -1.0) / lw(Sign::minus, alpha_plus, 1.0);
  return {(rho_p1 / alpha - 1.0) / ie, (1.0 - alpha * rho_p2) / ie, (-rho_m1 - 1.0) / ie, (1.0 + rho_m2) / ie};
}

namespace {

struct NormalTerms {
  cplx m11, m12, m21, d11, d12, d21;
};

NormalTerms normal_terms(cplx s, const NormalFamilyParams& p) {
  const cplx ie = kI * p.epsilon;
  const cplx e1 = std::exp(kI * kPi * s), e2 = std::exp(-kI * kPi * s);
  const cplx l1 = std::log(1.0 - ie * p.z[3]);
  const cplx l2 = std::log((1.0 - ie * p.z[1]) / p.alpha);
  const cplx l3 = std::log(1.0 + ie * p.z[2]);
  const cplx l4 = std::log(p.alpha * (1.0 + ie * p.z[0]));
  const cplx P1 = std::exp(-s * l1), P2 = std::exp(-s * l2), P3 = std::exp(-s * l3), P4 = std::exp(-s * l4);
  NormalTerms t;
  t.m11 = e1 + e2;
  t.d11 = kI * kPi * (e1 - e2);
  t.m12 = e2 * P1 + P2;
  t.d12 = (-kI * kPi - l1) * e2 * P1 - l2 * P2;
  t.m21 = -e1 * P3 - P4;
  t.d21 = -(kI * kPi - l3) * e1 * P3 + l4 * P4;
  return t;
}

}  // namespace

cplx normal_family_det(cplx s, const NormalFamilyParams& p, bool unreduced) {
  if (!(p.alpha > 0)) throw std::invalid_argument("alpha must be positive");
  const NormalTerms t = normal_terms(s, p);
  const cplx det = -t.m11 * t.m11 - t.m12 * t.m21;
  if (!unreduced) return det;
  if (std::abs(s - std::round(s.real())) < 1e-12) throw PoleAtIntegerS("pi/sin(pi s) has a pole at integer s");
  const cplx f = kPi / std::sin(kPi * s);
  return f * f * det;
}

cplx normal_family_det_derivative(cplx s, const NormalFamilyParams& p) {
  const NormalTerms t = normal_terms(s, p);
  return -2.0 * t.m11 * t.d11 - t.d12 * t.m21 - t.m12 * t.d21;
}

std::vector<cplx> normal_family_roots(const NormalFamilyParams& p, double s_max, int grid) {
  std::vector<cplx> out;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      cplx s(s_max * (i + 0.5) / grid, -10.0 + 20.0 * (j + 0.5) / grid);
      bool ok = false;
      double last = 1.0;
      for (int it = 0; it < 80; ++it) {
        const cplx f = normal_family_det(s, p);
        const cplx df = normal_family_det_derivative(s, p);
        if (df == cplx(0.0)) break;
        const cplx step = f / df;
        s -= step;
        last = std::abs(step);
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag()) || std::abs(s.imag()) > 20.0) break;
        if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(s))) {
          ok = true;
          break;
        }
      }
      if (!ok && last < 1e-9) ok = true;
      if (!ok || !(s.real() > 0 && s.real() < s_max) || std::abs(s.imag()) > 10.0) continue;
      if (std::abs(s) < 1e-6) continue;  // s = 0 is a trivial double root
      bool dup = false;
      for (const cplx& o : out)
        if (std::abs(o - s) < 1e-8) dup = true;
      if (!dup) out.push_back(s);
    }
  }
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  return out;
}

Eigen::VectorXcd indicial_apply(cplx sigma, double alpha_plus, double alpha_minus, cplx omega,
                                const Eigen::VectorXcd& w) {
  const Eigen::Index n = w.size();
  if (n < 8) throw std::invalid_argument("indicial_apply needs at least 8 samples");
  const cplx s = kI * sigma;
  const LFactorTable L = l_factors(omega);
  const cplx A1 = L(Sign::plus, Sign::minus), A2 = L(Sign::minus, Sign::minus);
  const double h = (alpha_plus + alpha_minus) / double(n - 1);
  // Fourth-order stencils, one-sided near the ends.
  Eigen::VectorXcd d1(n), d2(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      d1[i] = (w[i - 2] - 8.0 * w[i - 1] + 8.0 * w[i + 1] - w[i + 2]) / (12.0 * h);
      d2[i] = (-w[i - 2] + 16.0 * w[i - 1] - 30.0 * w[i] + 16.0 * w[i + 1] - w[i + 2]) / (12.0 * h * h);
    } else {
      // Lagrange differentiation on the six nodes nearest the end.
      const Eigen::Index i0 = i < 2 ? 0 : n - 6;
      const double x = double(i - i0);
      cplx a1 = 0.0, a2 = 0.0;
      for (int k = 0; k < 6; ++k) {
        double l1 = 0.0, l2 = 0.0;
        for (int m = 0; m < 6; ++m) {
          if (m == k) continue;
          double prod1 = 1.0 / (k - m);
          for (int q = 0; q < 6; ++q)
            if (q != k && q != m) prod1 *= (x - q) / double(k - q);
          l1 += prod1;
          for (int q = 0; q < 6; ++q) {
            if (q == k || q == m) continue;
            double prod2 = 1.0 / double((k - m) * (k - q));
            for (int r = 0; r < 6; ++r)
              if (r != k && r != m && r != q) prod2 *= (x - r) / double(k - r);
            l2 += prod2;
          }
        }
        a1 += l1 * w[i0 + k];
        a2 += l2 * w[i0 + k];
      }
      d1[i] = a1 / h;
      d2[i] = a2 / (h * h);
    }
  }
  Eigen::VectorXcd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double tau = -alpha_minus + h * double(i);
    const cplx B1 = L(Sign::plus, Sign::plus) - A1 * tau;
    const cplx B2 = L(Sign::minus, Sign::plus) - A2 * tau;
    out[i] = A1 * A2 * s * (s - 1.0) * w[i] + (A1 * (s - 1.0) * B2 + B1 * A2 * (s - 1.0)) * d1[i] + B1 * B2 * d2[i];
  }
  return out;
}

Vec2 CornerFrame::to_chart(const Vec2& x) const {
  const Vec2 y = x - corner.corner.xy;
  const double lnu = ell(y, corner.lambda, corner.nu);
  const double lother = ell(y, corner.lambda, opposite(corner.nu));
  return Vec2(to_int(corner.mu) * lother, lnu / lother);
}

Vec2 CornerFrame::from_chart(double r, double tau) const {
  const double lother = to_int(corner.mu) * r;
  const double lnu = tau * lother;
  const double lp = corner.nu == Sign::plus ? lnu : lother;
  const double lm = corner.nu == Sign::plus ? lother : lnu;
  const double lambda = corner.lambda;
  return corner.corner.xy + Vec2(lambda * (lp - lm) / 2.0, std::sqrt(1.0 - lambda * lambda) * (lp + lm) / 2.0);
}

IndicialData indicial_data(double alpha, double s_max) {
  IndicialData d;
  d.alpha = alpha;
  d.l_exponent = indicial_exponent(alpha);
  d.re_l = d.l_exponent.real();
  d.energy_space = energy_space_flag(alpha);
  d.roots_strip = limiting_roots(alpha, s_max);
  d.sobolev_bound = d.re_l - 1.5;
  return d;
}

}  // namespace wavetank
