#pragma once

#include <array>
#include <optional>
#include <vector>

#include "wavetank/geometry.hpp"

namespace wavetank {

// z^s with log cut along i[0, inf), real on (0, inf).
cplx branch_log(cplx z);
cplx branch_pow(cplx z, cplx s);

// L^mu_omega l^nu with the real level function l^nu(., Re omega).
struct LFactorTable {
  cplx omega;
  std::array<cplx, 4> values{};  // index 2*(mu==minus) + (nu==minus)

  cplx operator()(Sign mu, Sign nu) const { return values[2 * (mu == Sign::minus) + (nu == Sign::minus)]; }
};

LFactorTable l_factors(cplx omega);

cplx indicial_exponent(double alpha);
// Exact root of corner_root_det continuing 2 pi i / (i pi - log alpha).
cplx indicial_exponent(const CornerClass& corner, cplx omega);
bool energy_space_flag(double alpha);

cplx corner_root_det(cplx s, const CornerClass& corner, cplx omega);
cplx corner_root_det(cplx s, double alpha_plus, double alpha_minus, cplx omega);

std::vector<cplx> limiting_roots(double alpha, double s_max);

struct NormalFamilyParams {
  double alpha = 1.0;
  double epsilon = 0.0;
  // z^{++}, z^{+-}, z^{-+}, z^{--}
  std::array<cplx, 4> z{};
};

std::array<cplx, 4> leading_order_z(double alpha_plus, double alpha_minus, double lambda);
// z^{mu nu} from the exact complex level functions along the corner edges.
std::array<cplx, 4> exact_z(double alpha_plus, double alpha_minus, cplx omega);

// Reduced determinant (pi/sin(pi s) factors removed) unless unreduced is set.
cplx normal_family_det(cplx s, const NormalFamilyParams& p, bool unreduced = false);
cplx normal_family_det_derivative(cplx s, const NormalFamilyParams& p);
std::vector<cplx> normal_family_roots(const NormalFamilyParams& p, double s_max, int grid = 40);

// Applies I(sigma), s = i sigma, to samples of w on a uniform tau grid.
Eigen::VectorXcd indicial_apply(cplx sigma, double alpha_plus, double alpha_minus, cplx omega,
                                const Eigen::VectorXcd& w);

struct CornerFrame {
  CornerClass corner;

  // (r, tau) = (mu l^{-nu}(x - kappa), l^nu(x - kappa) / l^{-nu}(x - kappa)).
  Vec2 to_chart(const Vec2& x) const;
  Vec2 from_chart(double r, double tau) const;
  double tau_min() const { return -corner.alpha_minus; }
  double tau_max() const { return corner.alpha_plus; }
};

struct IndicialData {
  double alpha = 1.0;
  cplx l_exponent;
  double re_l = 0.0;
  bool energy_space = false;
  std::vector<cplx> roots_strip;
  double sobolev_bound = 0.0;
};

IndicialData indicial_data(double alpha, double s_max = 1.0);

}  // namespace wavetank
