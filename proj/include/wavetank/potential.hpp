#pragma once

#include <array>
#include <string>
#include <vector>

#include "wavetank/corner_analysis.hpp"
#include "wavetank/geometry.hpp"

namespace wavetank {

enum class Side { plus_i0, minus_i0, off_axis };

struct ComplexFrequency {
  cplx omega;
  Side side = Side::off_axis;

  static ComplexFrequency off_axis(cplx w);
  static ComplexFrequency upper(double lambda) { return {cplx(lambda, 0.0), Side::plus_i0}; }
  static ComplexFrequency lower(double lambda) { return {cplx(lambda, 0.0), Side::minus_i0}; }
  double lambda() const { return omega.real(); }
  double epsilon() const { return omega.imag(); }
};

using Vec2c = Eigen::Vector2cd;

cplx c_omega(const ComplexFrequency& f);
// A(x, omega) = l+ l-.
cplx char_quadratic(const Vec2& x, cplx omega);
cplx fundamental_solution(const Vec2& x, const ComplexFrequency& f);
Vec2c fundamental_gradient(const Vec2& x, const ComplexFrequency& f);

// a * exp(1 - 1/(1 - |y-c|^2/R^2)) inside the disk of radius R.
struct Bump {
  Vec2 center = Vec2::Zero();
  double radius = 0.1;
  double amplitude = 1.0;

  double operator()(const Vec2& y) const;
  Vec2 gradient(const Vec2& y) const;
  double integral() const;
};

struct VolumeOptions {
  double tol = 1e-8;
  int min_order = 16;
  int max_order = 256;
};

cplx volume_potential(const Bump& f, const ComplexFrequency& freq, const Vec2& x, const VolumeOptions& opt = {});
Vec2c volume_potential_gradient(const Bump& f, const ComplexFrequency& freq, const Vec2& x,
                                const VolumeOptions& opt = {});

struct Panel {
  std::size_t edge = 0;
  double t_start = 0.0;  // local edge parameters
  double t_end = 1.0;
  double length = 0.0;
};

// v(theta) d theta sampled per unit arclength; weights sum to the boundary length.
struct BoundaryDensity {
  std::vector<BoundaryPoint> nodes;
  std::vector<double> weights;
  Eigen::VectorXcd values;
  // Panel layout (order nodes per panel) or empty for a plain weighted sum.
  std::vector<Panel> panels;
  int order = 0;
  double grading_exponent = 0.0;

  Eigen::Index size() const { return Eigen::Index(nodes.size()); }
  cplx mass() const;
};

struct PanelOptions {
  int order = 8;
  int panels_per_half_edge = 8;
  double grading_exponent = 3.0;
};

// Gauss nodes on panels graded algebraically toward the corners; values zero.
BoundaryDensity make_panel_density(const PlanarDomain& domain, const PanelOptions& opt = {});

cplx single_layer(const PlanarDomain& domain, const BoundaryDensity& v, const ComplexFrequency& f, const Vec2& x);
Vec2c single_layer_gradient(const PlanarDomain& domain, const BoundaryDensity& v, const ComplexFrequency& f,
                            const Vec2& x);
// C v at a boundary point; throws NearDiagonalBreakdown when subtraction is off and p is near a node.
cplx restricted_single_layer(const PlanarDomain& domain, const BoundaryDensity& v, const ComplexFrequency& f,
                             const BoundaryPoint& p, bool subtract = true);

// Dense matrix of dC at the density nodes (arclength derivative).
Eigen::MatrixXcd differentiated_single_layer_matrix(const PlanarDomain& domain, const BoundaryDensity& v,
                                                    const ComplexFrequency& f);

struct TriMesh;
// N u = -2 w sqrt(1-w^2) j*(L+ u dl+), sampled at boundary edge midpoints.
BoundaryDensity neumann_data(const PlanarDomain& domain, const TriMesh& mesh, const Eigen::VectorXcd& u,
                             const ComplexFrequency& f);

enum class KernelRegime { diagonal, off_diagonal };

struct KernelEval {
  cplx K_plus;
  cplx K_minus;
  KernelRegime regime = KernelRegime::off_diagonal;
  int quadrant = 0;  // 1: theta<0<theta', 2: theta'<0<theta, 3: both >0, 4: both <0
  std::string descriptor;

  cplx total() const { return K_plus + K_minus; }
};

// Point x(theta) of the chart boundary parameterization of a (+,+) corner.
Vec2 corner_param_point(const CornerClass& corner, double theta);

enum class ZChoice { leading_order, exact };

KernelEval corner_kernel_closed_form(double theta, double theta_prime, const CornerClass& corner,
                                     const ComplexFrequency& f, ZChoice z = ZChoice::leading_order,
                                     double regularization = 0.0);
// Differentiated kernel of point sources by central differences in theta.
KernelEval corner_kernel_numeric(double theta, double theta_prime, const CornerClass& corner,
                                 const ComplexFrequency& f);

struct KernelCheckReport {
  std::array<double, 4> max_rel_error_exact{};    // by quadrant, against the exact z
  std::array<double, 4> max_rel_error_leading{};  // informational
  int samples_per_quadrant = 0;
};

KernelCheckReport kernel_check(const CornerClass& corner, const ComplexFrequency& f, int samples = 20,
                               double chart_size = 0.05);

struct BoundarySolveResult {
  BoundaryDensity v;
  double residual = 0.0;
  double condition_estimate = 0.0;
  cplx multiplier;
};

// Solves dC v = g at the nodes of g with the mass constraint int v = mass.
BoundarySolveResult boundary_solve(const PlanarDomain& domain, const ComplexFrequency& f, const BoundaryDensity& g,
                                   cplx mass);

}  // namespace wavetank
