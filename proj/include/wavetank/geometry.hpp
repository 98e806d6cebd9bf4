#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "wavetank/errors.hpp"

namespace wavetank {

using Vec2 = Eigen::Vector2d;
using cplx = std::complex<double>;

enum class Sign : int { plus = 1, minus = -1 };

constexpr int to_int(Sign s) { return static_cast<int>(s); }
constexpr Sign opposite(Sign s) { return s == Sign::plus ? Sign::minus : Sign::plus; }
inline const char* sign_name(Sign s) { return s == Sign::plus ? "+" : "-"; }

inline void check_frequency(double re_omega) {
  if (!(re_omega > 0.0 && re_omega < 1.0))
    throw std::invalid_argument("frequency real part must lie in (0,1)");
}

// +-x1/omega + x2/sqrt(1-omega^2), principal square root.
template <class Scalar>
Scalar ell(const Vec2& x, const Scalar& omega, Sign sign) {
  check_frequency(std::real(omega));
  const Scalar root = std::sqrt(Scalar(1) - omega * omega);
  return double(to_int(sign)) * x.x() / omega + x.y() / root;
}

// Gradient of the real level function.
inline Vec2 ell_gradient(double lambda, Sign sign) {
  check_frequency(lambda);
  return Vec2(to_int(sign) / lambda, 1.0 / std::sqrt(1.0 - lambda * lambda));
}

struct StraightSegment {
  Vec2 start;
  Vec2 end;
};

// Angle runs linearly from start_angle to end_angle; counterclockwise arcs
// have end_angle > start_angle.
struct CircularArc {
  Vec2 center;
  double radius = 1.0;
  double start_angle = 0.0;
  double end_angle = 0.0;
};

using Edge = std::variant<StraightSegment, CircularArc>;

Vec2 edge_point(const Edge& e, double t);
Vec2 edge_tangent(const Edge& e, double t);
// Second derivative with respect to arclength.
Vec2 edge_curvature_vector(const Edge& e, double t);
double edge_length(const Edge& e);
bool is_straight(const Edge& e);

struct BoundaryPoint {
  std::size_t edge_index = 0;
  double local_param = 0.0;
  double theta = 0.0;
  Vec2 xy = Vec2::Zero();
};

class PlanarDomain {
 public:
  explicit PlanarDomain(std::vector<Edge> edges);

  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  double total_length() const { return total_length_; }
  double diameter() const { return diameter_; }
  // vertices()[i] is the start of edge i.
  const std::vector<Vec2>& vertices() const { return vertices_; }
  bool is_corner(std::size_t vertex) const { return corner_[vertex]; }
  std::vector<std::size_t> corner_vertices() const;
  bool is_polygon() const;

  BoundaryPoint at_theta(double theta) const;
  BoundaryPoint at_edge(std::size_t edge, double local_param) const;
  BoundaryPoint vertex_point(std::size_t vertex) const;
  double edge_theta_start(std::size_t edge) const { return cumulative_[edge] / total_length_; }
  double edge_theta_length(std::size_t edge) const { return lengths_[edge] / total_length_; }
  Vec2 tangent(const BoundaryPoint& p) const;
  // Nearest boundary point.
  BoundaryPoint project(const Vec2& x) const;
  bool contains(const Vec2& x) const;
  double signed_area() const;
  // Distance in theta on the circle R/Z.
  static double theta_distance(double a, double b);

 private:
  std::vector<Edge> edges_;
  std::vector<double> lengths_;
  std::vector<double> cumulative_;
  std::vector<Vec2> vertices_;
  std::vector<bool> corner_;
  double total_length_ = 0.0;
  double diameter_ = 0.0;
};

PlanarDomain make_polygon(const std::vector<Vec2>& vertices);
// Vertices (0,0), (a+b,0), (a,1), (0,1).
PlanarDomain make_trapezoid(double a, double b);
PlanarDomain make_tilted_square(double alpha);
PlanarDomain make_unit_square();

enum class Reflection { x1, x2, both };
// Reflected domain, re-oriented counterclockwise.
PlanarDomain reflect(const PlanarDomain& domain, Reflection r);
Vec2 reflect_point(const Vec2& x, Reflection r);

enum class Extremum { plus_max = 0, plus_min = 1, minus_max = 2, minus_min = 3 };
const char* extremum_name(Extremum e);

struct DegenerateEdge {
  std::size_t edge = 0;
  Sign sign = Sign::plus;
};

struct CharacteristicData {
  double lambda = 0.0;
  std::array<BoundaryPoint, 4> points;  // indexed by Extremum
  std::array<double, 4> values{};
  std::array<bool, 4> unique{};
  std::vector<DegenerateEdge> degenerate_edges;
  std::vector<std::pair<Extremum, Extremum>> coincidences;

  const BoundaryPoint& operator[](Extremum e) const { return points[static_cast<int>(e)]; }
  double value(Extremum e) const { return values[static_cast<int>(e)]; }
};

CharacteristicData characteristic_points(const PlanarDomain& domain, double lambda);

struct CornerClass {
  BoundaryPoint corner;
  std::size_t vertex = 0;
  Sign mu = Sign::plus;
  Sign nu = Sign::plus;
  double alpha_plus = 1.0;
  double alpha_minus = 1.0;
  double alpha = 1.0;
  double lambda = 0.0;
};

// Throws NotACharacteristicCorner unless the vertex is one of the four extrema.
CornerClass classify_corner(const PlanarDomain& domain, double lambda, const BoundaryPoint& vertex);
// Minimum of mu*l^{-nu}(x - kappa) over n sampled interior points, scaled by diam.
double corner_sign_sample(const PlanarDomain& domain, const CornerClass& c, int n, unsigned seed);

struct SimplicityReport {
  double lambda = 0.0;
  bool verdict = false;
  bool unique_extrema = false;
  bool smooth_away_from_extrema = false;
  bool nondegenerate_extrema = false;
  bool straight_corners = false;
  std::vector<std::string> diagnostics;
  std::vector<std::size_t> exotic_vertices;
  CharacteristicData characteristic;

  bool has_diagnostic(const std::string& needle) const;
};

SimplicityReport check_lambda_simple(const PlanarDomain& domain, double lambda);

}  // namespace wavetank
