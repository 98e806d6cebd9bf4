#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavetank/geometry.hpp"

namespace wavetank {

struct OrbitRecord {
  BoundaryPoint seed;
  std::vector<BoundaryPoint> points;
  std::vector<double> lift_values;
  bool is_periodic = false;
  int period = 0;
  double multiplier = 0.0;
  bool corner_contact = false;
};

struct RotationNumber {
  double approx = 0.0;
  long p = 0;
  long q = 1;
  double error_bound = 1.0;
};

enum class MorseSmaleStatus { certified, not_morse_smale, undetermined };

struct MorseSmaleReport {
  double lambda = 0.0;
  bool verdict = false;
  MorseSmaleStatus status = MorseSmaleStatus::not_morse_smale;
  bool lambda_simple = false;
  std::optional<RotationNumber> rotation;
  std::vector<OrbitRecord> attracting_orbits;
  std::vector<OrbitRecord> repelling_orbits;
  bool sigma_nonempty = false;
  bool sigma_disjoint_from_corners = false;
  bool hyperbolic = false;
  double min_abs_log_multiplier = 0.0;
  std::vector<std::string> diagnostics;

  bool has_diagnostic(const std::string& needle) const;
};

struct Chord {
  BoundaryPoint a;
  BoundaryPoint b;
  Sign sign = Sign::plus;
};

struct RaySet {
  std::vector<BoundaryPoint> forward;
  std::vector<BoundaryPoint> backward;
  std::vector<Chord> special_rays;
  std::vector<Chord> attractor_chords;
};

// Evaluation context for one (domain, lambda); cheap to construct.
class ChessBilliard {
 public:
  ChessBilliard(const PlanarDomain& domain, double lambda);

  const PlanarDomain& domain() const { return *domain_; }
  double lambda() const { return lambda_; }

  BoundaryPoint gamma(Sign s, const BoundaryPoint& p) const;
  BoundaryPoint b(const BoundaryPoint& p) const;
  BoundaryPoint b_inverse(const BoundaryPoint& p) const;
  double lift(double theta) const;
  double lift_inverse(double theta) const;
  double gamma_derivative(Sign s, const BoundaryPoint& p) const;
  double derivative(const BoundaryPoint& p) const;
  double distance_to_corners(const BoundaryPoint& p) const;
  double reference_theta() const { return theta_ref_; }

 private:
  const PlanarDomain* domain_;
  double lambda_;
  Vec2 grad_[2];
  double theta_ref_ = 0.0;
  double lift_ref_ = 0.0;
  std::vector<double> corner_thetas_;

  const Vec2& grad(Sign s) const { return grad_[s == Sign::plus ? 0 : 1]; }
  double lift_from(double theta, bool inverse) const;
};

BoundaryPoint gamma(const PlanarDomain& domain, double lambda, Sign sign, const BoundaryPoint& p);
BoundaryPoint chess_billiard(const PlanarDomain& domain, double lambda, const BoundaryPoint& p);
double lift_b(const PlanarDomain& domain, double lambda, double theta);
double derivative_b(const PlanarDomain& domain, double lambda, const BoundaryPoint& p);

RotationNumber rotation_number(const PlanarDomain& domain, double lambda, int n_iter, double seed_theta);
// Smallest-denominator convergent within the error bound, q <= q_max.
RotationNumber rational_guess(double approx, double error_bound, long q_max);

struct PeriodicSearch {
  std::vector<OrbitRecord> orbits;
  RotationNumber rotation;
  bool all_periodic = false;  // b^q - p vanishes on the whole grid
};

PeriodicSearch find_periodic_orbits(const PlanarDomain& domain, double lambda, int q_max = 50, int grid_n = 2000,
                                    double tol = 1e-13);

MorseSmaleReport morse_smale_check(const PlanarDomain& domain, double lambda, double hyperbolicity_margin = 1e-3);

RaySet corner_orbits(const PlanarDomain& domain, double lambda, int depth = 50);
RaySet attractor_chords(const PlanarDomain& domain, double lambda);

}  // namespace wavetank
