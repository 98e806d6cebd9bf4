#include "wavetank/billiard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace wavetank {

namespace {

constexpr double kCornerTol = 1e-9;

double frac(double x) { return x - std::floor(x); }

double arc_param(const CircularArc& a, double phi) {
  const double sweep = a.end_angle - a.start_angle;
  double d = std::fmod(phi - a.start_angle, 2.0 * std::numbers::pi);
  if (sweep > 0) {
    if (d < 0) d += 2.0 * std::numbers::pi;
  } else {
    if (d > 0) d -= 2.0 * std::numbers::pi;
  }
  return d / sweep;
}

}  // namespace

bool MorseSmaleReport::has_diagnostic(const std::string& needle) const {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [&](const std::string& d) { return d.find(needle) != std::string::npos; });
}

ChessBilliard::ChessBilliard(const PlanarDomain& domain, double lambda) : domain_(&domain), lambda_(lambda) {
  grad_[0] = ell_gradient(lambda, Sign::plus);
  grad_[1] = ell_gradient(lambda, Sign::minus);
  for (std::size_t v : domain.corner_vertices()) corner_thetas_.push_back(domain.vertex_point(v).theta);
  // Reference point x-_min: fixed by gamma-, so b moves it unless it is an exotic corner.
  const Vec2& g = grad(Sign::minus);
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < domain.edge_count(); ++i) {
    const double v = g.dot(domain.vertices()[i]);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  BoundaryPoint ref = domain.vertex_point(best);
  for (std::size_t i = 0; i < domain.edge_count(); ++i) {
    const auto* a = std::get_if<CircularArc>(&domain.edges()[i]);
    if (!a) continue;
    const double t = arc_param(*a, std::atan2(-g.y(), -g.x()));
    if (t > 0 && t < 1) {
      const BoundaryPoint p = domain.at_edge(i, t);
      if (g.dot(p.xy) < best_val) {
        best_val = g.dot(p.xy);
        ref = p;
      }
    }
  }
  theta_ref_ = ref.theta;
  BoundaryPoint image = ref;
  try {
    image = b(ref);
  } catch (const Error&) {
  }
  lift_ref_ = theta_ref_ + frac(image.theta - theta_ref_);
}

BoundaryPoint ChessBilliard::gamma(Sign s, const BoundaryPoint& p) const {
  const PlanarDomain& dom = *domain_;
  const Vec2& g = grad(s);
  const double c = g.dot(p.xy);
  const double vtol = 1e-12 * dom.diameter() * g.norm();
  std::vector<BoundaryPoint> hits;
  bool whole_edge = false;
  auto add = [&](std::size_t e, double t) {
    if (t < -1e-12 || t > 1.0 + 1e-12) return;
    hits.push_back(dom.at_edge(e, std::clamp(t, 0.0, 1.0)));
  };
  for (std::size_t i = 0; i < dom.edge_count(); ++i) {
    const Edge& e = dom.edges()[i];
    if (const auto* seg = std::get_if<StraightSegment>(&e)) {
      const double d0 = g.dot(seg->start) - c;
      const double d1 = g.dot(seg->end) - c;
      if (std::abs(d0 - d1) < vtol) {
        if (std::abs(d0) < vtol) whole_edge = true;
        continue;
      }
      add(i, d0 / (d0 - d1));
    } else {
      const auto& a = std::get<CircularArc>(e);
      const double k = (c - g.dot(a.center)) / (g.norm() * a.radius);
      if (std::abs(k) > 1.0) continue;
      const double phig = std::atan2(g.y(), g.x());
      const double dphi = std::acos(std::clamp(k, -1.0, 1.0));
      add(i, arc_param(a, phig + dphi));
      if (dphi > 0) add(i, arc_param(a, phig - dphi));
    }
  }
  if (whole_edge)
    throw AmbiguousIntersection("level line of l" + std::string(sign_name(s)) + " contains a boundary edge");
  std::sort(hits.begin(), hits.end(), [](const BoundaryPoint& a, const BoundaryPoint& b) { return a.theta < b.theta; });
  std::vector<BoundaryPoint> uniq;
  for (const auto& h : hits) {
    bool dup = false;
    for (const auto& u : uniq)
      if (PlanarDomain::theta_distance(u.theta, h.theta) < 1e-12) dup = true;
    if (!dup) uniq.push_back(h);
  }
  if (uniq.empty()) return p;
  std::size_t self = 0;
  for (std::size_t i = 1; i < uniq.size(); ++i)
    if (PlanarDomain::theta_distance(uniq[i].theta, p.theta) < PlanarDomain::theta_distance(uniq[self].theta, p.theta))
      self = i;
  uniq.erase(uniq.begin() + static_cast<std::ptrdiff_t>(self));
  if (uniq.empty()) return p;
  if (uniq.size() > 1)
    throw AmbiguousIntersection("level line of l" + std::string(sign_name(s)) + " meets the boundary in " +
                                std::to_string(uniq.size() + 1) + " points");
  return uniq.front();
}

BoundaryPoint ChessBilliard::b(const BoundaryPoint& p) const {
  const BoundaryPoint q = gamma(Sign::minus, p);
  const BoundaryPoint r = gamma(Sign::plus, q);
  if (PlanarDomain::theta_distance(q.theta, p.theta) < 1e-14 && PlanarDomain::theta_distance(r.theta, p.theta) < 1e-14)
    throw AmbiguousIntersection("point is fixed by both gamma+ and gamma- (exotic corner)");
  return r;
}

BoundaryPoint ChessBilliard::b_inverse(const BoundaryPoint& p) const {
  const BoundaryPoint q = gamma(Sign::plus, p);
  const BoundaryPoint r = gamma(Sign::minus, q);
  if (PlanarDomain::theta_distance(q.theta, p.theta) < 1e-14 && PlanarDomain::theta_distance(r.theta, p.theta) < 1e-14)
    throw AmbiguousIntersection("point is fixed by both gamma+ and gamma- (exotic corner)");
  return r;
}

double ChessBilliard::lift_from(double theta, bool inverse) const {
  // The lift maps [base, base+1) onto [image_base, image_base+1).
  const double base = inverse ? lift_ref_ : theta_ref_;
  const double image_base = inverse ? theta_ref_ : lift_ref_;
  const double k = std::floor(theta - base);
  const double t = theta - k;
  const BoundaryPoint p = domain_->at_theta(t);
  const double img = (inverse ? b_inverse(p) : b(p)).theta;
  double r = frac(img - image_base);
  if (t - base < 1e-9 && r > 0.5) r -= 1.0;
  if (base + 1.0 - t < 1e-9 && r < 0.5) r += 1.0;
  return image_base + r + k;
}

double ChessBilliard::lift(double theta) const { return lift_from(theta, false); }
double ChessBilliard::lift_inverse(double theta) const { return lift_from(theta, true); }

double ChessBilliard::distance_to_corners(const BoundaryPoint& p) const {
  double d = std::numeric_limits<double>::infinity();
  for (double t : corner_thetas_) d = std::min(d, PlanarDomain::theta_distance(t, p.theta));
  return d;
}

double ChessBilliard::gamma_derivative(Sign s, const BoundaryPoint& p) const {
  const BoundaryPoint q = gamma(s, p);
  if (distance_to_corners(p) < kCornerTol || distance_to_corners(q) < kCornerTol)
    throw CornerContact("reflection touches a corner");
  const Vec2& g = grad(s);
  return std::abs(g.dot(domain_->tangent(p)) / g.dot(domain_->tangent(q)));
}

double ChessBilliard::derivative(const BoundaryPoint& p) const {
  const double d1 = gamma_derivative(Sign::minus, p);
  const BoundaryPoint q = gamma(Sign::minus, p);
  return d1 * gamma_derivative(Sign::plus, q);
}

BoundaryPoint gamma(const PlanarDomain& domain, double lambda, Sign sign, const BoundaryPoint& p) {
  return ChessBilliard(domain, lambda).gamma(sign, p);
}

BoundaryPoint chess_billiard(const PlanarDomain& domain, double lambda, const BoundaryPoint& p) {
  return ChessBilliard(domain, lambda).b(p);
}

double lift_b(const PlanarDomain& domain, double lambda, double theta) {
  return ChessBilliard(domain, lambda).lift(theta);
}

double derivative_b(const PlanarDomain& domain, double lambda, const BoundaryPoint& p) {
  return ChessBilliard(domain, lambda).derivative(p);
}

RotationNumber rational_guess(double approx, double error_bound, long q_max) {
  RotationNumber out;
  out.approx = approx;
  out.error_bound = error_bound;
  long h2 = 0, h1 = 1, k2 = 1, k1 = 0;
  double x = approx;
  bool have = false;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(x);
    const long h = static_cast<long>(a) * h1 + h2;
    const long k = static_cast<long>(a) * k1 + k2;
    if (k > q_max) break;
    out.p = h;
    out.q = k;
    have = true;
    if (std::abs(approx - double(h) / double(k)) <= error_bound) break;
    h2 = h1;
    h1 = h;
    k2 = k1;
    k1 = k;
    const double f = x - a;
    if (f < 1e-15) break;
    x = 1.0 / f;
  }
  if (!have) {
    out.p = static_cast<long>(std::llround(approx));
    out.q = 1;
  }
  return out;
}

RotationNumber rotation_number(const PlanarDomain& domain, double lambda, int n_iter, double seed_theta) {
  const ChessBilliard cb(domain, lambda);
  double x = seed_theta;
  for (int i = 0; i < n_iter; ++i) x = cb.lift(x);
  const double approx = (x - seed_theta) / n_iter;
  return rational_guess(approx, 1.0 / n_iter, std::max<long>(1, n_iter / 10));
}

namespace {

OrbitRecord build_orbit(const ChessBilliard& cb, double theta, int q) {
  OrbitRecord rec;
  rec.seed = cb.domain().at_theta(theta);
  rec.is_periodic = true;
  rec.period = q;
  double lifted = theta;
  BoundaryPoint p = rec.seed;
  rec.points.push_back(p);
  rec.lift_values.push_back(lifted);
  double m = 1.0;
  for (int k = 0; k < q; ++k) {
    try {
      if (!rec.corner_contact) m *= cb.derivative(p);
    } catch (const CornerContact&) {
      rec.corner_contact = true;
    }
    if (cb.distance_to_corners(p) < kCornerTol) rec.corner_contact = true;
    lifted = cb.lift(lifted);
    p = cb.domain().at_theta(lifted);
    rec.points.push_back(p);
    rec.lift_values.push_back(lifted);
  }
  rec.multiplier = rec.corner_contact ? std::numeric_limits<double>::quiet_NaN() : m;
  return rec;
}

}  // namespace

PeriodicSearch find_periodic_orbits(const PlanarDomain& domain, double lambda, int q_max, int grid_n, double tol) {
  const ChessBilliard cb(domain, lambda);
  PeriodicSearch out;
  const int n_iter = std::max(20000, 200 * q_max);
  const double seed = cb.reference_theta() + 0.318309886;
  double x = seed;
  for (int i = 0; i < n_iter; ++i) x = cb.lift(x);
  out.rotation = rational_guess((x - seed) / n_iter, 1.0 / n_iter, q_max);
  const long p = out.rotation.p;
  const int q = static_cast<int>(out.rotation.q);
  if (std::abs(out.rotation.approx - double(p) / q) > out.rotation.error_bound) {
    std::ostringstream os;
    os << "rotation number " << out.rotation.approx << " not resolved with denominator <= " << q_max;
    throw NoPeriodicOrbit(os.str());
  }
  auto G = [&](double t) {
    double y = t;
    for (int k = 0; k < q; ++k) y = cb.lift(y);
    return y - t - double(p);
  };
  const double base = cb.reference_theta();
  std::vector<double> grid(grid_n + 1), vals(grid_n + 1);
  double max_abs = 0.0;
  for (int k = 0; k <= grid_n; ++k) {
    grid[k] = base + double(k) / grid_n;
    vals[k] = G(grid[k]);
    max_abs = std::max(max_abs, std::abs(vals[k]));
  }
  std::vector<double> roots;
  if (max_abs < 1e-10) {
    out.all_periodic = true;
    for (int k = 0; k < grid_n; ++k) roots.push_back(grid[k]);
  } else {
    for (int k = 0; k < grid_n; ++k) {
      if (vals[k] == 0.0) {
        roots.push_back(grid[k]);
        continue;
      }
      if ((vals[k] > 0) == (vals[k + 1] > 0) || vals[k + 1] == 0.0) continue;
      double lo = grid[k], hi = grid[k + 1], flo = vals[k];
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = G(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm > 0) == (flo > 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
  }
  std::vector<double> seen;
  for (double r : roots) {
    const double rt = frac(r);
    if (!out.all_periodic) {
      bool dup = false;
      for (double s : seen)
        if (PlanarDomain::theta_distance(s, rt) < 1e-7) dup = true;
      if (dup) continue;
    }
    OrbitRecord rec = build_orbit(cb, r, q);
    for (const auto& pt : rec.points) seen.push_back(pt.theta);
    out.orbits.push_back(std::move(rec));
  }
  return out;
}

MorseSmaleReport morse_smale_check(const PlanarDomain& domain, double lambda, double hyperbolicity_margin) {
  MorseSmaleReport rep;
  rep.lambda = lambda;
  const SimplicityReport simple = check_lambda_simple(domain, lambda);
  rep.lambda_simple = simple.verdict;
  if (!simple.verdict) {
    rep.diagnostics.push_back("not lambda-simple");
    for (const auto& d : simple.diagnostics) rep.diagnostics.push_back(d);
  }
  if (!simple.exotic_vertices.empty()) {
    rep.diagnostics.push_back("b fixes an exotic corner; dynamics not evaluated");
    rep.status = MorseSmaleStatus::not_morse_smale;
    return rep;
  }
  PeriodicSearch search;
  try {
    search = find_periodic_orbits(domain, lambda);
  } catch (const NoPeriodicOrbit& e) {
    rep.diagnostics.push_back(std::string("no periodic orbit: ") + e.what());
    return rep;
  } catch (const Error& e) {
    rep.diagnostics.push_back(std::string("billiard map failed: ") + e.what());
    return rep;
  }
  rep.rotation = search.rotation;
  rep.sigma_nonempty = !search.orbits.empty();
  if (!rep.sigma_nonempty) rep.diagnostics.push_back("no periodic orbit found");
  rep.sigma_disjoint_from_corners = true;
  rep.hyperbolic = true;
  bool within_margin = false;
  rep.min_abs_log_multiplier = std::numeric_limits<double>::infinity();
  for (auto& o : search.orbits) {
    if (o.corner_contact) {
      rep.sigma_disjoint_from_corners = false;
      continue;
    }
    const double lm = std::log(std::abs(o.multiplier));
    rep.min_abs_log_multiplier = std::min(rep.min_abs_log_multiplier, std::abs(lm));
    if (std::abs(lm) <= hyperbolicity_margin) within_margin = true;
    if (lm < 0) rep.attracting_orbits.push_back(o);
    else if (lm > 0) rep.repelling_orbits.push_back(o);
  }
  if (search.orbits.empty()) rep.min_abs_log_multiplier = 0.0;
  if (!rep.sigma_disjoint_from_corners) rep.diagnostics.push_back("periodic orbit through a corner");
  if (search.all_periodic) {
    rep.hyperbolic = false;
    rep.diagnostics.push_back("non-hyperbolic: b^q = id on the whole circle");
  } else if (within_margin) {
    rep.hyperbolic = false;
    rep.diagnostics.push_back("non-hyperbolic within margin: |log m| <= " + std::to_string(hyperbolicity_margin));
  }
  rep.verdict = rep.lambda_simple && rep.sigma_nonempty && rep.sigma_disjoint_from_corners && rep.hyperbolic;
  if (rep.verdict) rep.status = MorseSmaleStatus::certified;
  else if (rep.lambda_simple && rep.sigma_nonempty && rep.sigma_disjoint_from_corners && within_margin &&
           !search.all_periodic)
    rep.status = MorseSmaleStatus::undetermined;
  else rep.status = MorseSmaleStatus::not_morse_smale;
  return rep;
}

namespace {

std::vector<double> sigma_thetas(const std::vector<OrbitRecord>& orbits) {
  std::vector<double> out;
  for (const auto& o : orbits)
    for (std::size_t i = 0; i + 1 < o.points.size(); ++i) out.push_back(o.points[i].theta);
  return out;
}

double distance_to_set(double theta, const std::vector<double>& set) {
  double d = std::numeric_limits<double>::infinity();
  for (double s : set) d = std::min(d, PlanarDomain::theta_distance(s, theta));
  return d;
}

}  // namespace

RaySet corner_orbits(const PlanarDomain& domain, double lambda, int depth) {
  const ChessBilliard cb(domain, lambda);
  RaySet out;
  std::vector<double> sig_plus, sig_minus;
  try {
    const PeriodicSearch search = find_periodic_orbits(domain, lambda);
    std::vector<OrbitRecord> att, rep;
    for (const auto& o : search.orbits) {
      if (o.corner_contact) continue;
      (std::abs(o.multiplier) < 1.0 ? att : rep).push_back(o);
    }
    sig_plus = sigma_thetas(att);
    sig_minus = sigma_thetas(rep);
  } catch (const NoPeriodicOrbit&) {
  }
  for (std::size_t v : domain.corner_vertices()) {
    CornerClass c;
    try {
      c = classify_corner(domain, lambda, domain.vertex_point(v));
    } catch (const NotACharacteristicCorner&) {
      continue;
    }
    const BoundaryPoint kappa = c.corner;
    out.special_rays.push_back({kappa, cb.gamma(c.nu, kappa), c.nu});

    auto forward = [&](BoundaryPoint x, bool include_first) {
      int k = 0;
      if (include_first) {
        out.forward.push_back(x);
        if (distance_to_set(x.theta, sig_plus) < 1e-6) return;
      }
      for (k = 1; k <= depth; ++k) {
        x = cb.b(x);
        out.forward.push_back(x);
        if (distance_to_set(x.theta, sig_plus) < 1e-6) break;
      }
    };
    auto backward = [&](BoundaryPoint x, bool include_first) {
      if (include_first) {
        out.backward.push_back(x);
        if (distance_to_set(x.theta, sig_minus) < 1e-6) return;
      }
      for (int k = 1; k <= depth; ++k) {
        x = cb.b_inverse(x);
        out.backward.push_back(x);
        if (distance_to_set(x.theta, sig_minus) < 1e-6) break;
      }
    };
    if (c.nu == Sign::plus) {
      forward(cb.gamma(Sign::plus, kappa), true);
      backward(kappa, false);
    } else {
      forward(kappa, false);
      backward(cb.gamma(Sign::minus, kappa), true);
    }
  }
  return out;
}

RaySet attractor_chords(const PlanarDomain& domain, double lambda) {
  const ChessBilliard cb(domain, lambda);
  RaySet out;
  const PeriodicSearch search = find_periodic_orbits(domain, lambda);
  for (const auto& o : search.orbits) {
    if (o.corner_contact || !(std::abs(o.multiplier) < 1.0)) continue;
    for (std::size_t i = 0; i + 1 < o.points.size(); ++i) {
      const BoundaryPoint& x = o.points[i];
      for (Sign s : {Sign::plus, Sign::minus}) {
        const BoundaryPoint y = cb.gamma(s, x);
        bool dup = false;
        for (const auto& ch : out.attractor_chords) {
          if (ch.sign != s) continue;
          if ((PlanarDomain::theta_distance(ch.a.theta, x.theta) < 1e-9 &&
               PlanarDomain::theta_distance(ch.b.theta, y.theta) < 1e-9) ||
              (PlanarDomain::theta_distance(ch.a.theta, y.theta) < 1e-9 &&
               PlanarDomain::theta_distance(ch.b.theta, x.theta) < 1e-9))
            dup = true;
        }
        if (!dup) out.attractor_chords.push_back({x, y, s});
      }
    }
  }
  return out;
}

}  // namespace wavetank
