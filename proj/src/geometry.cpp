#include "wavetank/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace wavetank {

namespace {

constexpr double kPi = std::numbers::pi;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

std::string fmt_point(const Vec2& p) {
  std::ostringstream os;
  os.precision(6);
  os << "(" << p.x() << ", " << p.y() << ")";
  return os.str();
}

// Arc parameter of an angle, unwrapped toward the arc's sweep direction.
double arc_param(const CircularArc& a, double phi) {
  const double sweep = a.end_angle - a.start_angle;
  double d = std::fmod(phi - a.start_angle, 2.0 * kPi);
  if (sweep > 0) {
    if (d < 0) d += 2.0 * kPi;
  } else {
    if (d > 0) d -= 2.0 * kPi;
  }
  return d / sweep;
}

std::vector<Vec2> polyline(const Edge& e) {
  const int n = is_straight(e) ? 1 : 64;
  std::vector<Vec2> pts;
  for (int k = 0; k <= n; ++k) pts.push_back(edge_point(e, double(k) / n));
  return pts;
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  auto on_seg = [](const Vec2& a, const Vec2& b, const Vec2& p, double d) {
    return d == 0.0 && std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
           std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
  };
  return on_seg(q1, q2, p1, d1) || on_seg(q1, q2, p2, d2) || on_seg(p1, p2, q1, d3) ||
         on_seg(p1, p2, q2, d4);
}

Edge reversed_reflection(const Edge& e, Reflection r) {
  if (const auto* s = std::get_if<StraightSegment>(&e)) {
    if (r == Reflection::both) return StraightSegment{reflect_point(s->start, r), reflect_point(s->end, r)};
    return StraightSegment{reflect_point(s->end, r), reflect_point(s->start, r)};
  }
  const auto& a = std::get<CircularArc>(e);
  CircularArc out;
  out.center = reflect_point(a.center, r);
  out.radius = a.radius;
  switch (r) {
    case Reflection::x1:
      out.start_angle = kPi - a.end_angle;
      out.end_angle = kPi - a.start_angle;
      break;
    case Reflection::x2:
      out.start_angle = -a.end_angle;
      out.end_angle = -a.start_angle;
      break;
    case Reflection::both:
      out.start_angle = a.start_angle + kPi;
      out.end_angle = a.end_angle + kPi;
      break;
  }
  return out;
}

}  // namespace

Vec2 edge_point(const Edge& e, double t) {
  if (const auto* s = std::get_if<StraightSegment>(&e)) return s->start + t * (s->end - s->start);
  const auto& a = std::get<CircularArc>(e);
  const double phi = a.start_angle + t * (a.end_angle - a.start_angle);
  return a.center + a.radius * Vec2(std::cos(phi), std::sin(phi));
}

Vec2 edge_tangent(const Edge& e, double t) {
  if (const auto* s = std::get_if<StraightSegment>(&e)) return (s->end - s->start).normalized();
  const auto& a = std::get<CircularArc>(e);
  const double phi = a.start_angle + t * (a.end_angle - a.start_angle);
  const double dir = a.end_angle > a.start_angle ? 1.0 : -1.0;
  return dir * Vec2(-std::sin(phi), std::cos(phi));
}

Vec2 edge_curvature_vector(const Edge& e, double t) {
  if (std::holds_alternative<StraightSegment>(e)) return Vec2::Zero();
  const auto& a = std::get<CircularArc>(e);
  const double phi = a.start_angle + t * (a.end_angle - a.start_angle);
  return -Vec2(std::cos(phi), std::sin(phi)) / a.radius;
}

double edge_length(const Edge& e) {
  if (const auto* s = std::get_if<StraightSegment>(&e)) return (s->end - s->start).norm();
  const auto& a = std::get<CircularArc>(e);
  return a.radius * std::abs(a.end_angle - a.start_angle);
}

bool is_straight(const Edge& e) { return std::holds_alternative<StraightSegment>(e); }

PlanarDomain::PlanarDomain(std::vector<Edge> edges) : edges_(std::move(edges)) {
  const std::size_t n = edges_.size();
  if (n < 2) throw GeometryError("domain needs at least two edges");
  for (const auto& e : edges_) {
    if (const auto* a = std::get_if<CircularArc>(&e)) {
      if (!(a->radius > 0)) throw GeometryError("arc radius must be positive");
      const double sweep = std::abs(a->end_angle - a->start_angle);
      if (!(sweep > 0 && sweep < 2.0 * kPi)) throw GeometryError("arc extent must lie in (0, 2pi)");
    }
    const double len = edge_length(e);
    if (!(len > 0)) throw GeometryError("zero-length edge");
    lengths_.push_back(len);
  }
  double scale = 0.0;
  for (const auto& e : edges_) scale = std::max(scale, edge_point(e, 0.0).norm() + edge_length(e));
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 end = edge_point(edges_[i], 1.0);
    const Vec2 next = edge_point(edges_[(i + 1) % n], 0.0);
    if ((end - next).norm() > 1e-9 * scale) throw GeometryError("boundary is not closed at edge " + std::to_string(i));
  }
  cumulative_.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) cumulative_[i + 1] = cumulative_[i] + lengths_[i];
  total_length_ = cumulative_[n];
  for (std::size_t i = 0; i < n; ++i) vertices_.push_back(edge_point(edges_[i], 0.0));

  std::vector<std::vector<Vec2>> lines;
  for (const auto& e : edges_) lines.push_back(polyline(e));
  for (const auto& l : lines)
    for (const auto& p : l)
      for (const auto& m : lines)
        for (const auto& q : m) diameter_ = std::max(diameter_, (p - q).norm());

  corner_.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 tin = edge_tangent(edges_[(i + n - 1) % n], 1.0);
    const Vec2 tout = edge_tangent(edges_[i], 0.0);
    if (tin.dot(tout) < -1.0 + 1e-12) throw GeometryError("boundary reverses direction at vertex " + std::to_string(i));
    corner_[i] = std::abs(cross(tin, tout)) > 1e-9 || tin.dot(tout) < 0;
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent_next = (j == i + 1);
      const bool adjacent_prev = (i == 0 && j == n - 1);
      const auto& a = lines[i];
      const auto& b = lines[j];
      for (std::size_t p = 0; p + 1 < a.size(); ++p) {
        for (std::size_t q = 0; q + 1 < b.size(); ++q) {
          if (adjacent_next && p + 2 == a.size() && q == 0) continue;
          if (adjacent_prev && p == 0 && q + 2 == b.size()) continue;
          if (n == 2 && ((p == 0 && q + 2 == b.size()) || (p + 2 == a.size() && q == 0))) continue;
          if (segments_intersect(a[p], a[p + 1], b[q], b[q + 1]))
            throw GeometryError("boundary self-intersects between edges " + std::to_string(i) + " and " + std::to_string(j));
        }
      }
    }
  }
  if (!(signed_area() > 0)) throw GeometryError("boundary must be counterclockwise");
}

std::vector<std::size_t> PlanarDomain::corner_vertices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < corner_.size(); ++i)
    if (corner_[i]) out.push_back(i);
  return out;
}

bool PlanarDomain::is_polygon() const {
  return std::all_of(edges_.begin(), edges_.end(), [](const Edge& e) { return is_straight(e); });
}

double PlanarDomain::theta_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), 1.0);
  return std::min(d, 1.0 - d);
}

BoundaryPoint PlanarDomain::at_edge(std::size_t edge, double local_param) const {
  if (edge >= edges_.size()) throw std::out_of_range("edge index");
  if (local_param >= 1.0) {
    edge = (edge + 1) % edges_.size();
    local_param = 0.0;
  }
  local_param = std::max(local_param, 0.0);
  BoundaryPoint p;
  p.edge_index = edge;
  p.local_param = local_param;
  p.theta = (cumulative_[edge] + local_param * lengths_[edge]) / total_length_;
  if (p.theta >= 1.0) p.theta -= 1.0;
  p.xy = edge_point(edges_[edge], local_param);
  return p;
}

BoundaryPoint PlanarDomain::at_theta(double theta) const {
  theta -= std::floor(theta);
  const double s = theta * total_length_;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t e = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - cumulative_.begin()) - 1));
  e = std::min(e, edges_.size() - 1);
  BoundaryPoint p;
  p.edge_index = e;
  p.local_param = std::clamp((s - cumulative_[e]) / lengths_[e], 0.0, 1.0);
  if (p.local_param >= 1.0) return at_edge(e, 1.0);
  p.theta = theta;
  p.xy = edge_point(edges_[e], p.local_param);
  return p;
}

BoundaryPoint PlanarDomain::vertex_point(std::size_t vertex) const { return at_edge(vertex % edges_.size(), 0.0); }

Vec2 PlanarDomain::tangent(const BoundaryPoint& p) const { return edge_tangent(edges_[p.edge_index], p.local_param); }

BoundaryPoint PlanarDomain::project(const Vec2& x) const {
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_edge = 0;
  double best_t = 0.0;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    double t = 0.0;
    if (const auto* s = std::get_if<StraightSegment>(&edges_[i])) {
      const Vec2 d = s->end - s->start;
      t = std::clamp((x - s->start).dot(d) / d.squaredNorm(), 0.0, 1.0);
    } else {
      const auto& a = std::get<CircularArc>(edges_[i]);
      const Vec2 r = x - a.center;
      t = arc_param(a, std::atan2(r.y(), r.x()));
      if (t > 1.0) {
        const double d0 = (edge_point(edges_[i], 0.0) - x).norm();
        const double d1 = (edge_point(edges_[i], 1.0) - x).norm();
        t = d0 < d1 ? 0.0 : 1.0;
      }
    }
    const double dist = (edge_point(edges_[i], t) - x).norm();
    if (dist < best) {
      best = dist;
      best_edge = i;
      best_t = t;
    }
  }
  return at_edge(best_edge, best_t);
}

bool PlanarDomain::contains(const Vec2& x) const {
  bool inside = false;
  for (const auto& e : edges_) {
    if (const auto* s = std::get_if<StraightSegment>(&e)) {
      const Vec2& p = s->start;
      const Vec2& q = s->end;
      if ((p.y() > x.y()) != (q.y() > x.y())) {
        const double xi = p.x() + (x.y() - p.y()) * (q.x() - p.x()) / (q.y() - p.y());
        if (xi > x.x()) inside = !inside;
      }
    } else {
      const auto& a = std::get<CircularArc>(e);
      const double dy = x.y() - a.center.y();
      if (std::abs(dy) >= a.radius) continue;
      const double dx = std::sqrt(a.radius * a.radius - dy * dy);
      for (double sgn : {-1.0, 1.0}) {
        const double xi = a.center.x() + sgn * dx;
        if (xi <= x.x()) continue;
        const double t = arc_param(a, std::atan2(dy, sgn * dx));
        if (t >= 0.0 && t < 1.0) inside = !inside;
      }
    }
  }
  return inside;
}

double PlanarDomain::signed_area() const {
  double area = 0.0;
  for (const auto& e : edges_) {
    if (const auto* s = std::get_if<StraightSegment>(&e)) {
      area += 0.5 * cross(s->start, s->end);
    } else {
      const auto& a = std::get<CircularArc>(e);
      const double R = a.radius;
      area += 0.5 * (R * a.center.x() * (std::sin(a.end_angle) - std::sin(a.start_angle)) -
                     R * a.center.y() * (std::cos(a.end_angle) - std::cos(a.start_angle)) +
                     R * R * (a.end_angle - a.start_angle));
    }
  }
  return area;
}

PlanarDomain make_polygon(const std::vector<Vec2>& vertices) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    edges.push_back(StraightSegment{vertices[i], vertices[(i + 1) % vertices.size()]});
  return PlanarDomain(std::move(edges));
}

PlanarDomain make_trapezoid(double a, double b) {
  if (!(a > 0 && b > 0)) throw GeometryError("trapezoid parameters must be positive");
  return make_polygon({Vec2(0, 0), Vec2(a + b, 0), Vec2(a, 1), Vec2(0, 1)});
}

PlanarDomain make_tilted_square(double alpha) {
  const double s2 = std::sqrt(2.0);
  return make_polygon({Vec2(0, 0), Vec2(std::cos(alpha), std::sin(alpha)),
                       s2 * Vec2(std::cos(alpha + kPi / 4), std::sin(alpha + kPi / 4)),
                       Vec2(std::cos(alpha + kPi / 2), std::sin(alpha + kPi / 2))});
}

PlanarDomain make_unit_square() { return make_polygon({Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)}); }

Vec2 reflect_point(const Vec2& x, Reflection r) {
  switch (r) {
    case Reflection::x1: return Vec2(-x.x(), x.y());
    case Reflection::x2: return Vec2(x.x(), -x.y());
    case Reflection::both: return -x;
  }
  return x;
}

PlanarDomain reflect(const PlanarDomain& domain, Reflection r) {
  std::vector<Edge> out;
  const auto& edges = domain.edges();
  if (r == Reflection::both) {
    for (const auto& e : edges) out.push_back(reversed_reflection(e, r));
  } else {
    for (std::size_t i = edges.size(); i-- > 0;) out.push_back(reversed_reflection(edges[i], r));
  }
  return PlanarDomain(std::move(out));
}

const char* extremum_name(Extremum e) {
  switch (e) {
    case Extremum::plus_max: return "x+max";
    case Extremum::plus_min: return "x+min";
    case Extremum::minus_max: return "x-max";
    case Extremum::minus_min: return "x-min";
  }
  return "?";
}

namespace {

struct Candidate {
  BoundaryPoint point;
  double value;
  bool at_vertex;
  std::size_t vertex;
};

std::vector<Candidate> level_candidates(const PlanarDomain& domain, double lambda, Sign s) {
  const Vec2 g = ell_gradient(lambda, s);
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < domain.edge_count(); ++i) {
    const BoundaryPoint p = domain.vertex_point(i);
    out.push_back({p, g.dot(p.xy), true, i});
  }
  for (std::size_t i = 0; i < domain.edge_count(); ++i) {
    const auto* a = std::get_if<CircularArc>(&domain.edges()[i]);
    if (!a) continue;
    const double phi = std::atan2(g.y(), g.x());
    for (double shift : {0.0, kPi}) {
      const double t = arc_param(*a, phi + shift);
      if (t > 1e-12 && t < 1.0 - 1e-12) {
        const BoundaryPoint p = domain.at_edge(i, t);
        out.push_back({p, g.dot(p.xy), false, 0});
      }
    }
  }
  return out;
}

double value_tolerance(const PlanarDomain& domain, double lambda, Sign s) {
  return 1e-10 * domain.diameter() * ell_gradient(lambda, s).norm();
}

}  // namespace

CharacteristicData characteristic_points(const PlanarDomain& domain, double lambda) {
  check_frequency(lambda);
  CharacteristicData out;
  out.lambda = lambda;
  const double point_tol = 1e-10 * domain.diameter();
  for (Sign s : {Sign::plus, Sign::minus}) {
    const auto cands = level_candidates(domain, lambda, s);
    const double tol = value_tolerance(domain, lambda, s);
    const int base = s == Sign::plus ? 0 : 2;
    for (int k = 0; k < 2; ++k) {
      const bool is_max = k == 0;
      std::size_t best = 0;
      for (std::size_t c = 1; c < cands.size(); ++c) {
        if (is_max ? cands[c].value > cands[best].value : cands[c].value < cands[best].value) best = c;
      }
      out.points[base + k] = cands[best].point;
      out.values[base + k] = cands[best].value;
      bool unique = true;
      for (std::size_t c = 0; c < cands.size(); ++c) {
        if (c == best) continue;
        if (std::abs(cands[c].value - cands[best].value) < tol &&
            (cands[c].point.xy - cands[best].point.xy).norm() > point_tol)
          unique = false;
      }
      out.unique[base + k] = unique;
    }
    const Vec2 g = ell_gradient(lambda, s);
    for (std::size_t i = 0; i < domain.edge_count(); ++i) {
      const auto* seg = std::get_if<StraightSegment>(&domain.edges()[i]);
      if (!seg) continue;
      const Vec2 d = seg->end - seg->start;
      if (std::abs(g.dot(d)) < 1e-10 * g.norm() * d.norm()) out.degenerate_edges.push_back({i, s});
    }
  }
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if ((out.points[i].xy - out.points[j].xy).norm() < point_tol)
        out.coincidences.emplace_back(static_cast<Extremum>(i), static_cast<Extremum>(j));
  return out;
}

namespace {

std::vector<Extremum> matching_extrema(const PlanarDomain& domain, const CharacteristicData& cd, const Vec2& x) {
  std::vector<Extremum> out;
  for (int i = 0; i < 4; ++i)
    if ((cd.points[i].xy - x).norm() < 1e-10 * domain.diameter()) out.push_back(static_cast<Extremum>(i));
  return out;
}

}  // namespace

CornerClass classify_corner(const PlanarDomain& domain, double lambda, const BoundaryPoint& vertex) {
  const std::size_t n = domain.edge_count();
  std::size_t v = n;
  for (std::size_t i = 0; i < n; ++i)
    if ((domain.vertices()[i] - vertex.xy).norm() < 1e-10 * domain.diameter()) v = i;
  if (v == n) throw NotACharacteristicCorner("point " + fmt_point(vertex.xy) + " is not a vertex");
  if (!domain.is_corner(v)) throw NotACharacteristicCorner("vertex " + fmt_point(vertex.xy) + " is smooth");

  const CharacteristicData cd = characteristic_points(domain, lambda);
  const auto match = matching_extrema(domain, cd, domain.vertices()[v]);
  if (match.empty()) throw NotACharacteristicCorner("vertex " + fmt_point(vertex.xy) + " is not an extremum of l+-");
  if (match.size() > 1) throw NotACharacteristicCorner("vertex " + fmt_point(vertex.xy) + " is an exotic corner");

  CornerClass c;
  c.corner = domain.vertex_point(v);
  c.vertex = v;
  c.lambda = lambda;
  switch (match.front()) {
    case Extremum::minus_min: c.mu = Sign::plus; c.nu = Sign::plus; break;
    case Extremum::minus_max: c.mu = Sign::minus; c.nu = Sign::plus; break;
    case Extremum::plus_min: c.mu = Sign::plus; c.nu = Sign::minus; break;
    case Extremum::plus_max: c.mu = Sign::minus; c.nu = Sign::minus; break;
  }
  const Vec2 gnu = ell_gradient(lambda, c.nu);
  const Vec2 gother = ell_gradient(lambda, opposite(c.nu));
  const Vec2 w_in = -edge_tangent(domain.edges()[(v + n - 1) % n], 1.0);
  const Vec2 w_out = edge_tangent(domain.edges()[v], 0.0);
  double pos = 0.0, neg = 0.0;
  int npos = 0, nneg = 0;
  for (const Vec2& w : {w_in, w_out}) {
    const double denom = gother.dot(w);
    if (std::abs(denom) < 1e-12) throw NotACharacteristicCorner("edge at " + fmt_point(vertex.xy) + " is characteristic");
    const double r = gnu.dot(w) / denom;
    if (r > 0) {
      pos = r;
      ++npos;
    } else {
      neg = -r;
      ++nneg;
    }
  }
  if (npos != 1 || nneg != 1) throw NotACharacteristicCorner("edge slopes at " + fmt_point(vertex.xy) + " do not straddle");
  c.alpha_plus = pos;
  c.alpha_minus = neg;
  c.alpha = pos / neg;
  return c;
}

double corner_sign_sample(const PlanarDomain& domain, const CornerClass& c, int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  Vec2 lo = domain.vertices().front(), hi = lo;
  for (const auto& e : domain.edges())
    for (int k = 0; k <= 64; ++k) {
      const Vec2 p = edge_point(e, k / 64.0);
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
  std::uniform_real_distribution<double> ux(lo.x(), hi.x()), uy(lo.y(), hi.y());
  const Vec2 g = ell_gradient(c.lambda, opposite(c.nu));
  double worst = std::numeric_limits<double>::infinity();
  int found = 0;
  while (found < n) {
    const Vec2 x(ux(rng), uy(rng));
    if (!domain.contains(x)) continue;
    ++found;
    worst = std::min(worst, to_int(c.mu) * g.dot(x - c.corner.xy) / (domain.diameter() * g.norm()));
  }
  return worst;
}

bool SimplicityReport::has_diagnostic(const std::string& needle) const {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [&](const std::string& d) { return d.find(needle) != std::string::npos; });
}

SimplicityReport check_lambda_simple(const PlanarDomain& domain, double lambda) {
  SimplicityReport rep;
  rep.lambda = lambda;
  rep.characteristic = characteristic_points(domain, lambda);
  const CharacteristicData& cd = rep.characteristic;
  const std::size_t n = domain.edge_count();

  rep.unique_extrema = true;
  for (int i = 0; i < 4; ++i) {
    if (!cd.unique[i]) {
      rep.unique_extrema = false;
      rep.diagnostics.push_back(std::string("non-unique extremum ") + extremum_name(static_cast<Extremum>(i)));
    }
  }
  for (const auto& [a, b] : cd.coincidences) {
    rep.unique_extrema = false;
    rep.diagnostics.push_back(std::string("coincident extrema ") + extremum_name(a) + " = " + extremum_name(b) + " at " +
                              fmt_point(cd[a].xy));
  }
  {
    const Vec2 gp = ell_gradient(lambda, Sign::plus), gm = ell_gradient(lambda, Sign::minus);
    if (std::abs(gp.dot(cd[Extremum::minus_max].xy - cd[Extremum::minus_min].xy)) <
        value_tolerance(domain, lambda, Sign::plus)) {
      rep.unique_extrema = false;
      rep.diagnostics.push_back("equal levels l+(x-max) = l+(x-min)");
    }
    if (std::abs(gm.dot(cd[Extremum::plus_max].xy - cd[Extremum::plus_min].xy)) <
        value_tolerance(domain, lambda, Sign::minus)) {
      rep.unique_extrema = false;
      rep.diagnostics.push_back("equal levels l-(x+max) = l-(x+min)");
    }
  }

  for (std::size_t v = 0; v < n; ++v) {
    if (!domain.is_corner(v)) continue;
    const auto match = matching_extrema(domain, cd, domain.vertices()[v]);
    bool has_plus = false, has_minus = false;
    for (Extremum e : match) {
      if (e == Extremum::plus_max || e == Extremum::plus_min) has_plus = true;
      else has_minus = true;
    }
    if (has_plus && has_minus) {
      rep.exotic_vertices.push_back(v);
      rep.diagnostics.push_back("exotic corner at " + fmt_point(domain.vertices()[v]) + ": extremum of both l+ and l-");
    }
  }

  rep.smooth_away_from_extrema = true;
  for (std::size_t v = 0; v < n; ++v) {
    if (domain.is_corner(v) && matching_extrema(domain, cd, domain.vertices()[v]).empty()) {
      rep.smooth_away_from_extrema = false;
      rep.diagnostics.push_back("non-characteristic vertex at " + fmt_point(domain.vertices()[v]));
    }
  }
  for (const auto& d : cd.degenerate_edges) {
    rep.smooth_away_from_extrema = false;
    rep.diagnostics.push_back("degenerate edge " + std::to_string(d.edge) + " parallel to l" + sign_name(d.sign) +
                              " level lines");
  }
  for (Sign s : {Sign::plus, Sign::minus}) {
    for (const auto& c : level_candidates(domain, lambda, s)) {
      if (c.at_vertex) continue;
      if (matching_extrema(domain, cd, c.point.xy).empty()) {
        rep.smooth_away_from_extrema = false;
        rep.diagnostics.push_back(std::string("critical point of l") + sign_name(s) + " at " + fmt_point(c.point.xy) +
                                  " is not a global extremum");
      }
    }
  }

  rep.nondegenerate_extrema = true;
  rep.straight_corners = true;
  for (int i = 0; i < 4; ++i) {
    const BoundaryPoint& p = cd.points[i];
    std::size_t v = n;
    for (std::size_t k = 0; k < n; ++k)
      if ((domain.vertices()[k] - p.xy).norm() < 1e-10 * domain.diameter()) v = k;
    if (v == n) continue;
    const Edge& before = domain.edges()[(v + n - 1) % n];
    const Edge& after = domain.edges()[v];
    if (domain.is_corner(v)) {
      if (!is_straight(before) || !is_straight(after)) {
        rep.straight_corners = false;
        rep.diagnostics.push_back("curved corner at " + fmt_point(p.xy));
      }
    } else if (is_straight(before) || is_straight(after)) {
      rep.nondegenerate_extrema = false;
      rep.diagnostics.push_back("degenerate smooth extremum at " + fmt_point(p.xy));
    }
  }
  rep.verdict = rep.unique_extrema && rep.smooth_away_from_extrema && rep.nondegenerate_extrema && rep.straight_corners;
  return rep;
}

}  // namespace wavetank
