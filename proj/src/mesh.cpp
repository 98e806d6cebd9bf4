#include "wavetank/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace wavetank {

namespace {

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

bool in_circle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const long double adx = a.x() - d.x(), ady = a.y() - d.y();
  const long double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const long double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const long double ad = adx * adx + ady * ady, bd = bdx * bdx + bdy * bdy, cd = cdx * cdx + cdy * cdy;
  const long double det = adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
  const long double scale = (std::abs(adx) + std::abs(ady) + std::abs(bdx) + std::abs(bdy) + std::abs(cdx) +
                             std::abs(cdy));
  return det > 1e-17L * scale * scale * scale * scale;
}

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 ab = b - a, ac = c - a;
  const double d = 2.0 * (ab.x() * ac.y() - ab.y() * ac.x());
  const double b2 = ab.squaredNorm(), c2 = ac.squaredNorm();
  return a + Vec2(ac.y() * b2 - ab.y() * c2, ab.x() * c2 - ac.x() * b2) / d;
}

double min_angle(const Vec2& a, const Vec2& b, const Vec2& c) {
  auto ang = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    const Vec2 u = q - p, v = r - p;
    return std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
  };
  return std::min({ang(a, b, c), ang(b, c, a), ang(c, a, b)}) * 180.0 / std::numbers::pi;
}

// Incremental Bowyer-Watson triangulation with adjacency.
class Delaunay {
 public:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> n;  // neighbour opposite v[i]
    bool alive = true;
  };

  std::vector<Vec2> pts;
  std::vector<Tri> tris;

  Delaunay(const Vec2& lo, const Vec2& hi) {
    const Vec2 c = 0.5 * (lo + hi);
    const double r = 20.0 * std::max((hi - lo).maxCoeff(), 1e-3);
    pts = {c + Vec2(-r, -r), c + Vec2(r, -r), c + Vec2(0.0, r)};
    tris.push_back({{0, 1, 2}, {-1, -1, -1}, true});
  }

  bool is_super(int v) const { return v < 3; }

  int locate(const Vec2& p) {
    int t = last_;
    if (t < 0 || t >= int(tris.size()) || !tris[std::size_t(t)].alive) t = any_alive();
    for (std::size_t steps = 0; steps < 4 * tris.size() + 10; ++steps) {
      const Tri& tr = tris[std::size_t(t)];
      int next = -1;
      for (int i = 0; i < 3; ++i) {
        const Vec2& a = pts[std::size_t(tr.v[(i + 1) % 3])];
        const Vec2& b = pts[std::size_t(tr.v[(i + 2) % 3])];
        if (orient(a, b, p) < 0 && tr.n[i] >= 0) {
          next = tr.n[i];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    // walking failed (degenerate cycle); fall back to a scan for the least-outside triangle
    int best = -1;
    double best_val = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < tris.size(); ++k) {
      const Tri& tr = tris[k];
      if (!tr.alive) continue;
      double worst = std::numeric_limits<double>::infinity();
      for (int i = 0; i < 3; ++i)
        worst = std::min(worst, orient(pts[std::size_t(tr.v[(i + 1) % 3])], pts[std::size_t(tr.v[(i + 2) % 3])], p));
      if (worst > best_val) {
        best_val = worst;
        best = int(k);
      }
    }
    if (best >= 0 && best_val > -1e-12) return best;
    throw MeshFailure("point location failed");
  }

  int insert(const Vec2& p) {
    const int t0 = locate(p);
    for (int v : tris[std::size_t(t0)].v)
      if ((pts[std::size_t(v)] - p).norm() < 1e-13) return -1;
    const int pi = int(pts.size());
    pts.push_back(p);
    std::vector<int> cavity{t0};
    std::vector<char> mark(tris.size(), 0);
    mark[std::size_t(t0)] = 1;
    for (std::size_t k = 0; k < cavity.size(); ++k) {
      const Tri& tr = tris[std::size_t(cavity[k])];
      for (int nb : tr.n) {
        if (nb < 0 || mark[std::size_t(nb)]) continue;
        const Tri& o = tris[std::size_t(nb)];
        if (in_circle(pts[std::size_t(o.v[0])], pts[std::size_t(o.v[1])], pts[std::size_t(o.v[2])], p)) {
          mark[std::size_t(nb)] = 1;
          cavity.push_back(nb);
        }
      }
    }
    // grow until every boundary edge is visible from p
    struct BEdge {
      int a, b, outside;
    };
    std::vector<BEdge> bd;
    for (int guard = 0;; ++guard) {
      bd.clear();
      int bad = -1;
      for (int t : cavity) {
        const Tri& tr = tris[std::size_t(t)];
        for (int i = 0; i < 3; ++i) {
          const int nb = tr.n[i];
          if (nb >= 0 && mark[std::size_t(nb)]) continue;
          const int a = tr.v[(i + 1) % 3], b = tr.v[(i + 2) % 3];
          if (orient(pts[std::size_t(a)], pts[std::size_t(b)], p) <= 0) {
            if (nb < 0) throw MeshFailure("point outside the bounding triangle");
            bad = nb;
          }
          bd.push_back({a, b, nb});
        }
      }
      if (bad < 0) break;
      if (guard > 1000) throw MeshFailure("cavity repair did not converge");
      mark[std::size_t(bad)] = 1;
      cavity.push_back(bad);
    }
    for (int t : cavity) tris[std::size_t(t)].alive = false;
    // new triangles (a, b, p); link via the shared edges (p, a) and (b, p)
    std::vector<int> created;
    created.reserve(bd.size());
    for (const BEdge& e : bd) {
      const int id = int(tris.size());
      tris.push_back({{e.a, e.b, pi}, {-1, -1, e.outside}, true});
      if (e.outside >= 0) {
        Tri& o = tris[std::size_t(e.outside)];
        for (int i = 0; i < 3; ++i)
          if (o.v[(i + 1) % 3] == e.b && o.v[(i + 2) % 3] == e.a) o.n[i] = id;
      }
      created.push_back(id);
    }
    std::vector<std::pair<int, int>> by_start;  // vertex a -> triangle
    for (int id : created) by_start.push_back({tris[std::size_t(id)].v[0], id});
    std::sort(by_start.begin(), by_start.end());
    for (int id : created) {
      Tri& t = tris[std::size_t(id)];
      // neighbour across edge (b, p) is the new triangle starting at b
      auto it = std::lower_bound(by_start.begin(), by_start.end(), std::make_pair(t.v[1], -1));
      if (it == by_start.end() || it->first != t.v[1]) throw MeshFailure("cavity boundary not closed");
      t.n[0] = it->second;
      tris[std::size_t(it->second)].n[1] = id;
    }
    last_ = created.empty() ? -1 : created.front();
    return pi;
  }

  // Triangle with directed edge a->b, or -1.
  int find_edge(int a, int b) const {
    for (int t : vertex_tris(a)) {
      const Tri& tr = tris[std::size_t(t)];
      for (int i = 0; i < 3; ++i)
        if (tr.v[i] == a && tr.v[(i + 1) % 3] == b) return t;
    }
    return -1;
  }

  std::vector<int> vertex_tris(int v) const {
    if (incident_.empty() || incident_stamp_ != tris.size()) rebuild_incident();
    return incident_[std::size_t(v)];
  }

 private:
  int last_ = 0;
  mutable std::vector<std::vector<int>> incident_;
  mutable std::size_t incident_stamp_ = 0;

  int any_alive() const {
    for (std::size_t k = tris.size(); k-- > 0;)
      if (tris[k].alive) return int(k);
    throw MeshFailure("empty triangulation");
  }

  void rebuild_incident() const {
    incident_.assign(pts.size(), {});
    for (std::size_t t = 0; t < tris.size(); ++t)
      if (tris[t].alive)
        for (int v : tris[t].v) incident_[std::size_t(v)].push_back(int(t));
    incident_stamp_ = tris.size();
  }
};

struct Segment {
  int a, b;
  std::size_t edge;
  double ta, tb;  // local parameters of a and b on the edge
};

class Mesher {
 public:
  Mesher(const PlanarDomain& d, const MeshOptions& opt)
      : dom_(d), opt_(opt), dt_(bbox_lo(d), bbox_hi(d)) {}

  TriMesh run() {
    sample_boundary();
    insert_lattice();
    refine();
    return extract();
  }

 private:
  const PlanarDomain& dom_;
  MeshOptions opt_;
  Delaunay dt_;
  std::vector<Segment> segs_;
  std::vector<char> is_boundary_;
  std::vector<BoundaryPoint> bpoint_;
  std::vector<char> is_corner_;

  static Vec2 bbox_lo(const PlanarDomain& d) {
    Vec2 lo = d.vertices()[0];
    for (int k = 0; k <= 256; ++k) lo = lo.cwiseMin(d.at_theta(k / 256.0).xy);
    return lo;
  }
  static Vec2 bbox_hi(const PlanarDomain& d) {
    Vec2 hi = d.vertices()[0];
    for (int k = 0; k <= 256; ++k) hi = hi.cwiseMax(d.at_theta(k / 256.0).xy);
    return hi;
  }

  double size_at(const Vec2& x) const {
    double s = opt_.h;
    for (const Vec2& g : opt_.graded_points) s = std::min(s, std::max(opt_.h_min, opt_.grading * (x - g).norm()));
    return s;
  }

  int add_point(const Vec2& p, bool boundary, const BoundaryPoint& bp, bool corner) {
    const int id = dt_.insert(p);
    if (id < 0) throw MeshFailure("duplicate mesh vertex");
    is_boundary_.resize(std::size_t(id) + 1, 0);
    bpoint_.resize(std::size_t(id) + 1);
    is_corner_.resize(std::size_t(id) + 1, 0);
    is_boundary_[std::size_t(id)] = boundary;
    bpoint_[std::size_t(id)] = bp;
    is_corner_[std::size_t(id)] = corner;
    return id;
  }

  // Edge parameters at spacing size_at, shrinking geometrically toward graded points.
  std::vector<double> edge_params(std::size_t e) const {
    const Edge& ed = dom_.edges()[e];
    const double len = edge_length(ed);
    double cap = opt_.h;
    if (const auto* arc = std::get_if<CircularArc>(&ed)) cap = std::min(cap, 0.9 * opt_.h * std::sqrt(8.0 * arc->radius));
    std::vector<double> ts{0.0};
    if (opt_.graded_points.empty()) {
      const int n = std::max(1, int(std::ceil(len / cap - 1e-9)));
      for (int k = 1; k <= n; ++k) ts.push_back(double(k) / n);
      return ts;
    }
    double t = 0.0;
    while (true) {
      const Vec2 x = edge_point(ed, t);
      double step = std::min(cap, size_at(x));
      // look ahead so the spacing does not overshoot a graded point
      const Vec2 y = edge_point(ed, std::min(1.0, t + step / len));
      step = std::min(step, std::max(size_at(y), 0.5 * step));
      t += step / len;
      if (t >= 1.0 - 0.3 * step / len) break;
      ts.push_back(t);
    }
    ts.push_back(1.0);
    // even out the last gap
    if (ts.size() > 2) {
      const double last = ts[ts.size() - 1] - ts[ts.size() - 2];
      const double prev = ts[ts.size() - 2] - ts[ts.size() - 3];
      if (last < 0.5 * prev) ts[ts.size() - 2] = ts[ts.size() - 3] + 0.5 * (1.0 - ts[ts.size() - 3]);
    }
    return ts;
  }

  void sample_boundary() {
    const std::size_t ne = dom_.edge_count();
    std::vector<int> vertex_id(ne, -1);
    for (std::size_t v = 0; v < ne; ++v)
      vertex_id[v] = add_point(dom_.vertices()[v], true, dom_.vertex_point(v), dom_.is_corner(v));
    for (std::size_t e = 0; e < ne; ++e) {
      const std::vector<double> ts = edge_params(e);
      int prev = vertex_id[e];
      for (std::size_t k = 1; k + 1 < ts.size(); ++k) {
        const BoundaryPoint bp = dom_.at_edge(e, ts[k]);
        const int id = add_point(bp.xy, true, bp, false);
        segs_.push_back({prev, id, e, ts[k - 1], ts[k]});
        prev = id;
      }
      segs_.push_back({prev, vertex_id[(e + 1) % ne], e, ts[ts.size() - 2], 1.0});
    }
  }

  double boundary_distance(const Vec2& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (const Segment& s : segs_) {
      const Vec2& a = dt_.pts[std::size_t(s.a)];
      const Vec2& b = dt_.pts[std::size_t(s.b)];
      const Vec2 ab = b - a;
      const double t = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
      d = std::min(d, (a + t * ab - x).norm());
    }
    return d;
  }

  bool inside_chords(const Vec2& x) const {
    bool in = false;
    for (const Segment& s : segs_) {
      const Vec2& p = dt_.pts[std::size_t(s.a)];
      const Vec2& q = dt_.pts[std::size_t(s.b)];
      if ((p.y() > x.y()) != (q.y() > x.y())) {
        const double xi = p.x() + (x.y() - p.y()) * (q.x() - p.x()) / (q.y() - p.y());
        if (xi > x.x()) in = !in;
      }
    }
    return in;
  }

  void insert_lattice() {
    const Vec2 lo = bbox_lo(dom_), hi = bbox_hi(dom_);
    const double h = opt_.h;
    const bool square = opt_.lattice == Lattice::square;
    const double dy = square ? h : h * std::sqrt(3.0) / 2.0;
    const int rows = int(std::floor((hi.y() - lo.y()) / dy));
    for (int row = 1; row <= rows; ++row) {
      const double y = lo.y() + row * dy;
      const double off = square ? 0.0 : ((row % 2) ? 0.5 * h : 0.0);
      // alternate direction so consecutive inserts stay close
      std::vector<double> xs;
      for (int i = 0; lo.x() + off + i * h < hi.x(); ++i) xs.push_back(lo.x() + off + i * h);
      if (row % 2) std::reverse(xs.begin(), xs.end());
      for (double x : xs) {
        const Vec2 p(x, y);
        if (size_at(p) < 0.999 * h) continue;
        if (!inside_chords(p)) continue;
        if (boundary_distance(p) < 0.6 * h) continue;
        add_point(p, false, BoundaryPoint{}, false);
      }
    }
  }

  bool encroached(const Segment& s, const Vec2& p) const {
    const Vec2& a = dt_.pts[std::size_t(s.a)];
    const Vec2& b = dt_.pts[std::size_t(s.b)];
    return (p - a).dot(p - b) < -1e-14 * (b - a).squaredNorm();
  }

  // Split point of a segment: concentric shells next to corners, else the midpoint.
  double split_param(const Segment& s) const {
    const double len = edge_length(dom_.edges()[s.edge]);
    const double seg_len = (s.tb - s.ta) * len;
    const bool ca = is_corner_[std::size_t(s.a)] != 0, cb = is_corner_[std::size_t(s.b)] != 0;
    if (ca != cb) {
      double r = std::pow(2.0, std::round(std::log2(0.5 * seg_len)));
      r = std::clamp(r, 0.25 * seg_len, 0.75 * seg_len);
      return ca ? s.ta + r / len : s.tb - r / len;
    }
    return 0.5 * (s.ta + s.tb);
  }

  void split_segment(std::size_t k) {
    const Segment s = segs_[k];
    const double tm = split_param(s);
    const BoundaryPoint bp = dom_.at_edge(s.edge, tm);
    BoundaryPoint fixed = bp;
    if (tm < 1.0) {
      fixed.edge_index = s.edge;
      fixed.local_param = tm;
    }
    const int id = add_point(edge_point(dom_.edges()[s.edge], tm), true, fixed, false);
    segs_[k] = {s.a, id, s.edge, s.ta, tm};
    segs_.insert(segs_.begin() + std::ptrdiff_t(k) + 1, Segment{id, s.b, s.edge, tm, s.tb});
  }

  bool segment_ok(const Segment& s) const {
    const int t1 = dt_.find_edge(s.a, s.b);
    const int t2 = dt_.find_edge(s.b, s.a);
    if (t1 < 0 && t2 < 0) return false;
    for (int t : {t1, t2}) {
      if (t < 0) continue;
      for (int v : dt_.tris[std::size_t(t)].v)
        if (v != s.a && v != s.b && !dt_.is_super(v) && encroached(s, dt_.pts[std::size_t(v)])) return false;
    }
    return true;
  }

  void refine() {
    const double min_deg = opt_.min_angle_degrees;
    const std::size_t max_points = 4'000'000;
    for (int sweep = 0; sweep < 200; ++sweep) {
      bool changed = false;
      for (std::size_t k = 0; k < segs_.size(); ++k) {
        int guard = 0;
        while (!segment_ok(segs_[k])) {
          split_segment(k);
          changed = true;
          if (++guard > 60) throw MeshFailure("segment recovery did not terminate");
        }
      }
      std::vector<std::pair<double, int>> bad;
      for (std::size_t t = 0; t < dt_.tris.size(); ++t) {
        const auto& tr = dt_.tris[t];
        if (!tr.alive) continue;
        if (dt_.is_super(tr.v[0]) || dt_.is_super(tr.v[1]) || dt_.is_super(tr.v[2])) continue;
        const Vec2 &a = dt_.pts[std::size_t(tr.v[0])], &b = dt_.pts[std::size_t(tr.v[1])], &c = dt_.pts[std::size_t(tr.v[2])];
        const Vec2 cen = (a + b + c) / 3.0;
        if (!inside_chords(cen)) continue;
        const double longest = std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
        const double ang = min_angle(a, b, c);
        if (ang < min_deg || longest > 1.5 * size_at(cen)) bad.push_back({ang, int(t)});
      }
      if (bad.empty() && !changed) return;
      std::sort(bad.begin(), bad.end());
      for (auto [ang, t] : bad) {
        (void)ang;
        const auto& tr = dt_.tris[std::size_t(t)];
        if (!tr.alive) continue;
        const Vec2 cc = circumcenter(dt_.pts[std::size_t(tr.v[0])], dt_.pts[std::size_t(tr.v[1])], dt_.pts[std::size_t(tr.v[2])]);
        std::vector<std::size_t> hit;
        for (std::size_t k = 0; k < segs_.size(); ++k)
          if (encroached(segs_[k], cc)) hit.push_back(k);
        if (!hit.empty()) {
          for (std::size_t j = hit.size(); j-- > 0;) split_segment(hit[j]);
        } else if (inside_chords(cc)) {
          dt_.insert(cc);
          is_boundary_.resize(dt_.pts.size(), 0);
          bpoint_.resize(dt_.pts.size());
          is_corner_.resize(dt_.pts.size(), 0);
        }
        changed = true;
        if (dt_.pts.size() > max_points) throw MeshFailure("refinement exceeded the vertex budget");
      }
    }
    throw MeshFailure("quality refinement did not converge");
  }

  TriMesh extract() {
    TriMesh m;
    m.h = opt_.h;
    std::vector<int> remap(dt_.pts.size(), -1);
    for (const auto& tr : dt_.tris) {
      if (!tr.alive) continue;
      if (dt_.is_super(tr.v[0]) || dt_.is_super(tr.v[1]) || dt_.is_super(tr.v[2])) continue;
      const Vec2 cen = (dt_.pts[std::size_t(tr.v[0])] + dt_.pts[std::size_t(tr.v[1])] + dt_.pts[std::size_t(tr.v[2])]) / 3.0;
      if (!inside_chords(cen)) continue;
      std::array<int, 3> t{};
      for (int i = 0; i < 3; ++i) {
        const int v = tr.v[i];
        if (remap[std::size_t(v)] < 0) {
          remap[std::size_t(v)] = int(m.vertices.size());
          m.vertices.push_back(dt_.pts[std::size_t(v)]);
          m.boundary.push_back(is_boundary_[std::size_t(v)] != 0);
          m.boundary_point.push_back(bpoint_[std::size_t(v)]);
        }
        t[std::size_t(i)] = remap[std::size_t(v)];
      }
      m.triangles.push_back(t);
    }
    // deterministic, geometric ordering of vertices is not required; keep insertion order
    for (const Segment& s : segs_) {
      if (remap[std::size_t(s.a)] < 0 || remap[std::size_t(s.b)] < 0) throw MeshFailure("boundary segment lost");
      m.boundary_edges.push_back({remap[std::size_t(s.a)], remap[std::size_t(s.b)]});
    }
    return m;
  }
};

}  // namespace

double TriMesh::triangle_area(std::size_t t) const {
  const auto& tr = triangles[t];
  return 0.5 * orient(vertices[std::size_t(tr[0])], vertices[std::size_t(tr[1])], vertices[std::size_t(tr[2])]);
}

double TriMesh::min_angle_degrees() const {
  double m = 180.0;
  for (const auto& tr : triangles)
    m = std::min(m, min_angle(vertices[std::size_t(tr[0])], vertices[std::size_t(tr[1])], vertices[std::size_t(tr[2])]));
  return m;
}

TriMesh triangulate(const PlanarDomain& domain, double h) {
  MeshOptions opt;
  opt.h = h;
  return triangulate(domain, opt);
}

TriMesh triangulate(const PlanarDomain& domain, const MeshOptions& opt) {
  if (!(opt.h > 0.0) || opt.h >= domain.diameter() / 10.0)
    throw std::invalid_argument("mesh size must satisfy 0 < h < diam/10");
  Mesher m(domain, opt);
  return m.run();
}

int locate(const TriMesh& mesh, const Vec2& x, Eigen::Vector3d* bary) {
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tr = mesh.triangles[t];
    const Vec2 &a = mesh.vertices[std::size_t(tr[0])], &b = mesh.vertices[std::size_t(tr[1])],
               &c = mesh.vertices[std::size_t(tr[2])];
    const double area = orient(a, b, c);
    const double l0 = orient(b, c, x) / area, l1 = orient(c, a, x) / area, l2 = orient(a, b, x) / area;
    const double tol = -1e-12;
    if (l0 >= tol && l1 >= tol && l2 >= tol) {
      if (bary) *bary = Eigen::Vector3d(l0, l1, l2);
      return int(t);
    }
  }
  return -1;
}

}  // namespace wavetank
