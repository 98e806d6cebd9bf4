#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "doctest.h"
#include "wavetank/mesh.hpp"

using namespace wavetank;

namespace {

// Conformity, orientation, angle bound, boundary placement.
void check_invariants(const PlanarDomain& d, const TriMesh& m) {
  std::map<std::pair<int, int>, int> count;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    REQUIRE(m.triangle_area(t) > 0.0);
    const auto& tr = m.triangles[t];
    for (int i = 0; i < 3; ++i) {
      const int a = tr[std::size_t(i)], b = tr[std::size_t((i + 1) % 3)];
      count[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  std::set<std::pair<int, int>> bset;
  for (const auto& e : m.boundary_edges) bset.insert({std::min(e[0], e[1]), std::max(e[0], e[1])});
  for (const auto& [e, c] : count) {
    if (bset.count(e)) CHECK(c == 1);
    else CHECK(c == 2);
  }
  CHECK(m.min_angle_degrees() >= 20.0);
  double area = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) area += m.triangle_area(t);
  CHECK(area == doctest::Approx(d.signed_area()).epsilon(1e-2));
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    if (!m.boundary[v]) continue;
    CHECK((d.project(m.vertices[v]).xy - m.vertices[v]).norm() < 1e-12);
    CHECK((m.boundary_point[v].xy - m.vertices[v]).norm() < 1e-12);
  }
}

}  // namespace

TEST_CASE("unit square mesh") {
  const PlanarDomain sq = make_unit_square();
  const TriMesh m = triangulate(sq, 0.1);
  check_invariants(sq, m);
  CHECK(m.vertex_count() >= 80);
  CHECK(m.vertex_count() <= 400);
}

TEST_CASE("trapezoid corners are mesh vertices") {
  const PlanarDomain d = make_trapezoid(1.0, 1.0);
  const TriMesh m = triangulate(d, 0.05);
  check_invariants(d, m);
  for (const Vec2& c : d.vertices()) {
    bool found = false;
    for (const Vec2& v : m.vertices) found = found || v == c;
    CHECK(found);
  }
}

TEST_CASE("halving h quadruples the triangle count") {
  const PlanarDomain d = make_trapezoid(1.0, 1.0);
  const double n1 = double(triangulate(d, 0.08).triangles.size());
  const double n2 = double(triangulate(d, 0.04).triangles.size());
  CHECK(n2 / n1 > 2.0);
  CHECK(n2 / n1 < 6.0);
}

TEST_CASE("graded mesh near a corner") {
  const PlanarDomain d = make_trapezoid(1.0, 1.0);
  MeshOptions opt;
  opt.h = 0.05;
  opt.graded_points = {Vec2(2.0, 0.0)};
  opt.h_min = 1e-4;
  const TriMesh m = triangulate(d, opt);
  check_invariants(d, m);
  double closest = 1.0;
  for (const Vec2& v : m.vertices)
    if (v != Vec2(2.0, 0.0)) closest = std::min(closest, (v - Vec2(2.0, 0.0)).norm());
  CHECK(closest < 1e-3);
}

TEST_CASE("half disk chords") {
  const double pi = std::numbers::pi;
  const PlanarDomain d({StraightSegment{Vec2(-1, 0), Vec2(1, 0)}, CircularArc{Vec2(0, 0), 1.0, 0.0, pi}});
  const TriMesh m = triangulate(d, 0.05);
  check_invariants(d, m);
  for (const auto& e : m.boundary_edges) {
    const Vec2 mid = 0.5 * (m.vertices[std::size_t(e[0])] + m.vertices[std::size_t(e[1])]);
    CHECK((d.project(mid).xy - mid).norm() < 0.05 * 0.05);
  }
}

TEST_CASE("deterministic output") {
  const PlanarDomain d = make_tilted_square(std::numbers::pi / 16);
  const TriMesh a = triangulate(d, 0.07), b = triangulate(d, 0.07);
  REQUIRE(a.vertices.size() == b.vertices.size());
  for (std::size_t i = 0; i < a.vertices.size(); ++i) CHECK(a.vertices[i] == b.vertices[i]);
  CHECK(a.triangles == b.triangles);
}

TEST_CASE("point location") {
  const PlanarDomain d = make_unit_square();
  const TriMesh m = triangulate(d, 0.1);
  Eigen::Vector3d bary;
  const int t = locate(m, Vec2(0.33, 0.71), &bary);
  REQUIRE(t >= 0);
  const auto& tr = m.triangles[std::size_t(t)];
  const Vec2 x = bary[0] * m.vertices[std::size_t(tr[0])] + bary[1] * m.vertices[std::size_t(tr[1])] +
                 bary[2] * m.vertices[std::size_t(tr[2])];
  CHECK((x - Vec2(0.33, 0.71)).norm() < 1e-14);
  CHECK(locate(m, Vec2(1.5, 0.5)) == -1);
}

TEST_CASE("mesh size precondition") {
  CHECK_THROWS_AS(triangulate(make_unit_square(), 0.5), std::invalid_argument);
}
