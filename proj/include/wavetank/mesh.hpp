#pragma once

#include <array>
#include <vector>

#include "wavetank/geometry.hpp"

namespace wavetank {

struct TriMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<bool> boundary;
  std::vector<BoundaryPoint> boundary_point;  // meaningful where boundary[i]
  // Boundary edges with the domain on the left.
  std::vector<std::array<int, 2>> boundary_edges;
  double h = 0.0;

  std::size_t vertex_count() const { return vertices.size(); }
  double triangle_area(std::size_t t) const;
  double min_angle_degrees() const;
};

enum class Lattice { triangular, square };

struct MeshOptions {
  double h = 0.05;
  // Vertices toward which the size shrinks like grading * distance.
  std::vector<Vec2> graded_points;
  double grading = 0.3;
  double h_min = 1e-4;
  double min_angle_degrees = 20.0;
  // Interior seed points; square aligns element edges with the axes.
  Lattice lattice = Lattice::triangular;
};

TriMesh triangulate(const PlanarDomain& domain, double h);
TriMesh triangulate(const PlanarDomain& domain, const MeshOptions& opt);

// Barycentric point location; returns triangle index or -1.
int locate(const TriMesh& mesh, const Vec2& x, Eigen::Vector3d* bary = nullptr);

}  // namespace wavetank
