#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace tdaf {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

struct Rect {
  double xmin = 0.0;
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
};

/// Boundary families. Gamma1 sides carry Dirichlet temperature, Gamma2 sides
/// are adiabatic. AllDirichlet marks every side as essential.
enum class BoundaryTag { Gamma1Left, Gamma1Right, Gamma2Top, Gamma2Bottom, AllDirichlet };

enum class TaggingScheme { Cavity, AllDirichlet };

struct Edge {
  std::array<int, 2> vertices;
  /// Adjacent triangles; `triangles[1] == -1` on the boundary.
  std::array<int, 2> triangles{-1, -1};
};

struct BoundaryEdge {
  int edge = -1;
  std::optional<BoundaryTag> tag;
};

/// Conforming triangulation of an axis-aligned rectangle.
///
/// Local edge `k` of a triangle is the one opposite local vertex `k`, i.e.
/// (v1,v2), (v2,v0), (v0,v1). The P2 edge basis functions follow the same order.
struct Mesh {
  Rect rect;
  int nx = 0;
  int ny = 0;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Edge> edges;
  std::vector<std::array<int, 3>> triangle_edges;
  std::vector<BoundaryEdge> boundary_edges;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  /// Largest axis-aligned cell side.
  double h() const;
  double signed_area(int triangle) const;
};

/// `nx` x `ny` cells, each split along its lower-left to upper-right diagonal.
/// Boundary edges are collected but left untagged; see `tag_boundary`.
Mesh build_structured_mesh(int nx, int ny, const Rect& rect = {});

/// Assign a BoundaryTag to every boundary edge. Throws StructuralError when an
/// edge does not lie on a side of the rectangle.
Mesh tag_boundary(Mesh mesh, TaggingScheme scheme);

}  // namespace tdaf
