#include "tdaf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "tdaf/errors.hpp"

namespace tdaf {

double Mesh::h() const { return std::max(rect.width() / nx, rect.height() / ny); }

double Mesh::signed_area(int triangle) const {
  const auto& t = triangles[triangle];
  const Vec2 a = vertices[t[1]] - vertices[t[0]];
  const Vec2 b = vertices[t[2]] - vertices[t[0]];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

Mesh build_structured_mesh(int nx, int ny, const Rect& rect) {
  if (nx < 1 || ny < 1) {
    throw ConfigError("mesh: nx and ny must be >= 1 (got " + std::to_string(nx) + ", " +
                      std::to_string(ny) + ")");
  }
  if (!(rect.width() > 0.0) || !(rect.height() > 0.0)) {
    throw ConfigError("mesh: degenerate rectangle");
  }

  Mesh mesh;
  mesh.rect = rect;
  mesh.nx = nx;
  mesh.ny = ny;

  mesh.vertices.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    // Exact end coordinates so boundary detection does not depend on rounding.
    const double y = j == ny ? rect.ymax : rect.ymin + rect.height() * j / ny;
    for (int i = 0; i <= nx; ++i) {
      const double x = i == nx ? rect.xmax : rect.xmin + rect.width() * i / nx;
      mesh.vertices.emplace_back(x, y);
    }
  }

  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  mesh.triangles.reserve(2 * static_cast<size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }

  std::map<std::pair<int, int>, int> edge_index;
  mesh.triangle_edges.resize(mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[(k + 1) % 3];
      const int b = tri[(k + 2) % 3];
      const auto key = std::minmax(a, b);
      auto [it, inserted] = edge_index.try_emplace({key.first, key.second}, mesh.num_edges());
      if (inserted) {
        mesh.edges.push_back(Edge{{key.first, key.second}, {t, -1}});
      } else {
        Edge& e = mesh.edges[it->second];
        if (e.triangles[1] != -1) throw StructuralError("mesh: edge shared by more than two triangles");
        e.triangles[1] = t;
      }
      mesh.triangle_edges[t][k] = it->second;
    }
  }

  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.edges[e].triangles[1] == -1) mesh.boundary_edges.push_back(BoundaryEdge{e, std::nullopt});
  }
  return mesh;
}

Mesh tag_boundary(Mesh mesh, TaggingScheme scheme) {
  const Rect& r = mesh.rect;
  const double tol = 1e-12 * std::max(r.width(), r.height());
  for (BoundaryEdge& be : mesh.boundary_edges) {
    const Edge& e = mesh.edges[be.edge];
    const Vec2 a = mesh.vertices[e.vertices[0]];
    const Vec2 b = mesh.vertices[e.vertices[1]];
    auto on = [tol](double p, double q, double side) {
      return std::abs(p - side) <= tol && std::abs(q - side) <= tol;
    };
    std::optional<BoundaryTag> side;
    if (on(a.x(), b.x(), r.xmin)) {
      side = BoundaryTag::Gamma1Left;
    } else if (on(a.x(), b.x(), r.xmax)) {
      side = BoundaryTag::Gamma1Right;
    } else if (on(a.y(), b.y(), r.ymax)) {
      side = BoundaryTag::Gamma2Top;
    } else if (on(a.y(), b.y(), r.ymin)) {
      side = BoundaryTag::Gamma2Bottom;
    }
    if (!side) throw StructuralError("mesh: boundary edge " + std::to_string(be.edge) + " is not on the rectangle");
    be.tag = scheme == TaggingScheme::AllDirichlet ? BoundaryTag::AllDirichlet : *side;
  }
  return mesh;
}

}  // namespace tdaf
