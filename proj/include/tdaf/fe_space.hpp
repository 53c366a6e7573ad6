#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "tdaf/mesh.hpp"

namespace tdaf {

using Vector = Eigen::VectorXd;

/// Point in the reference triangle {(xi, eta) : xi, eta >= 0, xi + eta <= 1}.
/// Barycentrics are l0 = 1 - xi - eta, l1 = xi, l2 = eta.
struct RefPoint {
  double xi = 0.0;
  double eta = 0.0;
};

/// Values and reference gradients of all local basis functions at one point.
/// Degree 1 fills the first 3 slots; degree 2 fills all 6 (vertex functions
/// then the edge functions of edges (1,2), (2,0), (0,1)).
struct BasisEval {
  int count = 0;
  std::array<double, 6> value{};
  std::array<Vec2, 6> grad{};
};

BasisEval eval_basis(int degree, RefPoint p);

struct QuadratureRule {
  int degree = 0;
  std::vector<RefPoint> points;
  /// Sum to 1/2, the reference triangle area.
  std::vector<double> weights;

  int size() const { return static_cast<int>(weights.size()); }
};

/// Fully symmetric rule with positive weights exact to at least
/// `target_degree` (1..10). Throws ConfigError otherwise.
QuadratureRule quadrature_rule(int target_degree);

/// Quadrature degree used by every assembly routine. Integrates the cubic
/// term |u|^2 u . v exactly for P2 fields.
inline constexpr int kAssemblyQuadratureDegree = 8;

/// Affine map from the reference triangle.
struct ElementMap {
  Vec2 origin;
  Mat2 jacobian;
  /// Transforms reference gradients into physical gradients.
  Mat2 inv_jacobian_t;
  double det = 0.0;

  Vec2 to_physical(RefPoint p) const { return origin + jacobian * Vec2(p.xi, p.eta); }
};

ElementMap element_map(const Mesh& mesh, int triangle);

/// Reference basis values and gradients tabulated at quadrature points.
struct Tabulation {
  int n_basis = 0;
  int n_points = 0;
  std::vector<double> value;   // [q * n_basis + i]
  std::vector<Vec2> ref_grad;  // [q * n_basis + i]

  double phi(int q, int i) const { return value[q * n_basis + i]; }
  const Vec2& dphi(int q, int i) const { return ref_grad[q * n_basis + i]; }
};

Tabulation tabulate(int degree, const QuadratureRule& rule);

/// Continuous Lagrange space of degree 1 or 2 with 1 or 2 components.
///
/// Nodes are numbered vertices first, then (degree 2) edge midpoints in the
/// mesh's edge order. Vector DOFs interleave components per node:
/// dof = node * components + component.
class FeSpace {
 public:
  FeSpace(std::shared_ptr<const Mesh> mesh, int degree, int components);

  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }
  int components() const { return components_; }
  int nodes_per_element() const { return degree_ == 1 ? 3 : 6; }
  int num_nodes() const { return static_cast<int>(node_coords_.size()); }
  int num_dofs() const { return num_nodes() * components_; }

  std::span<const int> element_nodes(int triangle) const {
    return {element_nodes_.data() + static_cast<size_t>(triangle) * nodes_per_element(),
            static_cast<size_t>(nodes_per_element())};
  }
  int dof(int node, int component) const { return node * components_ + component; }
  const Vec2& node_coord(int node) const { return node_coords_[node]; }
  const std::vector<Vec2>& node_coords() const { return node_coords_; }

  /// Nodes lying on boundary edges whose tag satisfies `pred`, ascending.
  std::vector<int> boundary_nodes(const std::function<bool(BoundaryTag)>& pred) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  int degree_;
  int components_;
  std::vector<int> element_nodes_;
  std::vector<Vec2> node_coords_;
};

FeSpace build_dof_map(std::shared_ptr<const Mesh> mesh, int degree, int components);

using ScalarFunction = std::function<double(double x, double y)>;
using VectorFunction = std::function<Vec2(double x, double y)>;

/// Nodal interpolation; coefficient i is f at DOF coordinate i.
Vector interpolate(const FeSpace& space, const ScalarFunction& f);
Vector interpolate(const FeSpace& space, const VectorFunction& f);

/// Value (and physical gradient) of a finite element field at a point of a
/// given triangle. Used by error norms and tests.
double evaluate_scalar(const FeSpace& space, const Vector& coeffs, int triangle, RefPoint p);

}  // namespace tdaf
