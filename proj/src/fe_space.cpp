#include "tdaf/fe_space.hpp"

#include <algorithm>
#include <string>

#include <Eigen/LU>

#include "tdaf/errors.hpp"

namespace tdaf {

namespace {

struct RulePoint {
  double xi;
  double eta;
  double weight;
};

#include "quadrature_tables.inc"

template <size_t N>
QuadratureRule make_rule(int degree, const RulePoint (&table)[N]) {
  QuadratureRule rule;
  rule.degree = degree;
  rule.points.reserve(N);
  rule.weights.reserve(N);
  for (const RulePoint& p : table) {
    rule.points.push_back({p.xi, p.eta});
    rule.weights.push_back(p.weight);
  }
  return rule;
}

}  // namespace

BasisEval eval_basis(int degree, RefPoint p) {
  const double l[3] = {1.0 - p.xi - p.eta, p.xi, p.eta};
  const Vec2 dl[3] = {Vec2(-1.0, -1.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};

  BasisEval out;
  if (degree == 1) {
    out.count = 3;
    for (int i = 0; i < 3; ++i) {
      out.value[i] = l[i];
      out.grad[i] = dl[i];
    }
    return out;
  }
  if (degree != 2) throw ConfigError("fe_space: unsupported degree " + std::to_string(degree));

  out.count = 6;
  for (int i = 0; i < 3; ++i) {
    out.value[i] = l[i] * (2.0 * l[i] - 1.0);
    out.grad[i] = (4.0 * l[i] - 1.0) * dl[i];
  }
  for (int k = 0; k < 3; ++k) {
    const int i = (k + 1) % 3;
    const int j = (k + 2) % 3;
    out.value[3 + k] = 4.0 * l[i] * l[j];
    out.grad[3 + k] = 4.0 * (l[i] * dl[j] + l[j] * dl[i]);
  }
  return out;
}

QuadratureRule quadrature_rule(int target_degree) {
  switch (target_degree) {
    case 1: return make_rule(1, kDegree1);
    case 2: return make_rule(2, kDegree2);
    case 3: return make_rule(3, kDegree3);
    case 4: return make_rule(4, kDegree4);
    case 5: return make_rule(5, kDegree5);
    case 6: return make_rule(6, kDegree6);
    case 7: return make_rule(7, kDegree7);
    case 8: return make_rule(8, kDegree8);
    case 9: return make_rule(9, kDegree9);
    case 10: return make_rule(10, kDegree10);
    default:
      throw ConfigError("quadrature: no rule for degree " + std::to_string(target_degree) + " (supported 1..10)");
  }
}

ElementMap element_map(const Mesh& mesh, int triangle) {
  const auto& t = mesh.triangles[triangle];
  ElementMap m;
  m.origin = mesh.vertices[t[0]];
  m.jacobian.col(0) = mesh.vertices[t[1]] - m.origin;
  m.jacobian.col(1) = mesh.vertices[t[2]] - m.origin;
  m.det = m.jacobian.determinant();
  m.inv_jacobian_t = m.jacobian.inverse().transpose();
  return m;
}

Tabulation tabulate(int degree, const QuadratureRule& rule) {
  Tabulation tab;
  tab.n_basis = degree == 1 ? 3 : 6;
  tab.n_points = rule.size();
  tab.value.resize(static_cast<size_t>(tab.n_basis) * tab.n_points);
  tab.ref_grad.resize(tab.value.size());
  for (int q = 0; q < tab.n_points; ++q) {
    const BasisEval b = eval_basis(degree, rule.points[q]);
    for (int i = 0; i < tab.n_basis; ++i) {
      tab.value[q * tab.n_basis + i] = b.value[i];
      tab.ref_grad[q * tab.n_basis + i] = b.grad[i];
    }
  }
  return tab;
}

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, int degree, int components)
    : mesh_(std::move(mesh)), degree_(degree), components_(components) {
  if (!mesh_) throw StructuralError("fe_space: null mesh");
  if (degree_ != 1 && degree_ != 2) throw ConfigError("fe_space: degree must be 1 or 2");
  if (components_ != 1 && components_ != 2) throw ConfigError("fe_space: components must be 1 or 2");

  const Mesh& m = *mesh_;
  node_coords_ = m.vertices;
  if (degree_ == 2) {
    node_coords_.reserve(m.vertices.size() + m.edges.size());
    for (const Edge& e : m.edges) {
      node_coords_.push_back(0.5 * (m.vertices[e.vertices[0]] + m.vertices[e.vertices[1]]));
    }
  }

  const int npe = nodes_per_element();
  element_nodes_.resize(static_cast<size_t>(m.num_triangles()) * npe);
  for (int t = 0; t < m.num_triangles(); ++t) {
    int* out = element_nodes_.data() + static_cast<size_t>(t) * npe;
    for (int i = 0; i < 3; ++i) out[i] = m.triangles[t][i];
    if (degree_ == 2) {
      for (int k = 0; k < 3; ++k) out[3 + k] = m.num_vertices() + m.triangle_edges[t][k];
    }
  }
}

std::vector<int> FeSpace::boundary_nodes(const std::function<bool(BoundaryTag)>& pred) const {
  const Mesh& m = *mesh_;
  std::vector<int> nodes;
  for (const BoundaryEdge& be : m.boundary_edges) {
    if (!be.tag) throw StructuralError("fe_space: boundary edge without tag");
    if (!pred(*be.tag)) continue;
    const Edge& e = m.edges[be.edge];
    nodes.push_back(e.vertices[0]);
    nodes.push_back(e.vertices[1]);
    if (degree_ == 2) nodes.push_back(m.num_vertices() + be.edge);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

FeSpace build_dof_map(std::shared_ptr<const Mesh> mesh, int degree, int components) {
  return FeSpace(std::move(mesh), degree, components);
}

Vector interpolate(const FeSpace& space, const ScalarFunction& f) {
  if (space.components() != 1) throw StructuralError("interpolate: scalar function on vector space");
  Vector c(space.num_dofs());
  for (int n = 0; n < space.num_nodes(); ++n) {
    const Vec2& p = space.node_coord(n);
    c[n] = f(p.x(), p.y());
  }
  return c;
}

Vector interpolate(const FeSpace& space, const VectorFunction& f) {
  if (space.components() != 2) throw StructuralError("interpolate: vector function on scalar space");
  Vector c(space.num_dofs());
  for (int n = 0; n < space.num_nodes(); ++n) {
    const Vec2& p = space.node_coord(n);
    const Vec2 v = f(p.x(), p.y());
    c[space.dof(n, 0)] = v.x();
    c[space.dof(n, 1)] = v.y();
  }
  return c;
}

double evaluate_scalar(const FeSpace& space, const Vector& coeffs, int triangle, RefPoint p) {
  const BasisEval b = eval_basis(space.degree(), p);
  const auto nodes = space.element_nodes(triangle);
  double v = 0.0;
  for (int i = 0; i < b.count; ++i) v += b.value[i] * coeffs[space.dof(nodes[i], 0)];
  return v;
}

}  // namespace tdaf
