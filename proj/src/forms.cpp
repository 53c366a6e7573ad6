#include "tdaf/forms.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "tdaf/errors.hpp"
#include "block_assembly.hpp"

namespace tdaf {

void PhysicalParams::validate() const {
  const double values[] = {mu, gamma, nu, rho, lambda, sigma, kappa, xi.x(), xi.y()};
  for (double v : values) {
    if (!std::isfinite(v)) throw ParameterError("params: non-finite coefficient");
  }
  if (mu < 0 || gamma < 0 || nu < 0 || lambda < 0 || kappa < 0) {
    throw ParameterError("params: mu, gamma, nu, lambda and kappa must be nonnegative");
  }
  if (std::abs(xi.norm() - 1.0) > 1e-12) throw ParameterError("params: xi must be a unit vector");
}

QuadratureCache::QuadratureCache(const FeSpace& space, const QuadratureRule& rule)
    : tab_(tabulate(space.degree(), rule)) {
  const Mesh& mesh = space.mesh();
  const int nt = mesh.num_triangles();
  const int nq = tab_.n_points;
  jxw_.resize(static_cast<size_t>(nt) * nq);
  points_.resize(jxw_.size());
  grads_.resize(jxw_.size() * tab_.n_basis);
  for (int t = 0; t < nt; ++t) {
    const ElementMap map = element_map(mesh, t);
    if (!(map.det > 0.0)) throw StructuralError("forms: triangle " + std::to_string(t) + " is not positively oriented");
    for (int q = 0; q < nq; ++q) {
      jxw_[t * nq + q] = rule.weights[q] * map.det;
      points_[t * nq + q] = map.to_physical(rule.points[q]);
      for (int i = 0; i < tab_.n_basis; ++i) {
        grads_[(static_cast<size_t>(t) * nq + q) * tab_.n_basis + i] = map.inv_jacobian_t * tab_.dphi(q, i);
      }
    }
  }
}

namespace {

QuadratureRule assembly_rule() { return quadrature_rule(kAssemblyQuadratureDegree); }

enum class ScalarForm { Mass, Stiffness };

SparseMatrix assemble_scalar_form(const FeSpace& space, ScalarForm form) {
  const QuadratureCache qc(space, assembly_rule());
  const int nb = qc.n_basis();
  const int nc = space.components();
  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(space.mesh().num_triangles()) * nb * nb * nc);
  Eigen::MatrixXd local(nb, nb);
  for (int t = 0; t < space.mesh().num_triangles(); ++t) {
    local.setZero();
    for (int q = 0; q < qc.n_points(); ++q) {
      const double w = qc.jxw(t, q);
      for (int i = 0; i < nb; ++i) {
        for (int j = 0; j < nb; ++j) {
          local(i, j) += form == ScalarForm::Mass ? w * qc.phi(q, i) * qc.phi(q, j)
                                                  : w * qc.dphi(t, q, i).dot(qc.dphi(t, q, j));
        }
      }
    }
    const auto nodes = space.element_nodes(t);
    for (int c = 0; c < nc; ++c) {
      for (int i = 0; i < nb; ++i) {
        for (int j = 0; j < nb; ++j) trips.emplace_back(space.dof(nodes[i], c), space.dof(nodes[j], c), local(i, j));
      }
    }
  }
  return from_triplets(space.num_dofs(), space.num_dofs(), trips);
}

void require_vector_space(const FeSpace& s, const char* what) {
  if (s.components() != 2) throw StructuralError(std::string(what) + ": expected a vector space");
}

void require_scalar_space(const FeSpace& s, const char* what) {
  if (s.components() != 1) throw StructuralError(std::string(what) + ": expected a scalar space");
}

void require_same_mesh(const FeSpace& a, const FeSpace& b, const char* what) {
  if (&a.mesh() != &b.mesh()) throw StructuralError(std::string(what) + ": spaces live on different meshes");
}

void require_length(const Vector& v, const FeSpace& s, const char* what) {
  if (v.size() != s.num_dofs()) throw StructuralError(std::string(what) + ": coefficient vector has wrong length");
}

// Field value and physical gradient at one quadrature point; c selects the component.
struct PointValue {
  double value = 0.0;
  Vec2 grad = Vec2::Zero();
};

PointValue field_at(const FeSpace& space, const QuadratureCache& qc, const Vector& coeffs, int t, int q, int c) {
  PointValue out;
  const auto nodes = space.element_nodes(t);
  for (int i = 0; i < qc.n_basis(); ++i) {
    const double ci = coeffs[space.dof(nodes[i], c)];
    out.value += ci * qc.phi(q, i);
    out.grad += ci * qc.dphi(t, q, i);
  }
  return out;
}

Vec2 vector_at(const FeSpace& space, const QuadratureCache& qc, const Vector& coeffs, int t, int q) {
  const auto nodes = space.element_nodes(t);
  Vec2 out = Vec2::Zero();
  for (int i = 0; i < qc.n_basis(); ++i) {
    out.x() += coeffs[space.dof(nodes[i], 0)] * qc.phi(q, i);
    out.y() += coeffs[space.dof(nodes[i], 1)] * qc.phi(q, i);
  }
  return out;
}

}  // namespace

AssembledOperator assemble_mass(const FeSpace& space) {
  return {assemble_scalar_form(space, ScalarForm::Mass), &space, &space, OperatorKind::Mass};
}

AssembledOperator assemble_stiffness(const FeSpace& space) {
  return {assemble_scalar_form(space, ScalarForm::Stiffness), &space, &space, OperatorKind::Stiffness};
}

AssembledOperator assemble_divergence(const FeSpace& vel_space, const FeSpace& scalar_space) {
  require_vector_space(vel_space, "assemble_divergence");
  require_scalar_space(scalar_space, "assemble_divergence");
  require_same_mesh(vel_space, scalar_space, "assemble_divergence");
  const QuadratureRule rule = assembly_rule();
  const QuadratureCache qv(vel_space, rule);
  const QuadratureCache qs(scalar_space, rule);
  std::vector<Triplet> trips;
  Eigen::MatrixXd local(qs.n_basis(), 2 * qv.n_basis());
  for (int t = 0; t < vel_space.mesh().num_triangles(); ++t) {
    local.setZero();
    for (int q = 0; q < qv.n_points(); ++q) {
      const double w = qv.jxw(t, q);
      for (int i = 0; i < qs.n_basis(); ++i) {
        for (int j = 0; j < qv.n_basis(); ++j) {
          const Vec2& g = qv.dphi(t, q, j);
          local(i, 2 * j) += w * qs.phi(q, i) * g.x();
          local(i, 2 * j + 1) += w * qs.phi(q, i) * g.y();
        }
      }
    }
    const auto rows = scalar_space.element_nodes(t);
    const auto cols = vel_space.element_nodes(t);
    for (int i = 0; i < qs.n_basis(); ++i) {
      for (int j = 0; j < qv.n_basis(); ++j) {
        for (int b = 0; b < 2; ++b) trips.emplace_back(rows[i], vel_space.dof(cols[j], b), local(i, 2 * j + b));
      }
    }
  }
  return {from_triplets(scalar_space.num_dofs(), vel_space.num_dofs(), trips), &scalar_space, &vel_space,
          OperatorKind::Divergence};
}

AssembledOperator assemble_buoyancy(const FeSpace& vel_space, const FeSpace& temp_space, const Vec2& xi) {
  require_vector_space(vel_space, "assemble_buoyancy");
  require_scalar_space(temp_space, "assemble_buoyancy");
  require_same_mesh(vel_space, temp_space, "assemble_buoyancy");
  const QuadratureRule rule = assembly_rule();
  const QuadratureCache qv(vel_space, rule);
  const QuadratureCache qt(temp_space, rule);
  std::vector<Triplet> trips;
  Eigen::MatrixXd local(qv.n_basis(), qt.n_basis());
  for (int t = 0; t < vel_space.mesh().num_triangles(); ++t) {
    local.setZero();
    for (int q = 0; q < qv.n_points(); ++q) {
      for (int i = 0; i < qv.n_basis(); ++i) {
        for (int j = 0; j < qt.n_basis(); ++j) local(i, j) += qv.jxw(t, q) * qv.phi(q, i) * qt.phi(q, j);
      }
    }
    const auto rows = vel_space.element_nodes(t);
    const auto cols = temp_space.element_nodes(t);
    for (int i = 0; i < qv.n_basis(); ++i) {
      for (int j = 0; j < qt.n_basis(); ++j) {
        for (int a = 0; a < 2; ++a) trips.emplace_back(vel_space.dof(rows[i], a), cols[j], xi[a] * local(i, j));
      }
    }
  }
  return {from_triplets(vel_space.num_dofs(), temp_space.num_dofs(), trips), &vel_space, &temp_space,
          OperatorKind::Buoyancy};
}

Vector assemble_mean_vector(const FeSpace& scalar_space) {
  return assemble_load(scalar_space, ScalarFunction([](double, double) { return 1.0; }));
}

Vector assemble_load(const FeSpace& space, const ScalarFunction& f) {
  require_scalar_space(space, "assemble_load");
  const QuadratureCache qc(space, assembly_rule());
  Vector out = Vector::Zero(space.num_dofs());
  for (int t = 0; t < space.mesh().num_triangles(); ++t) {
    const auto nodes = space.element_nodes(t);
    for (int q = 0; q < qc.n_points(); ++q) {
      const Vec2& x = qc.point(t, q);
      const double fw = f(x.x(), x.y()) * qc.jxw(t, q);
      for (int i = 0; i < qc.n_basis(); ++i) out[nodes[i]] += fw * qc.phi(q, i);
    }
  }
  return out;
}

Vector assemble_load(const FeSpace& space, const VectorFunction& f) {
  require_vector_space(space, "assemble_load");
  const QuadratureCache qc(space, assembly_rule());
  Vector out = Vector::Zero(space.num_dofs());
  for (int t = 0; t < space.mesh().num_triangles(); ++t) {
    const auto nodes = space.element_nodes(t);
    for (int q = 0; q < qc.n_points(); ++q) {
      const Vec2& x = qc.point(t, q);
      const Vec2 fw = f(x.x(), x.y()) * qc.jxw(t, q);
      for (int i = 0; i < qc.n_basis(); ++i) {
        out[space.dof(nodes[i], 0)] += fw.x() * qc.phi(q, i);
        out[space.dof(nodes[i], 1)] += fw.y() * qc.phi(q, i);
      }
    }
  }
  return out;
}

double trilinear_b(const FeSpace& adv_space, const Vector& u, const FeSpace& space, const Vector& v, const Vector& w) {
  require_vector_space(adv_space, "trilinear_b");
  require_same_mesh(adv_space, space, "trilinear_b");
  require_length(u, adv_space, "trilinear_b");
  require_length(v, space, "trilinear_b");
  require_length(w, space, "trilinear_b");
  const QuadratureRule rule = assembly_rule();
  const QuadratureCache qa(adv_space, rule);
  const QuadratureCache qs(space, rule);
  double sum = 0.0;
  for (int t = 0; t < space.mesh().num_triangles(); ++t) {
    for (int q = 0; q < qs.n_points(); ++q) {
      const Vec2 uq = vector_at(adv_space, qa, u, t, q);
      double local = 0.0;
      for (int c = 0; c < space.components(); ++c) {
        const PointValue vq = field_at(space, qs, v, t, q, c);
        const PointValue wq = field_at(space, qs, w, t, q, c);
        local += 0.5 * uq.dot(vq.grad) * wq.value - 0.5 * uq.dot(wq.grad) * vq.value;
      }
      sum += qs.jxw(t, q) * local;
    }
  }
  return sum;
}

AssembledOperator assemble_convection_matrix(const FeSpace& adv_space, const Vector& u, const FeSpace& space) {
  require_vector_space(adv_space, "assemble_convection_matrix");
  require_same_mesh(adv_space, space, "assemble_convection_matrix");
  require_length(u, adv_space, "assemble_convection_matrix");
  const QuadratureRule rule = assembly_rule();
  const QuadratureCache qa(adv_space, rule);
  const QuadratureCache qs(space, rule);
  const int nb = qs.n_basis();
  std::vector<Triplet> trips;
  Eigen::MatrixXd local(nb, nb);
  for (int t = 0; t < space.mesh().num_triangles(); ++t) {
    local.setZero();
    for (int q = 0; q < qs.n_points(); ++q) {
      const Vec2 uq = qs.jxw(t, q) * vector_at(adv_space, qa, u, t, q);
      for (int i = 0; i < nb; ++i) {
        for (int j = 0; j < nb; ++j) {
          local(i, j) += 0.5 * uq.dot(qs.dphi(t, q, j)) * qs.phi(q, i) - 0.5 * uq.dot(qs.dphi(t, q, i)) * qs.phi(q, j);
        }
      }
    }
    const auto nodes = space.element_nodes(t);
    for (int c = 0; c < space.components(); ++c) {
      for (int i = 0; i < nb; ++i) {
        for (int j = 0; j < nb; ++j) trips.emplace_back(space.dof(nodes[i], c), space.dof(nodes[j], c), local(i, j));
      }
    }
  }
  return {from_triplets(space.num_dofs(), space.num_dofs(), trips), &space, &space, OperatorKind::ConvectionSkew};
}

SparseMatrix assemble_advector_matrix(const FeSpace& adv_space, const FeSpace& space, const Vector& v) {
  require_vector_space(adv_space, "assemble_advector_matrix");
  require_same_mesh(adv_space, space, "assemble_advector_matrix");
  require_length(v, space, "assemble_advector_matrix");
  const QuadratureRule rule = assembly_rule();
  const QuadratureCache qa(adv_space, rule);
  const QuadratureCache qs(space, rule);
  const int nc = space.components();
  std::vector<Triplet> trips;
  for (int t = 0; t < space.mesh().num_triangles(); ++t) {
    const auto rows = space.element_nodes(t);
    const auto cols = adv_space.element_nodes(t);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nc * qs.n_basis(), 2 * qa.n_basis());
    for (int q = 0; q < qs.n_points(); ++q) {
      const double jw = qs.jxw(t, q);
      for (int a = 0; a < nc; ++a) {
        const PointValue vq = field_at(space, qs, v, t, q, a);
        for (int i = 0; i < qs.n_basis(); ++i) {
          for (int j = 0; j < qa.n_basis(); ++j) {
            const double pj = qa.phi(q, j);
            for (int b = 0; b < 2; ++b) {
              local(nc * i + a, 2 * j + b) +=
                  jw * (0.5 * pj * vq.grad[b] * qs.phi(q, i) - 0.5 * pj * qs.dphi(t, q, i)[b] * vq.value);
            }
          }
        }
      }
    }
    for (int i = 0; i < qs.n_basis(); ++i) {
      for (int a = 0; a < nc; ++a) {
        for (int j = 0; j < qa.n_basis(); ++j) {
          for (int b = 0; b < 2; ++b) {
            trips.emplace_back(space.dof(rows[i], a), adv_space.dof(cols[j], b), local(nc * i + a, 2 * j + b));
          }
        }
      }
    }
  }
  return from_triplets(space.num_dofs(), adv_space.num_dofs(), trips);
}

CubicTerm cubic_term(const FeSpace& vel_space, const Vector& u) {
  require_vector_space(vel_space, "cubic_term");
  require_length(u, vel_space, "cubic_term");
  const QuadratureCache qc(vel_space, assembly_rule());
  const int nb = qc.n_basis();
  CubicTerm out;
  out.residual = Vector::Zero(vel_space.num_dofs());
  std::vector<Triplet> trips;
  Eigen::MatrixXd local(2 * nb, 2 * nb);
  for (int t = 0; t < vel_space.mesh().num_triangles(); ++t) {
    const auto nodes = vel_space.element_nodes(t);
    local.setZero();
    for (int q = 0; q < qc.n_points(); ++q) {
      const double jw = qc.jxw(t, q);
      const Vec2 uq = vector_at(vel_space, qc, u, t, q);
      const double s = uq.squaredNorm();
      Mat2 d = 2.0 * uq * uq.transpose();
      d.diagonal().array() += s;
      for (int i = 0; i < nb; ++i) {
        const double pi = qc.phi(q, i) * jw;
        out.residual[vel_space.dof(nodes[i], 0)] += s * uq.x() * pi;
        out.residual[vel_space.dof(nodes[i], 1)] += s * uq.y() * pi;
        for (int j = 0; j < nb; ++j) {
          const double pij = pi * qc.phi(q, j);
          for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) local(2 * i + a, 2 * j + b) += d(a, b) * pij;
          }
        }
      }
    }
    for (int i = 0; i < nb; ++i) {
      for (int a = 0; a < 2; ++a) {
        for (int j = 0; j < nb; ++j) {
          for (int b = 0; b < 2; ++b) {
            trips.emplace_back(vel_space.dof(nodes[i], a), vel_space.dof(nodes[j], b), local(2 * i + a, 2 * j + b));
          }
        }
      }
    }
  }
  out.jacobian = from_triplets(vel_space.num_dofs(), vel_space.num_dofs(), trips);
  return out;
}

MonotonicityGaps monotonicity_continuity_check(const Vec2& x, const Vec2& y) {
  const Vec2 fx = x.squaredNorm() * x;
  const Vec2 fy = y.squaredNorm() * y;
  const Vec2 d = x - y;
  MonotonicityGaps g;
  g.monotone_gap = (fx - fy).dot(d) - kMonotonicityConstant * d.squaredNorm() * d.squaredNorm();
  const double s = x.norm() + y.norm();
  g.continuity_gap = kContinuityConstant * s * s * d.norm() - (fx - fy).norm();
  return g;
}

Vector ritz_project(const FeSpace& space, const ScalarField& exact, const RitzOptions& options) {
  require_scalar_space(space, "ritz_project");
  const SparseMatrix k = assemble_stiffness(space).matrix;
  const int n = space.num_dofs();
  const bool with_mean = options.dirichlet_nodes.empty() && options.mean_constraint;
  const int size = n + (with_mean ? 1 : 0);

  const QuadratureCache qc(space, assembly_rule());
  Vector rhs = Vector::Zero(size);
  double integral = 0.0;
  for (int t = 0; t < space.mesh().num_triangles(); ++t) {
    const auto nodes = space.element_nodes(t);
    for (int q = 0; q < qc.n_points(); ++q) {
      const Vec2& x = qc.point(t, q);
      const Vec2 g = exact.grad(x.x(), x.y());
      integral += qc.jxw(t, q) * exact.value(x.x(), x.y());
      for (int i = 0; i < qc.n_basis(); ++i) rhs[nodes[i]] += qc.jxw(t, q) * g.dot(qc.dphi(t, q, i));
    }
  }

  std::vector<char> fixed(n, 0);
  for (int node : options.dirichlet_nodes) {
    if (node < 0 || node >= n) throw StructuralError("ritz_project: Dirichlet node out of range");
    fixed[node] = 1;
    const Vec2& x = space.node_coord(node);
    rhs[node] = exact.value(x.x(), x.y());
  }

  std::vector<Triplet> trips;
  detail::append_block(trips, k, 0, 0, 1.0, &fixed);
  for (int i = 0; i < n; ++i) {
    if (fixed[i]) trips.emplace_back(i, i, 1.0);
  }
  if (with_mean) {
    const Vector m = assemble_mean_vector(space);
    for (int i = 0; i < n; ++i) {
      trips.emplace_back(i, n, m[i]);
      trips.emplace_back(n, i, m[i]);
    }
    rhs[n] = integral;
  }
  const SparseMatrix a = from_triplets(size, size, trips);
  const DofBlock blocks[] = {{&space, 0}};
  auto [x, report] = lu_solve(a, rhs, elimination_order(space.mesh(), blocks, size));
  return x.head(n);
}

std::vector<int> elimination_order(const Mesh& mesh, std::span<const DofBlock> blocks, int size) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<Vec2> pts(size, Vec2(nan, nan));
  for (const DofBlock& b : blocks) {
    const FeSpace& sp = *b.space;
    if (b.offset < 0 || b.offset + sp.num_dofs() > size) throw StructuralError("elimination_order: block out of range");
    for (int node = 0; node < sp.num_nodes(); ++node) {
      for (int c = 0; c < sp.components(); ++c) pts[b.offset + sp.dof(node, c)] = sp.node_coord(node);
    }
  }
  return nested_dissection_order(pts, mesh.rect.xmin, mesh.rect.ymin, mesh.rect.width() / mesh.nx,
                                 mesh.rect.height() / mesh.ny, mesh.nx, mesh.ny);
}

namespace {

StokesProjection solve_stokes_system(const FeSpace& vel, const FeSpace& pres, double mu, double gamma,
                                     const Vector& rhs_u, const Vector& rhs_w, const Vector& trace_u,
                                     const Vector& trace_w, const StokesBoundary& boundary) {
  const SparseMatrix m = assemble_mass(vel).matrix;
  const SparseMatrix k = assemble_stiffness(vel).matrix;
  const SparseMatrix b = assemble_divergence(vel, pres).matrix;
  const Vector mean = assemble_mean_vector(pres);

  MixedLayout layout{vel.num_dofs(), pres.num_dofs(), 0};
  std::vector<char> fixed(vel.num_dofs(), 0);
  for (int d : boundary.dirichlet_dofs) {
    if (d < 0 || d >= vel.num_dofs()) throw StructuralError("stokes_type_project: Dirichlet DOF out of range");
    fixed[d] = 1;
  }

  std::vector<Triplet> trips;
  // Momentum-like rows.
  detail::append_block(trips, k, layout.u(), layout.u(), mu, &fixed);
  detail::append_block(trips, k, layout.u(), layout.w(), gamma, &fixed);
  detail::append_transposed_block(trips, b, layout.u(), layout.p(), -1.0, &fixed);
  // w rows.
  detail::append_block(trips, m, layout.w(), layout.w(), 1.0, &fixed);
  detail::append_transposed_block(trips, b, layout.w(), layout.phi(), -1.0, &fixed);
  detail::append_block(trips, k, layout.w(), layout.u(), -1.0, &fixed);
  // Divergence constraints with the mean multipliers.
  detail::append_block(trips, b, layout.phi(), layout.w(), 1.0, nullptr);
  detail::append_block(trips, b, layout.p(), layout.u(), 1.0, nullptr);
  for (int i = 0; i < pres.num_dofs(); ++i) {
    trips.emplace_back(layout.phi() + i, layout.s_phi(), mean[i]);
    trips.emplace_back(layout.s_phi(), layout.phi() + i, mean[i]);
    trips.emplace_back(layout.p() + i, layout.s_p(), mean[i]);
    trips.emplace_back(layout.s_p(), layout.p() + i, mean[i]);
  }

  Vector rhs = Vector::Zero(layout.size());
  rhs.segment(layout.u(), layout.n_vel) = rhs_u;
  rhs.segment(layout.w(), layout.n_vel) = rhs_w;
  for (int d = 0; d < vel.num_dofs(); ++d) {
    if (!fixed[d]) continue;
    trips.emplace_back(layout.u() + d, layout.u() + d, 1.0);
    trips.emplace_back(layout.w() + d, layout.w() + d, 1.0);
    rhs[layout.u() + d] = trace_u[d];
    rhs[layout.w() + d] = trace_w[d];
  }

  const SparseMatrix a = from_triplets(layout.size(), layout.size(), trips);
  const DofBlock blocks[] = {{&vel, layout.u()}, {&vel, layout.w()}, {&pres, layout.phi()}, {&pres, layout.p()}};
  auto [x, report] = lu_solve(a, rhs, elimination_order(vel.mesh(), blocks, layout.size()));
  StokesProjection out;
  out.u = x.segment(layout.u(), layout.n_vel);
  out.w = x.segment(layout.w(), layout.n_vel);
  out.phi = x.segment(layout.phi(), layout.n_pres);
  out.p = x.segment(layout.p(), layout.n_pres);
  return out;
}

}  // namespace

StokesProjection stokes_type_project(const FeSpace& vel_space, const FeSpace& pres_space, double mu, double gamma,
                                     const VectorField& u, const VectorField& w, const ScalarField& phi,
                                     const ScalarField& p, const StokesBoundary& boundary) {
  require_vector_space(vel_space, "stokes_type_project");
  require_scalar_space(pres_space, "stokes_type_project");
  require_same_mesh(vel_space, pres_space, "stokes_type_project");
  const QuadratureCache qc(vel_space, assembly_rule());
  Vector rhs_u = Vector::Zero(vel_space.num_dofs());
  Vector rhs_w = Vector::Zero(vel_space.num_dofs());
  for (int t = 0; t < vel_space.mesh().num_triangles(); ++t) {
    const auto nodes = vel_space.element_nodes(t);
    for (int q = 0; q < qc.n_points(); ++q) {
      const Vec2& x = qc.point(t, q);
      const double jw = qc.jxw(t, q);
      const Mat2 gu = u.grad(x.x(), x.y());
      const Mat2 gw = w.grad(x.x(), x.y());
      const Vec2 wv = w.value(x.x(), x.y());
      const double pv = p.value(x.x(), x.y());
      const double phiv = phi.value(x.x(), x.y());
      for (int i = 0; i < qc.n_basis(); ++i) {
        const Vec2& g = qc.dphi(t, q, i);
        const double s = qc.phi(q, i);
        for (int a = 0; a < 2; ++a) {
          const double gua = gu.row(a).dot(g);
          rhs_u[vel_space.dof(nodes[i], a)] += jw * (mu * gua + gamma * gw.row(a).dot(g) - pv * g[a]);
          rhs_w[vel_space.dof(nodes[i], a)] += jw * (wv[a] * s - phiv * g[a] - gua);
        }
      }
    }
  }
  const Vector trace_u = interpolate(vel_space, u.value);
  const Vector trace_w = interpolate(vel_space, w.value);
  return solve_stokes_system(vel_space, pres_space, mu, gamma, rhs_u, rhs_w, trace_u, trace_w, boundary);
}

StokesProjection stokes_type_project(const FeSpace& vel_space, const FeSpace& pres_space, double mu, double gamma,
                                     const StokesProjection& source, const StokesBoundary& boundary) {
  require_vector_space(vel_space, "stokes_type_project");
  require_scalar_space(pres_space, "stokes_type_project");
  require_length(source.u, vel_space, "stokes_type_project");
  require_length(source.w, vel_space, "stokes_type_project");
  require_length(source.phi, pres_space, "stokes_type_project");
  require_length(source.p, pres_space, "stokes_type_project");
  const SparseMatrix m = assemble_mass(vel_space).matrix;
  const SparseMatrix k = assemble_stiffness(vel_space).matrix;
  const SparseMatrix b = assemble_divergence(vel_space, pres_space).matrix;
  const Vector rhs_u = mu * (k * source.u) + gamma * (k * source.w) - b.transpose() * source.p;
  const Vector rhs_w = m * source.w - b.transpose() * source.phi - k * source.u;
  return solve_stokes_system(vel_space, pres_space, mu, gamma, rhs_u, rhs_w, source.u, source.w, boundary);
}

namespace {

double scalar_error(const FeSpace& space, const Vector& coeffs, const ScalarFunction& value,
                    const std::function<Vec2(double, double)>* grad, bool remove_mean) {
  require_scalar_space(space, "error norm");
  require_length(coeffs, space, "error norm");
  const QuadratureCache qc(space, assembly_rule());
  const int nt = space.mesh().num_triangles();
  double shift = 0.0;
  if (remove_mean) {
    double integral = 0.0, area = 0.0;
    for (int t = 0; t < nt; ++t) {
      for (int q = 0; q < qc.n_points(); ++q) {
        const Vec2& x = qc.point(t, q);
        integral += qc.jxw(t, q) * (field_at(space, qc, coeffs, t, q, 0).value - value(x.x(), x.y()));
        area += qc.jxw(t, q);
      }
    }
    shift = integral / area;
  }
  double sum = 0.0;
  for (int t = 0; t < nt; ++t) {
    for (int q = 0; q < qc.n_points(); ++q) {
      const Vec2& x = qc.point(t, q);
      const PointValue fh = field_at(space, qc, coeffs, t, q, 0);
      const double e = fh.value - shift - value(x.x(), x.y());
      double local = e * e;
      if (grad) local += (fh.grad - (*grad)(x.x(), x.y())).squaredNorm();
      sum += qc.jxw(t, q) * local;
    }
  }
  return std::sqrt(sum);
}

double vector_error(const FeSpace& space, const Vector& coeffs, const VectorFunction& value,
                    const std::function<Mat2(double, double)>* grad) {
  require_vector_space(space, "error norm");
  require_length(coeffs, space, "error norm");
  const QuadratureCache qc(space, assembly_rule());
  double sum = 0.0;
  for (int t = 0; t < space.mesh().num_triangles(); ++t) {
    for (int q = 0; q < qc.n_points(); ++q) {
      const Vec2& x = qc.point(t, q);
      const Vec2 ex = value(x.x(), x.y());
      Mat2 gex = Mat2::Zero();
      if (grad) gex = (*grad)(x.x(), x.y());
      double local = 0.0;
      for (int a = 0; a < 2; ++a) {
        const PointValue fh = field_at(space, qc, coeffs, t, q, a);
        local += (fh.value - ex[a]) * (fh.value - ex[a]);
        if (grad) local += (fh.grad - gex.row(a).transpose()).squaredNorm();
      }
      sum += qc.jxw(t, q) * local;
    }
  }
  return std::sqrt(sum);
}

}  // namespace

double l2_error(const FeSpace& space, const Vector& coeffs, const ScalarFunction& exact, bool remove_mean) {
  return scalar_error(space, coeffs, exact, nullptr, remove_mean);
}

double l2_error(const FeSpace& space, const Vector& coeffs, const VectorFunction& exact) {
  return vector_error(space, coeffs, exact, nullptr);
}

double h1_error(const FeSpace& space, const Vector& coeffs, const ScalarField& exact, bool remove_mean) {
  return scalar_error(space, coeffs, exact.value, &exact.grad, remove_mean);
}

double h1_error(const FeSpace& space, const Vector& coeffs, const VectorField& exact) {
  return vector_error(space, coeffs, exact.value, &exact.grad);
}

}  // namespace tdaf
