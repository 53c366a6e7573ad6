#include "tdaf/stepper.hpp"

#include <cmath>
#include <random>
#include <string>

#include "tdaf/errors.hpp"
#include "block_assembly.hpp"

namespace tdaf {

namespace {

std::vector<char> mask(int n, const std::vector<int>& idx) {
  std::vector<char> m(n, 0);
  for (int i : idx) m[i] = 1;
  return m;
}

}  // namespace

Problem::Problem(std::shared_ptr<const Mesh> mesh, ProblemSetup setup)
    : mesh_(std::move(mesh)),
      setup_(std::move(setup)),
      vel_(mesh_, 2, 2),
      pres_(mesh_, 1, 1),
      temp_(mesh_, 2, 1),
      p2_cache_(temp_, quadrature_rule(kAssemblyQuadratureDegree)) {
  setup_.params.validate();
  vel_mass_ = assemble_mass(vel_).matrix;
  vel_stiff_ = assemble_stiffness(vel_).matrix;
  div_ = assemble_divergence(vel_, pres_).matrix;
  buoy_ = assemble_buoyancy(vel_, temp_, setup_.params.xi).matrix;
  temp_mass_ = assemble_mass(temp_).matrix;
  temp_stiff_ = assemble_stiffness(temp_).matrix;
  pres_mean_ = assemble_mean_vector(pres_);

  for (int node : vel_.boundary_nodes([](BoundaryTag) { return true; })) {
    vel_dirichlet_.push_back(vel_.dof(node, 0));
    vel_dirichlet_.push_back(vel_.dof(node, 1));
  }
  if (setup_.temp_dirichlet) temp_dirichlet_ = temp_.boundary_nodes(setup_.temp_dirichlet);
  vel_fixed_ = mask(vel_.num_dofs(), vel_dirichlet_);
  temp_fixed_ = mask(temp_.num_dofs(), temp_dirichlet_);
}

namespace {

Vector vector_trace(const FeSpace& space, const std::vector<int>& dofs, const SpaceTimeVector& f, double t) {
  Vector out = Vector::Zero(space.num_dofs());
  if (!f) return out;
  for (int d : dofs) {
    const Vec2& x = space.node_coord(d / 2);
    out[d] = f(x.x(), x.y(), t)[d % 2];
  }
  return out;
}

}  // namespace

Vector Problem::u_trace(double t) const { return vector_trace(vel_, vel_dirichlet_, setup_.u_boundary, t); }
Vector Problem::w_trace(double t) const { return vector_trace(vel_, vel_dirichlet_, setup_.w_boundary, t); }

Vector Problem::temp_trace(double t) const {
  Vector out = Vector::Zero(temp_.num_dofs());
  if (!setup_.temp_boundary) return out;
  for (int n : temp_dirichlet_) {
    const Vec2& x = temp_.node_coord(n);
    out[n] = setup_.temp_boundary(x.x(), x.y(), t);
  }
  return out;
}

Vector Problem::momentum_load(double t) const {
  Vector out = Vector::Zero(vel_.num_dofs());
  if (!setup_.f) return out;
  const QuadratureCache& qc = p2_cache_;
  for (int e = 0; e < mesh_->num_triangles(); ++e) {
    const auto nodes = vel_.element_nodes(e);
    for (int q = 0; q < qc.n_points(); ++q) {
      const Vec2& x = qc.point(e, q);
      const Vec2 fw = setup_.f(x.x(), x.y(), t) * qc.jxw(e, q);
      for (int i = 0; i < qc.n_basis(); ++i) {
        out[vel_.dof(nodes[i], 0)] += fw.x() * qc.phi(q, i);
        out[vel_.dof(nodes[i], 1)] += fw.y() * qc.phi(q, i);
      }
    }
  }
  return out;
}

Vector Problem::temperature_load(double t) const {
  Vector out = Vector::Zero(temp_.num_dofs());
  if (!setup_.g) return out;
  const QuadratureCache& qc = p2_cache_;
  for (int e = 0; e < mesh_->num_triangles(); ++e) {
    const auto nodes = temp_.element_nodes(e);
    for (int q = 0; q < qc.n_points(); ++q) {
      const Vec2& x = qc.point(e, q);
      const double gw = setup_.g(x.x(), x.y(), t) * qc.jxw(e, q);
      for (int i = 0; i < qc.n_basis(); ++i) out[nodes[i]] += gw * qc.phi(q, i);
    }
  }
  return out;
}

StepWeights dln_weights(double theta, double t_prev, double t_curr, double k_n) {
  const double k_prev = t_curr - t_prev;
  const DlnCoefficients c = dln_coefficients(theta, step_variability(k_n, k_prev));
  StepWeights w;
  w.alpha = c.alpha;
  w.beta = c.beta;
  w.k_hat = weighted_step(theta, k_n, k_prev);
  w.t_next = t_curr + k_n;
  w.t_beta = combine(t_prev, t_curr, w.t_next, c.beta);
  return w;
}

StepWeights cn_weights(double t0, double k0) {
  if (!(k0 > 0.0)) throw ParameterError("bootstrap: k0 must be positive");
  StepWeights w;
  w.alpha = {0.0, -1.0, 1.0};
  w.beta = {0.0, 0.5, 0.5};
  w.k_hat = k0;
  w.t_next = t0 + k0;
  w.t_beta = t0 + 0.5 * k0;
  return w;
}

Vector pack_state(const Problem& problem, const State& s) {
  const MixedLayout l = problem.layout();
  if (s.u.size() != l.n_vel || s.w.size() != l.n_vel || s.phi.size() != l.n_pres || s.p.size() != l.n_pres ||
      s.T.size() != l.n_temp) {
    throw StructuralError("state: field lengths do not match the problem's spaces");
  }
  Vector x = Vector::Zero(l.size());
  x.segment(l.u(), l.n_vel) = s.u;
  x.segment(l.w(), l.n_vel) = s.w;
  x.segment(l.phi(), l.n_pres) = s.phi;
  x.segment(l.p(), l.n_pres) = s.p;
  x.segment(l.temp(), l.n_temp) = s.T;
  return x;
}

State unpack_state(const Problem& problem, const Vector& x, double t) {
  const MixedLayout l = problem.layout();
  if (x.size() != l.size()) throw StructuralError("state: packed vector has wrong length");
  State s;
  s.t = t;
  s.u = x.segment(l.u(), l.n_vel);
  s.w = x.segment(l.w(), l.n_vel);
  s.phi = x.segment(l.phi(), l.n_pres);
  s.p = x.segment(l.p(), l.n_pres);
  s.T = x.segment(l.temp(), l.n_temp);
  return s;
}

State zero_state(const Problem& problem, double t) {
  return unpack_state(problem, Vector::Zero(problem.layout().size()), t);
}

Stepper::Stepper(const Problem& problem, NewtonOptions options) : problem_(problem), options_(options) {
  const MixedLayout l = problem.layout();
  const DofBlock blocks[] = {{&problem.vel_space(), l.u()},
                             {&problem.vel_space(), l.w()},
                             {&problem.pres_space(), l.phi()},
                             {&problem.pres_space(), l.p()},
                             {&problem.temp_space(), l.temp()}};
  order_ = elimination_order(problem.mesh(), blocks, l.size());
}

const SparseMatrix& Stepper::linear_jacobian(const StepWeights& wts) {
  const double cm = wts.alpha[2] / wts.k_hat;
  const double b2 = wts.beta[2];
  if (cm == lin_key_mass_ && b2 == lin_key_beta_) return lin_jac_;

  const Problem& pb = problem_;
  const PhysicalParams& prm = pb.params();
  const MixedLayout l = pb.layout();
  const auto& vfix = pb.vel_fixed();
  const auto& tfix = pb.temp_fixed();
  std::vector<Triplet> trips;
  trips.reserve(4 * pb.vel_mass().nonZeros() + 4 * pb.vel_stiffness().nonZeros() + 6 * pb.divergence().nonZeros() +
                pb.buoyancy().nonZeros() + 2 * pb.temp_mass().nonZeros());

  // Momentum rows.
  detail::append_block(trips, pb.vel_mass(), l.u(), l.u(), cm + b2 * prm.rho, &vfix);
  detail::append_block(trips, pb.vel_stiffness(), l.u(), l.u(), b2 * prm.mu, &vfix);
  detail::append_block(trips, pb.vel_stiffness(), l.u(), l.w(), b2 * prm.gamma, &vfix);
  detail::append_transposed_block(trips, pb.divergence(), l.u(), l.p(), -b2, &vfix);
  detail::append_block(trips, pb.buoyancy(), l.u(), l.temp(), -b2 * prm.sigma, &vfix);
  // w rows.
  detail::append_block(trips, pb.vel_stiffness(), l.w(), l.u(), -1.0, &vfix);
  detail::append_block(trips, pb.vel_mass(), l.w(), l.w(), 1.0, &vfix);
  detail::append_transposed_block(trips, pb.divergence(), l.w(), l.phi(), -1.0, &vfix);
  for (int d = 0; d < l.n_vel; ++d) {
    if (!vfix[d]) continue;
    trips.emplace_back(l.u() + d, l.u() + d, 1.0);
    trips.emplace_back(l.w() + d, l.w() + d, 1.0);
  }
  // Constraints and zero-mean multipliers.
  detail::append_block(trips, pb.divergence(), l.phi(), l.w(), 1.0, nullptr);
  detail::append_block(trips, pb.divergence(), l.p(), l.u(), 1.0, nullptr);
  const Vector& m = pb.pres_mean();
  for (int i = 0; i < l.n_pres; ++i) {
    trips.emplace_back(l.phi() + i, l.s_phi(), m[i]);
    trips.emplace_back(l.s_phi(), l.phi() + i, m[i]);
    trips.emplace_back(l.p() + i, l.s_p(), m[i]);
    trips.emplace_back(l.s_p(), l.p() + i, m[i]);
  }
  // Temperature rows.
  detail::append_block(trips, pb.temp_mass(), l.temp(), l.temp(), cm, &tfix);
  detail::append_block(trips, pb.temp_stiffness(), l.temp(), l.temp(), b2 * prm.kappa, &tfix);
  for (int i = 0; i < l.n_temp; ++i) {
    if (tfix[i]) trips.emplace_back(l.temp() + i, l.temp() + i, 1.0);
  }

  lin_jac_ = from_triplets(l.size(), l.size(), trips);
  lin_key_mass_ = cm;
  lin_key_beta_ = b2;
  return lin_jac_;
}

Vector Stepper::residual(const State& prev, const State& curr, const StepWeights& wts, const Vector& x,
                         const Vector& f_load, const Vector& g_load, const Vector& u_bc, const Vector& w_bc,
                         const Vector& t_bc, SparseMatrix* jacobian) const {
  const Problem& pb = problem_;
  const PhysicalParams& prm = pb.params();
  const MixedLayout l = pb.layout();
  const auto& a = wts.alpha;
  const auto& b = wts.beta;

  const auto u = x.segment(l.u(), l.n_vel);
  const auto w = x.segment(l.w(), l.n_vel);
  const auto phi = x.segment(l.phi(), l.n_pres);
  const auto p = x.segment(l.p(), l.n_pres);
  const auto T = x.segment(l.temp(), l.n_temp);
  const double s_phi = x[l.s_phi()];
  const double s_p = x[l.s_p()];

  const Vector ua = a[0] * prev.u + a[1] * curr.u + a[2] * u;
  const Vector ub = b[0] * prev.u + b[1] * curr.u + b[2] * u;
  const Vector wb = b[0] * prev.w + b[1] * curr.w + b[2] * w;
  const Vector pbeta = b[0] * prev.p + b[1] * curr.p + b[2] * p;
  const Vector ta = a[0] * prev.T + a[1] * curr.T + a[2] * T;
  const Vector tb = b[0] * prev.T + b[1] * curr.T + b[2] * T;

  const SparseMatrix& mv = pb.vel_mass();
  const SparseMatrix& kv = pb.vel_stiffness();
  const SparseMatrix& bd = pb.divergence();
  const Vector& mean = pb.pres_mean();

  Vector r(l.size());
  Vector ru = mv * (ua / wts.k_hat + prm.rho * ub) + kv * (prm.mu * ub + prm.gamma * wb) - bd.transpose() * pbeta -
              prm.sigma * (pb.buoyancy() * tb) - f_load;
  Vector rt = pb.temp_mass() * (ta / wts.k_hat) + prm.kappa * (pb.temp_stiffness() * tb) - g_load;

  // Convection, cubic and temperature transport at the beta level, element by element.
  const FeSpace& vs = pb.vel_space();
  const QuadratureCache& qc = pb.p2_cache();
  const int nb = qc.n_basis();
  const auto& vfix = pb.vel_fixed();
  const auto& tfix = pb.temp_fixed();
  std::vector<Triplet> trips;
  if (jacobian) trips.reserve(static_cast<size_t>(pb.mesh().num_triangles()) * (4 * nb * nb + nb * nb + 2 * nb * nb));
  Eigen::Matrix<double, 12, 12> juu;
  Eigen::Matrix<double, 6, 6> jtt;
  Eigen::Matrix<double, 6, 12> jtu;
  const double nu = prm.nu, lam = prm.lambda, b2 = b[2];

  for (int e = 0; e < pb.mesh().num_triangles(); ++e) {
    const auto nodes = vs.element_nodes(e);
    double ue[6][2], te[6];
    for (int i = 0; i < nb; ++i) {
      ue[i][0] = ub[2 * nodes[i]];
      ue[i][1] = ub[2 * nodes[i] + 1];
      te[i] = tb[nodes[i]];
    }
    if (jacobian) {
      juu.setZero();
      jtt.setZero();
      jtu.setZero();
    }
    for (int q = 0; q < qc.n_points(); ++q) {
      const double jw = qc.jxw(e, q);
      Vec2 uq = Vec2::Zero();
      Mat2 gu = Mat2::Zero();  // gu(a, c) = d u_a / d x_c
      double tq = 0.0;
      Vec2 gt = Vec2::Zero();
      for (int i = 0; i < nb; ++i) {
        const double ph = qc.phi(q, i);
        const Vec2& g = qc.dphi(e, q, i);
        uq.x() += ue[i][0] * ph;
        uq.y() += ue[i][1] * ph;
        gu.row(0) += ue[i][0] * g.transpose();
        gu.row(1) += ue[i][1] * g.transpose();
        tq += te[i] * ph;
        gt += te[i] * g;
      }
      const Vec2 conv_u = gu * uq;  // (u.grad) u
      const double conv_t = uq.dot(gt);
      const double s = uq.squaredNorm();
      for (int i = 0; i < nb; ++i) {
        const double ph = qc.phi(q, i);
        const double adv_i = uq.dot(qc.dphi(e, q, i));
        for (int c = 0; c < 2; ++c) {
          ru[2 * nodes[i] + c] += jw * (nu * (0.5 * conv_u[c] * ph - 0.5 * adv_i * uq[c]) + lam * s * uq[c] * ph);
        }
        rt[nodes[i]] += jw * (0.5 * conv_t * ph - 0.5 * adv_i * tq);
      }
      if (!jacobian) continue;
      for (int i = 0; i < nb; ++i) {
        const double pi = qc.phi(q, i);
        const Vec2& gi = qc.dphi(e, q, i);
        const double adv_i = uq.dot(gi);
        for (int j = 0; j < nb; ++j) {
          const double pj = qc.phi(q, j);
          const double adv_j = uq.dot(qc.dphi(e, q, j));
          const double skew = 0.5 * adv_j * pi - 0.5 * adv_i * pj;
          jtt(i, j) += jw * skew;
          for (int c = 0; c < 2; ++c) {
            // d/du_j,d of b(u, u, phi_i e_c) and of b*(u, T, theta_i).
            jtu(i, 2 * j + c) += jw * (0.5 * pj * gt[c] * pi - 0.5 * pj * gi[c] * tq);
            for (int d = 0; d < 2; ++d) {
              double v = nu * (0.5 * pj * gu(c, d) * pi - 0.5 * pj * gi[d] * uq[c]);
              v += lam * (2.0 * uq[c] * uq[d]) * pi * pj;
              if (c == d) v += nu * skew + lam * s * pi * pj;
              juu(2 * i + c, 2 * j + d) += jw * v;
            }
          }
        }
      }
    }
    if (!jacobian) continue;
    for (int i = 0; i < nb; ++i) {
      for (int c = 0; c < 2; ++c) {
        const int row = 2 * nodes[i] + c;
        if (vfix[row]) continue;
        for (int j = 0; j < nb; ++j) {
          for (int d = 0; d < 2; ++d) trips.emplace_back(l.u() + row, l.u() + 2 * nodes[j] + d, b2 * juu(2 * i + c, 2 * j + d));
        }
      }
      if (tfix[nodes[i]]) continue;
      for (int j = 0; j < nb; ++j) {
        trips.emplace_back(l.temp() + nodes[i], l.temp() + nodes[j], b2 * jtt(i, j));
        for (int d = 0; d < 2; ++d) trips.emplace_back(l.temp() + nodes[i], l.u() + 2 * nodes[j] + d, b2 * jtu(i, 2 * j + d));
      }
    }
  }

  for (int d = 0; d < l.n_vel; ++d) {
    if (vfix[d]) ru[d] = u[d] - u_bc[d];
  }
  for (int i = 0; i < l.n_temp; ++i) {
    if (tfix[i]) rt[i] = T[i] - t_bc[i];
  }
  Vector rw = mv * w - bd.transpose() * phi - kv * u;
  for (int d = 0; d < l.n_vel; ++d) {
    if (vfix[d]) rw[d] = w[d] - w_bc[d];
  }

  r.segment(l.u(), l.n_vel) = ru;
  r.segment(l.w(), l.n_vel) = rw;
  r.segment(l.phi(), l.n_pres) = bd * w + s_phi * mean;
  r.segment(l.p(), l.n_pres) = bd * u + s_p * mean;
  r.segment(l.temp(), l.n_temp) = rt;
  r[l.s_phi()] = mean.dot(phi);
  r[l.s_p()] = mean.dot(p);

  if (jacobian) {
    const SparseMatrix nl = from_triplets(l.size(), l.size(), trips);
    *jacobian = lin_jac_ + nl;
  }
  return r;
}

StepResult Stepper::step(const State& prev, const State& curr, const StepWeights& wts, const State& guess) {
  const Problem& pb = problem_;
  const MixedLayout l = pb.layout();
  if (!(wts.k_hat > 0.0)) throw ParameterError("step: weighted step must be positive");

  const Vector f_load = pb.momentum_load(wts.t_beta);
  const Vector g_load = pb.temperature_load(wts.t_beta);
  const Vector u_bc = pb.u_trace(wts.t_next);
  const Vector w_bc = pb.w_trace(wts.t_next);
  const Vector t_bc = pb.temp_trace(wts.t_next);

  Vector x = pack_state(pb, guess);
  for (int d : pb.vel_dirichlet_dofs()) {
    x[l.u() + d] = u_bc[d];
    x[l.w() + d] = w_bc[d];
  }
  for (int n : pb.temp_dirichlet_nodes()) x[l.temp() + n] = t_bc[n];

  linear_jacobian(wts);
  StepReport report;
  SparseMatrix jac;
  Vector r = residual(prev, curr, wts, x, f_load, g_load, u_bc, w_bc, t_bc, &jac);
  double rn = r.norm();
  report.residual_history.push_back(rn);
  report.tolerance = std::max(options_.abs_tol, options_.rel_tol * rn);

  for (int it = 1; it <= options_.max_iterations; ++it) {
    if (it > 1) residual(prev, curr, wts, x, f_load, g_load, u_bc, w_bc, t_bc, &jac);
    lu_.factorize(jac, order_);
    x -= lu_.solve(r).first;
    r = residual(prev, curr, wts, x, f_load, g_load, u_bc, w_bc, t_bc, nullptr);
    rn = r.norm();
    report.residual_history.push_back(rn);
    report.newton_iterations = it;
    if (!std::isfinite(rn)) break;
    if (rn <= report.tolerance) {
      report.converged = true;
      break;
    }
  }
  report.final_residual = rn;
  return {unpack_state(pb, x, wts.t_next), report};
}

double Stepper::residual_norm(const State& prev, const State& curr, const StepWeights& wts, const State& next) const {
  const Problem& pb = problem_;
  return residual(prev, curr, wts, pack_state(pb, next), pb.momentum_load(wts.t_beta), pb.temperature_load(wts.t_beta),
                  pb.u_trace(wts.t_next), pb.w_trace(wts.t_next), pb.temp_trace(wts.t_next), nullptr)
      .norm();
}

StepResult Stepper::dln_step(const State& prev, const State& curr, double k_n, double theta) {
  const double k_prev = curr.t - prev.t;
  if (!(k_prev > 0.0)) throw ParameterError("dln_step: levels must be strictly increasing in time");
  const StepWeights wts = dln_weights(theta, prev.t, curr.t, k_n);
  const double r = k_n / k_prev;
  State guess = curr;
  guess.u = curr.u + r * (curr.u - prev.u);
  guess.w = curr.w + r * (curr.w - prev.w);
  guess.phi = curr.phi + r * (curr.phi - prev.phi);
  guess.p = curr.p + r * (curr.p - prev.p);
  guess.T = curr.T + r * (curr.T - prev.T);
  return step(prev, curr, wts, guess);
}

StepResult Stepper::bootstrap_cn(const State& state0, double k0) {
  return step(state0, state0, cn_weights(state0.t, k0), state0);
}

StepResult dln_step(const Problem& problem, const State& prev, const State& curr, double k_n, double theta,
                    NewtonOptions options) {
  Stepper s(problem, options);
  return s.dln_step(prev, curr, k_n, theta);
}

StepResult bootstrap_cn(const Problem& problem, const State& state0, double k0, NewtonOptions options) {
  Stepper s(problem, options);
  return s.bootstrap_cn(state0, k0);
}

State initialize(const Problem& problem, const AnalyticInitial& init, double t0) {
  StokesBoundary bc{problem.vel_dirichlet_dofs()};
  const PhysicalParams& prm = problem.params();
  const StokesProjection s =
      stokes_type_project(problem.vel_space(), problem.pres_space(), prm.mu, prm.gamma, init.u, init.w, init.phi, init.p, bc);
  RitzOptions ro;
  ro.dirichlet_nodes = problem.temp_dirichlet_nodes();
  State out;
  out.t = t0;
  out.u = s.u;
  out.w = s.w;
  out.phi = s.phi;
  out.p = s.p;
  out.T = ritz_project(problem.temp_space(), init.T, ro);
  return out;
}

std::vector<double> uniform_symmetric_draws(unsigned long long seed, int n) {
  std::mt19937_64 gen(seed);
  std::vector<double> out(n);
  for (double& v : out) {
    const double u01 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    v = 2.0 * u01 - 1.0;
  }
  return out;
}

State initialize_random(const Problem& problem, unsigned long long seed, const ScalarField& T0) {
  const FeSpace& vs = problem.vel_space();
  const FeSpace& ps = problem.pres_space();
  const MixedLayout l = problem.layout();
  const auto draws = uniform_symmetric_draws(seed, vs.num_dofs());
  StokesProjection src;
  src.u = Eigen::Map<const Vector>(draws.data(), vs.num_dofs());
  for (int d : problem.vel_dirichlet_dofs()) src.u[d] = 0.0;
  src.w = Vector::Zero(vs.num_dofs());
  src.phi = Vector::Zero(ps.num_dofs());
  src.p = Vector::Zero(ps.num_dofs());
  const PhysicalParams& prm = problem.params();
  const StokesProjection proj =
      stokes_type_project(vs, ps, prm.mu, prm.gamma, src, StokesBoundary{problem.vel_dirichlet_dofs()});

  // w-equation and its constraint for the projected velocity:
  // M w - B^T phi = K u, B w = 0, mean(phi) = 0, w = 0 on the boundary.
  const int nv = l.n_vel, np = l.n_pres;
  const auto& fixed = problem.vel_fixed();
  std::vector<Triplet> trips;
  detail::append_block(trips, problem.vel_mass(), 0, 0, 1.0, &fixed);
  detail::append_transposed_block(trips, problem.divergence(), 0, nv, -1.0, &fixed);
  detail::append_block(trips, problem.divergence(), nv, 0, 1.0, nullptr);
  for (int d = 0; d < nv; ++d) {
    if (fixed[d]) trips.emplace_back(d, d, 1.0);
  }
  const Vector& m = problem.pres_mean();
  for (int i = 0; i < np; ++i) {
    trips.emplace_back(nv + i, nv + np, m[i]);
    trips.emplace_back(nv + np, nv + i, m[i]);
  }
  Vector rhs = Vector::Zero(nv + np + 1);
  rhs.head(nv) = problem.vel_stiffness() * proj.u;
  for (int d = 0; d < nv; ++d) {
    if (fixed[d]) rhs[d] = 0.0;
  }
  const DofBlock blocks[] = {{&vs, 0}, {&ps, nv}};
  const auto [sol, rep] = lu_solve(from_triplets(nv + np + 1, nv + np + 1, trips), rhs,
                                   elimination_order(problem.mesh(), blocks, nv + np + 1));

  RitzOptions ro;
  ro.dirichlet_nodes = problem.temp_dirichlet_nodes();
  State out;
  out.t = 0.0;
  out.u = proj.u;
  out.w = sol.head(nv);
  out.phi = sol.segment(nv, np);
  out.p = proj.p;
  out.T = ritz_project(problem.temp_space(), T0, ro);
  return out;
}

}  // namespace tdaf
