#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "tdaf/fe_space.hpp"
#include "tdaf/linalg.hpp"

namespace tdaf {

/// Coefficients of the thermally driven active fluid model.
struct PhysicalParams {
  double mu = 1.0;      ///< viscosity
  double gamma = 1.0;   ///< generic stability coefficient (bi-Laplacian)
  double nu = 1.0;      ///< density coefficient scaling convection
  double rho = 1.0;     ///< linear Landau coefficient, may be negative
  double lambda = 1.0;  ///< cubic Landau coefficient
  double sigma = 1.0;   ///< buoyancy parameter, mu * Ra
  Vec2 xi{0.0, 1.0};    ///< unit gravity direction
  double kappa = 1.0;   ///< thermal conductivity

  /// Throws ParameterError when a sign or normalization requirement fails.
  void validate() const;
};

struct ScalarField {
  ScalarFunction value;
  std::function<Vec2(double, double)> grad;
};

/// grad(x, y)(i, j) = d value_i / d x_j.
struct VectorField {
  VectorFunction value;
  std::function<Mat2(double, double)> grad;
};

/// Physical quadrature data of one space on the assembly rule: points,
/// JxW weights and physical basis gradients per (triangle, point).
class QuadratureCache {
 public:
  QuadratureCache(const FeSpace& space, const QuadratureRule& rule);

  int n_points() const { return tab_.n_points; }
  int n_basis() const { return tab_.n_basis; }
  double jxw(int t, int q) const { return jxw_[t * tab_.n_points + q]; }
  const Vec2& point(int t, int q) const { return points_[t * tab_.n_points + q]; }
  double phi(int q, int i) const { return tab_.phi(q, i); }
  const Vec2& dphi(int t, int q, int i) const {
    return grads_[(static_cast<size_t>(t) * tab_.n_points + q) * tab_.n_basis + i];
  }

 private:
  Tabulation tab_;
  std::vector<double> jxw_;
  std::vector<Vec2> points_;
  std::vector<Vec2> grads_;
};

enum class OperatorKind { Mass, Stiffness, Divergence, ConvectionSkew, Buoyancy };

struct AssembledOperator {
  SparseMatrix matrix;
  const FeSpace* row_space = nullptr;
  const FeSpace* col_space = nullptr;
  OperatorKind kind = OperatorKind::Mass;
};

AssembledOperator assemble_mass(const FeSpace& space);
AssembledOperator assemble_stiffness(const FeSpace& space);
/// B(i, j) = integral of q_i div(phi_j) for P2 vector phi_j and scalar q_i.
AssembledOperator assemble_divergence(const FeSpace& vel_space, const FeSpace& scalar_space);
/// Buoyancy coupling (xi T, v) from a scalar space into a vector space.
AssembledOperator assemble_buoyancy(const FeSpace& vel_space, const FeSpace& temp_space, const Vec2& xi);

/// Integral of each scalar basis function.
Vector assemble_mean_vector(const FeSpace& scalar_space);

Vector assemble_load(const FeSpace& space, const ScalarFunction& f);
Vector assemble_load(const FeSpace& space, const VectorFunction& f);

/// Skew-symmetrized trilinear form
///   b(u, v, w) = 1/2 ((u.grad) v, w) - 1/2 ((u.grad) w, v).
/// `space` is vector valued for b and scalar for b*; the advecting field u
/// always lives in the vector space `adv_space`.
double trilinear_b(const FeSpace& adv_space, const Vector& u, const FeSpace& space, const Vector& v, const Vector& w);

/// N(u) with w^T N(u) v = b(u, v, w).
AssembledOperator assemble_convection_matrix(const FeSpace& adv_space, const Vector& u, const FeSpace& space);

/// L(v) with w^T L(v) du = b(du, v, w): the derivative of b in its first slot.
SparseMatrix assemble_advector_matrix(const FeSpace& adv_space, const FeSpace& space, const Vector& v);

struct CubicTerm {
  Vector residual;       ///< integral of |u|^2 u . phi_i
  SparseMatrix jacobian; ///< du -> integral of (|u|^2 du + 2 (u.du) u) . phi_i
};

CubicTerm cubic_term(const FeSpace& vel_space, const Vector& u);

inline constexpr double kMonotonicityConstant = 0.25;
inline constexpr double kContinuityConstant = 3.0;

struct MonotonicityGaps {
  double monotone_gap = 0.0;
  double continuity_gap = 0.0;
};

/// Gaps of the pointwise monotonicity and continuity inequalities for the
/// map x -> |x|^2 x on R^2; both are nonnegative.
MonotonicityGaps monotonicity_continuity_check(const Vec2& x, const Vec2& y);

struct RitzOptions {
  /// Nodes whose values are taken from the exact field.
  std::vector<int> dirichlet_nodes;
  /// Impose (T - R_h T, 1) = 0 through a multiplier when no Dirichlet nodes are given.
  bool mean_constraint = true;
};

/// Stiffness-orthogonal projection onto a scalar space.
Vector ritz_project(const FeSpace& space, const ScalarField& exact, const RitzOptions& options);

/// Unknown layout [u | w | phi | p | T | s_phi | s_p] shared by the projection
/// and the time stepper. The trailing scalars are the zero-mean multipliers.
/// Without a temperature block n_temp is zero.
struct MixedLayout {
  int n_vel = 0;
  int n_pres = 0;
  int n_temp = 0;

  int u() const { return 0; }
  int w() const { return n_vel; }
  int phi() const { return 2 * n_vel; }
  int p() const { return 2 * n_vel + n_pres; }
  int temp() const { return 2 * n_vel + 2 * n_pres; }
  int s_phi() const { return temp() + n_temp; }
  int s_p() const { return s_phi() + 1; }
  int size() const { return s_p() + 1; }
};

/// One finite element block of a coupled unknown vector, starting at `offset`.
struct DofBlock {
  const FeSpace* space = nullptr;
  int offset = 0;
};

/// Nested-dissection elimination order for a coupled system of `size`
/// unknowns on a structured mesh. Unknowns outside every block come last.
std::vector<int> elimination_order(const Mesh& mesh, std::span<const DofBlock> blocks, int size);

struct StokesProjection {
  Vector u;
  Vector w;
  Vector phi;
  Vector p;
};

struct StokesBoundary {
  /// Velocity-space DOFs held at the exact trace (both u and w).
  std::vector<int> dirichlet_dofs;
};

/// Coupled projection of (u, w, phi, p): finds discrete fields with
///   mu (grad(u - Su), grad v) + gamma (grad(w - Sw), grad v) - (p - Sp, div v) = 0
///   (w - Sw, z) - (phi - Sphi, div z) = (grad(u - Su), grad z)
///   (div Su, q) = 0,  (div Sw, q) = 0
/// with Sphi and Sp of zero mean.
StokesProjection stokes_type_project(const FeSpace& vel_space, const FeSpace& pres_space, double mu, double gamma,
                                     const VectorField& u, const VectorField& w, const ScalarField& phi,
                                     const ScalarField& p, const StokesBoundary& boundary);

/// Same projection with discrete sources already in (vel, vel, pres, pres).
StokesProjection stokes_type_project(const FeSpace& vel_space, const FeSpace& pres_space, double mu, double gamma,
                                     const StokesProjection& source, const StokesBoundary& boundary);

/// Quadrature L2 norm of (coeffs - exact). `remove_mean` subtracts the mean of
/// the difference first, for fields defined up to a constant.
double l2_error(const FeSpace& space, const Vector& coeffs, const ScalarFunction& exact, bool remove_mean = false);
double l2_error(const FeSpace& space, const Vector& coeffs, const VectorFunction& exact);
/// Full H1 norm: sqrt(L2^2 + |grad|^2).
double h1_error(const FeSpace& space, const Vector& coeffs, const ScalarField& exact, bool remove_mean = false);
double h1_error(const FeSpace& space, const Vector& coeffs, const VectorField& exact);

}  // namespace tdaf
