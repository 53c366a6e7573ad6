#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "tdaf/dln.hpp"
#include "tdaf/fe_space.hpp"
#include "tdaf/forms.hpp"
#include "tdaf/linalg.hpp"

namespace tdaf {

using SpaceTimeScalar = std::function<double(double x, double y, double t)>;
using SpaceTimeVector = std::function<Vec2(double x, double y, double t)>;

/// Coefficients of one time level: P2 vector u and w, P1 phi and p, P2 T.
struct State {
  double t = 0.0;
  Vector u;
  Vector w;
  Vector phi;
  Vector p;
  Vector T;
};

struct StepReport {
  int newton_iterations = 0;
  double final_residual = 0.0;
  /// Threshold the final residual was compared against.
  double tolerance = 0.0;
  bool converged = false;
  std::vector<double> residual_history;
};

struct NewtonOptions {
  int max_iterations = 20;
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
};

/// Boundary data and sources. u and w are Dirichlet on the whole boundary;
/// T is Dirichlet on boundary edges accepted by `temp_dirichlet` and
/// insulated elsewhere. Empty functions stand for zero.
struct ProblemSetup {
  PhysicalParams params;
  std::function<bool(BoundaryTag)> temp_dirichlet;
  SpaceTimeVector u_boundary;
  SpaceTimeVector w_boundary;
  SpaceTimeScalar temp_boundary;
  SpaceTimeVector f;
  SpaceTimeScalar g;
};

/// Spaces, time-independent operators and boundary bookkeeping for one mesh.
class Problem {
 public:
  Problem(std::shared_ptr<const Mesh> mesh, ProblemSetup setup);

  const Mesh& mesh() const { return *mesh_; }
  const ProblemSetup& setup() const { return setup_; }
  const PhysicalParams& params() const { return setup_.params; }
  const FeSpace& vel_space() const { return vel_; }
  const FeSpace& pres_space() const { return pres_; }
  const FeSpace& temp_space() const { return temp_; }
  const QuadratureCache& p2_cache() const { return p2_cache_; }
  MixedLayout layout() const { return {vel_.num_dofs(), pres_.num_dofs(), temp_.num_dofs()}; }

  const SparseMatrix& vel_mass() const { return vel_mass_; }
  const SparseMatrix& vel_stiffness() const { return vel_stiff_; }
  const SparseMatrix& divergence() const { return div_; }
  const SparseMatrix& buoyancy() const { return buoy_; }
  const SparseMatrix& temp_mass() const { return temp_mass_; }
  const SparseMatrix& temp_stiffness() const { return temp_stiff_; }
  const Vector& pres_mean() const { return pres_mean_; }

  const std::vector<int>& vel_dirichlet_dofs() const { return vel_dirichlet_; }
  const std::vector<int>& temp_dirichlet_nodes() const { return temp_dirichlet_; }
  const std::vector<char>& vel_fixed() const { return vel_fixed_; }
  const std::vector<char>& temp_fixed() const { return temp_fixed_; }

  /// Boundary values at time t on the Dirichlet DOFs (zero elsewhere).
  Vector u_trace(double t) const;
  Vector w_trace(double t) const;
  Vector temp_trace(double t) const;

  /// (f(., t), v) and (g(., t), theta) over the P2 spaces; zero when absent.
  Vector momentum_load(double t) const;
  Vector temperature_load(double t) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  ProblemSetup setup_;
  FeSpace vel_;
  FeSpace pres_;
  FeSpace temp_;
  QuadratureCache p2_cache_;
  SparseMatrix vel_mass_, vel_stiff_, div_, buoy_, temp_mass_, temp_stiff_;
  Vector pres_mean_;
  std::vector<int> vel_dirichlet_;
  std::vector<int> temp_dirichlet_;
  std::vector<char> vel_fixed_;
  std::vector<char> temp_fixed_;
};

/// Time-discretization weights of one step: z_alpha / k_hat and z_beta
/// evaluated at t_beta, levels ordered (n-1, n, n+1).
struct StepWeights {
  Triple alpha{};
  Triple beta{};
  double k_hat = 0.0;
  double t_beta = 0.0;
  double t_next = 0.0;
};

StepWeights dln_weights(double theta, double t_prev, double t_curr, double k_n);
/// Trapezoidal weights: alpha = (0,-1,1), beta = (0,1/2,1/2), k_hat = k_0.
StepWeights cn_weights(double t0, double k0);

struct StepResult {
  State state;
  StepReport report;
};

/// Newton solver for the coupled step system. Keeps the sparse LU between
/// calls so the symbolic analysis is done once per mesh.
class Stepper {
 public:
  explicit Stepper(const Problem& problem, NewtonOptions options = {});

  const Problem& problem() const { return problem_; }

  /// One DLN step from (prev, curr) to curr.t + k_n. Newton failure is
  /// reported, not thrown; singular systems throw SolverError.
  StepResult dln_step(const State& prev, const State& curr, double k_n, double theta);
  /// Crank-Nicolson step from state0 to state0.t + k0.
  StepResult bootstrap_cn(const State& state0, double k0);
  /// Generic step with explicit weights and initial guess.
  StepResult step(const State& prev, const State& curr, const StepWeights& wts, const State& guess);

  /// 2-norm of the step residual at `next`, assembled from scratch.
  double residual_norm(const State& prev, const State& curr, const StepWeights& wts, const State& next) const;

 private:
  Vector residual(const State& prev, const State& curr, const StepWeights& wts, const Vector& x,
                  const Vector& f_load, const Vector& g_load, const Vector& u_bc, const Vector& w_bc,
                  const Vector& t_bc, SparseMatrix* jacobian) const;
  const SparseMatrix& linear_jacobian(const StepWeights& wts);

  const Problem& problem_;
  NewtonOptions options_;
  SparseLu lu_;
  std::vector<int> order_;
  SparseMatrix lin_jac_;
  double lin_key_mass_ = -1.0;
  double lin_key_beta_ = -1.0;
};

StepResult dln_step(const Problem& problem, const State& prev, const State& curr, double k_n, double theta,
                    NewtonOptions options = {});
StepResult bootstrap_cn(const Problem& problem, const State& state0, double k0, NewtonOptions options = {});

/// Packs a state into [u | w | phi | p | T | s_phi | s_p] with zero multipliers.
Vector pack_state(const Problem& problem, const State& s);
State unpack_state(const Problem& problem, const Vector& x, double t);

State zero_state(const Problem& problem, double t = 0.0);

/// Initial data from closed-form fields: (u, w, phi, p) by the Stokes-type
/// projection with the boundary trace held, T by the Ritz projection with the
/// Dirichlet trace held.
struct AnalyticInitial {
  VectorField u;
  VectorField w;
  ScalarField phi;
  ScalarField p;
  ScalarField T;
};

State initialize(const Problem& problem, const AnalyticInitial& init, double t0 = 0.0);

/// Random nodal velocity in [-1,1]^2 from std::mt19937_64 (drawn in DOF
/// order, boundary DOFs zero), projected to a discretely solenoidal field;
/// w and phi then solve the w-equation for that velocity. T from the Ritz
/// projection of `T0`.
State initialize_random(const Problem& problem, unsigned long long seed, const ScalarField& T0);

/// Uniform [-1,1] draws for n values, using the documented generator mapping.
std::vector<double> uniform_symmetric_draws(unsigned long long seed, int n);

}  // namespace tdaf
