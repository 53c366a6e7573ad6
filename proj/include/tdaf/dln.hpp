#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Core>

namespace tdaf {

using Vector = Eigen::VectorXd;

/// Weights applied to the levels (n-1, n, n+1), in that order.
using Triple = std::array<double, 3>;

inline constexpr double kDefaultTheta = 0.3;

/// Coefficients of the variable-step two-step DLN method for one step.
///
/// `alpha` does not depend on the step ratio. `beta` depends on theta and the
/// step variability eps = (k_n - k_{n-1}) / (k_n + k_{n-1}). `a` is the
/// numerical-dissipation triple of the G-stability identity
///   (v_alpha, v_beta) = |(v_{n+1}, v_n)|_G^2 - |(v_n, v_{n-1})|_G^2 + |sum a_l v_{n-1+l}|^2,
/// which vanishes at both ends theta = 0 and theta = 1.
struct DlnCoefficients {
  double theta = kDefaultTheta;
  double eps = 0.0;
  Triple alpha{};
  Triple beta{};
  Triple a{};
};

/// Throws ParameterError for theta outside [0,1] or eps outside (-1,1).
DlnCoefficients dln_coefficients(double theta, double eps);

/// eps_n for the step pair (k_prev, k_n). Throws ParameterError unless both
/// steps are positive.
double step_variability(double k_n, double k_prev);

/// k_hat = alpha_2 k_n - alpha_0 k_{n-1}.
double weighted_step(double theta, double k_n, double k_prev);

/// Strictly increasing time levels t_0 < t_1 < ... < t_M.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> times);

  int num_steps() const { return static_cast<int>(times_.size()) - 1; }
  double time(int n) const { return times_[n]; }
  const std::vector<double>& times() const { return times_; }
  /// k_n = t_{n+1} - t_n.
  double step(int n) const { return times_[n + 1] - times_[n]; }
  /// eps_n, defined for 1 <= n <= M-1.
  double variability(int n) const { return step_variability(step(n), step(n - 1)); }
  double weighted_step(double theta, int n) const { return tdaf::weighted_step(theta, step(n), step(n - 1)); }
  /// t_{n,beta}.
  double beta_time(double theta, int n) const;

 private:
  std::vector<double> times_;
};

double combine(double prev, double curr, double next, const Triple& w);

/// w[0] prev + w[1] curr + w[2] next. Throws StructuralError on length mismatch.
Vector combine(const Vector& prev, const Vector& curr, const Vector& next, const Triple& w);

using InnerProduct = std::function<double(const Vector&, const Vector&)>;

/// Euclidean inner product, the default when no mass matrix is involved.
double euclidean_inner(const Vector& u, const Vector& v);

/// |(u, v)|_G^2 = (1+theta)/4 |u|^2 + (1-theta)/4 |v|^2.
double g_norm_sq(double theta, const Vector& u, const Vector& v, const InnerProduct& inner = euclidean_inner);

struct GStabilityCheck {
  double residual = 0.0;
  /// Sum of the magnitudes of all terms; residual / scale is the relative defect.
  double scale = 0.0;
};

/// Evaluates both sides of the G-stability identity for (v_{n-1}, v_n, v_{n+1}).
GStabilityCheck check_g_stability_identity(double theta, double eps, const Vector& v_prev, const Vector& v_curr,
                                           const Vector& v_next, const InnerProduct& inner = euclidean_inner);

}  // namespace tdaf
