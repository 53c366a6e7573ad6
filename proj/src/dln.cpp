#include "tdaf/dln.hpp"

#include <cmath>
#include <string>

#include "tdaf/errors.hpp"

namespace tdaf {

namespace {

void require_theta(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw ParameterError("dln: theta must lie in [0,1] (got " + std::to_string(theta) + ")");
  }
}

}  // namespace

DlnCoefficients dln_coefficients(double theta, double eps) {
  require_theta(theta);
  if (!(eps > -1.0 && eps < 1.0)) {
    throw ParameterError("dln: step variability must lie in (-1,1) (got " + std::to_string(eps) + ")");
  }

  DlnCoefficients c;
  c.theta = theta;
  c.eps = eps;
  c.alpha = {0.5 * (theta - 1.0), -theta, 0.5 * (theta + 1.0)};

  const double denom = (1.0 + eps * theta) * (1.0 + eps * theta);
  const double q = (1.0 - theta * theta) / denom;
  const double r = eps * eps * theta * (1.0 - theta * theta) / denom;
  c.beta = {0.25 * (1.0 + q - r - theta), 0.5 * (1.0 - q), 0.25 * (1.0 + q + r + theta)};

  const double a1 = -std::sqrt(theta * (1.0 - theta * theta)) / (std::sqrt(2.0) * (1.0 + eps * theta));
  c.a = {-0.5 * (1.0 + eps) * a1, a1, -0.5 * (1.0 - eps) * a1};
  return c;
}

double step_variability(double k_n, double k_prev) {
  if (!(k_n > 0.0) || !(k_prev > 0.0)) throw ParameterError("dln: time steps must be positive");
  return (k_n - k_prev) / (k_n + k_prev);
}

double weighted_step(double theta, double k_n, double k_prev) {
  require_theta(theta);
  return 0.5 * (theta + 1.0) * k_n - 0.5 * (theta - 1.0) * k_prev;
}

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
  if (times_.size() < 2) throw ConfigError("time grid: need at least two levels");
  for (size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) throw ConfigError("time grid: levels must be strictly increasing");
  }
}

double TimeGrid::beta_time(double theta, int n) const {
  const DlnCoefficients c = dln_coefficients(theta, variability(n));
  return combine(times_[n - 1], times_[n], times_[n + 1], c.beta);
}

double combine(double prev, double curr, double next, const Triple& w) {
  return w[0] * prev + w[1] * curr + w[2] * next;
}

Vector combine(const Vector& prev, const Vector& curr, const Vector& next, const Triple& w) {
  if (prev.size() != curr.size() || curr.size() != next.size()) {
    throw StructuralError("combine: vectors of unequal length");
  }
  return w[0] * prev + w[1] * curr + w[2] * next;
}

double euclidean_inner(const Vector& u, const Vector& v) { return u.dot(v); }

double g_norm_sq(double theta, const Vector& u, const Vector& v, const InnerProduct& inner) {
  require_theta(theta);
  return 0.25 * (1.0 + theta) * inner(u, u) + 0.25 * (1.0 - theta) * inner(v, v);
}

GStabilityCheck check_g_stability_identity(double theta, double eps, const Vector& v_prev, const Vector& v_curr,
                                           const Vector& v_next, const InnerProduct& inner) {
  const DlnCoefficients c = dln_coefficients(theta, eps);
  const Vector va = combine(v_prev, v_curr, v_next, c.alpha);
  const Vector vb = combine(v_prev, v_curr, v_next, c.beta);
  const Vector vd = combine(v_prev, v_curr, v_next, c.a);

  const double lhs = inner(va, vb);
  const double g_new = g_norm_sq(theta, v_next, v_curr, inner);
  const double g_old = g_norm_sq(theta, v_curr, v_prev, inner);
  const double dissipation = inner(vd, vd);

  GStabilityCheck out;
  out.residual = std::abs(lhs - (g_new - g_old + dissipation));
  out.scale = std::abs(lhs) + g_new + g_old + dissipation;
  return out;
}

}  // namespace tdaf
