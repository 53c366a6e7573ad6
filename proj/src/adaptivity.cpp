#include "tdaf/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <string>

#include "tdaf/diagnostics.hpp"
#include "tdaf/errors.hpp"

namespace tdaf {

void AdaptiveConfig::validate() const {
  if (!(delta > 0.0)) throw ConfigError("adaptive: delta must be positive");
  if (!(k_min > 0.0 && k_min <= k0 && k0 <= k_max)) {
    throw ConfigError("adaptive: need 0 < k_min <= k0 <= k_max");
  }
}

DissipationIndicators indicators(const Problem& problem, const State& prev, const State& curr, const State& next,
                                 double theta) {
  const StepWeights wts = dln_weights(theta, prev.t, curr.t, next.t - curr.t);
  const PhysicalParams& prm = problem.params();
  const Vector ua = combine(prev.u, curr.u, next.u, wts.alpha);
  const Vector ub = combine(prev.u, curr.u, next.u, wts.beta);
  const Vector ta = combine(prev.T, curr.T, next.T, wts.alpha);
  const Vector tb = combine(prev.T, curr.T, next.T, wts.beta);

  DissipationIndicators d;
  d.nd_u = ua.dot(problem.vel_mass() * ua) / wts.k_hat;
  d.nd_T = ta.dot(problem.temp_mass() * ta) / wts.k_hat;
  d.vd_u = prm.mu * ub.dot(problem.vel_stiffness() * ub);
  d.td_T = prm.kappa * tb.dot(problem.temp_stiffness() * tb);
  d.chi_u_defined = d.vd_u > 0.0;
  d.chi_T_defined = d.td_T > 0.0;
  d.chi_u = d.chi_u_defined ? d.nd_u / d.vd_u : 0.0;
  d.chi_T = d.chi_T_defined ? d.nd_T / d.td_T : 0.0;
  return d;
}

double next_step(double chi_u, double chi_T, const AdaptiveConfig& cfg, double k_n) {
  if (std::max(std::abs(chi_u), std::abs(chi_T)) <= cfg.delta) return std::min(2.0 * k_n, cfg.k_max);
  return std::max(0.5 * k_n, cfg.k_min);
}

AdaptiveResult run_adaptive(Stepper& stepper, const State& state0, const State& state1, double t_end,
                            const AdaptiveConfig& cfg, double theta) {
  cfg.validate();
  const Problem& pb = stepper.problem();
  AdaptiveResult res;
  res.step_count = 1;
  State prev = state0;
  State curr = state1;
  double k = curr.t - prev.t;
  if (!(k > 0.0)) throw ConfigError("run_adaptive: bootstrap state must follow the initial state");
  // Remaining intervals shorter than this are absorbed into the last step.
  const double t_eps = 1e-12 * std::max(1.0, std::abs(t_end));

  while (curr.t < t_end - t_eps) {
    const double k_try = std::min(k, t_end - curr.t);
    StepResult sr = stepper.dln_step(prev, curr, k_try, theta);
    if (!sr.report.converged) {
      if (k_try <= cfg.k_min * (1.0 + 1e-12)) {
        throw NewtonError("adaptive: Newton failed at t=" + std::to_string(curr.t) + " with the minimum step (residual " +
                          std::to_string(sr.report.final_residual) + ")");
      }
      k = std::max(0.5 * k_try, cfg.k_min);
      continue;
    }
    if (t_end - sr.state.t <= t_eps) sr.state.t = t_end;
    const DissipationIndicators ind = indicators(pb, prev, curr, sr.state, theta);
    const DivergenceResidual div = divergence_residual(sr.state, pb.divergence());
    StepLogEntry e;
    e.t = sr.state.t;
    e.k = k_try;
    e.chi_u = ind.chi_u;
    e.chi_T = ind.chi_T;
    e.energy = energy(pb, sr.state);
    e.newton_iters = sr.report.newton_iterations;
    e.div_u = div.u;
    e.div_w = div.w;
    res.log.push_back(e);
    ++res.step_count;
    k = next_step(ind.chi_u, ind.chi_T, cfg, std::clamp(k_try, cfg.k_min, cfg.k_max));
    prev = std::move(curr);
    curr = std::move(sr.state);
  }
  res.final_state = std::move(curr);
  return res;
}

void write_step_log_csv(const std::vector<StepLogEntry>& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "t,k,chi_u,chi_T,energy,newton_iters\n" << std::setprecision(12);
  for (const auto& e : log) {
    out << e.t << "," << e.k << "," << e.chi_u << "," << e.chi_T << "," << e.energy << "," << e.newton_iters << "\n";
  }
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace tdaf
