#pragma once

#include <vector>

#include "tdaf/stepper.hpp"

namespace tdaf {

/// Dissipation rates of one DLN step and their ratios. A ratio whose
/// denominator vanishes is reported as 0 with the `defined` flag cleared.
struct DissipationIndicators {
  double nd_u = 0.0;  ///< |u_alpha|^2 / k_hat
  double nd_T = 0.0;  ///< |T_alpha|^2 / k_hat
  double vd_u = 0.0;  ///< mu |grad u_beta|^2
  double td_T = 0.0;  ///< kappa |grad T_beta|^2
  double chi_u = 0.0;
  double chi_T = 0.0;
  bool chi_u_defined = false;
  bool chi_T_defined = false;
};

struct AdaptiveConfig {
  double delta = 0.1;
  double k_min = 1e-4;
  double k_max = 0.01;
  double k0 = 1e-4;

  /// Throws ConfigError unless 0 < k_min <= k0 <= k_max and delta > 0.
  void validate() const;
};

DissipationIndicators indicators(const Problem& problem, const State& prev, const State& curr, const State& next,
                                 double theta);

/// min(2 k_n, k_max) if max(|chi_u|, |chi_T|) <= delta, else max(k_n / 2, k_min).
double next_step(double chi_u, double chi_T, const AdaptiveConfig& cfg, double k_n);

struct StepLogEntry {
  double t = 0.0;
  double k = 0.0;
  double chi_u = 0.0;
  double chi_T = 0.0;
  double energy = 0.0;
  int newton_iters = 0;
  double div_u = 0.0;
  double div_w = 0.0;
};

struct AdaptiveResult {
  std::vector<StepLogEntry> log;
  /// Accepted steps including the bootstrap step.
  int step_count = 0;
  State final_state;
};

/// Algorithm: DLN steps from (state0, state1) to t_end with the step chosen by
/// `next_step` after every accepted step. The first DLN step reuses
/// k0 = state1.t - state0.t. A step whose Newton iteration fails is retried
/// with half the step; failure at k_min throws NewtonError. The last step is
/// shortened to land on t_end.
AdaptiveResult run_adaptive(Stepper& stepper, const State& state0, const State& state1, double t_end,
                            const AdaptiveConfig& cfg, double theta);

void write_step_log_csv(const std::vector<StepLogEntry>& log, const std::string& path);

}  // namespace tdaf
