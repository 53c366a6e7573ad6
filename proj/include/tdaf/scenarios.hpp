#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tdaf/adaptivity.hpp"
#include "tdaf/diagnostics.hpp"
#include "tdaf/stepper.hpp"

namespace tdaf {

enum class Scenario { ConvergenceTime, ConvergenceSpace, Cavity, AdaptiveCompare };

const char* scenario_name(Scenario s);
/// Accepts the CLI spellings convergence-time, convergence-space, cavity,
/// adaptive-compare. Throws ConfigError otherwise.
Scenario parse_scenario(const std::string& name);

enum class CavityInitialTemperature { Linear, ZeroWithLift };

struct ScenarioConfig {
  Scenario scenario = Scenario::Cavity;
  double theta = kDefaultTheta;
  PhysicalParams params;
  /// Cells per side of the (finest, for space studies) mesh.
  int mesh_n = 64;
  /// Space study: coarsest mesh and number of halvings + 1.
  int mesh_coarse = 8;
  int space_levels = 4;
  double t_end = 1.0;
  /// Constant step (space study, cavity).
  double dt = 0.01;
  /// Time study: coarsest step and number of halvings + 1.
  double dt_coarse = 0.25;
  int time_levels = 4;
  AdaptiveConfig adaptive;
  std::vector<double> reynolds;
  /// Constant-step baseline length for the adaptive comparison; 0 skips it.
  int constant_steps = 20000;
  CavityInitialTemperature initial_temperature = CavityInitialTemperature::Linear;
  std::vector<double> snapshot_times;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool full_scale = false;

  /// Throws ConfigError or ParameterError for out-of-range values, and
  /// ConfigError when a random scenario has no seed.
  void validate() const;
};

/// Defaults reproducing each scenario at desk scale (or at the original
/// scale when `full_scale`).
ScenarioConfig default_config(Scenario s, bool full_scale = false);

/// Flat JSON object; keys missing from `json` keep the values of `base`.
ScenarioConfig config_from_json(const std::string& json, const ScenarioConfig& base);
ScenarioConfig config_from_json(const std::string& json);
std::string config_to_json(const ScenarioConfig& cfg);

/// Closed-form test fields and the derivatives needed for their sources.
struct ManufacturedValues {
  Vec2 u, u_t, lap_u;
  Mat2 grad_u;
  Vec2 w, lap_w;
  Mat2 grad_w;
  double phi = 0.0;
  Vec2 grad_phi;
  double p = 0.0;
  Vec2 grad_p;
  double T = 0.0, T_t = 0.0, lap_T = 0.0;
  Vec2 grad_T;
};

ManufacturedValues manufactured_solution(double t, double x, double y);

/// f = u_t - mu Lap u - gamma Lap w + nu (u.grad) u + rho u + lambda |u|^2 u + grad p - sigma xi T.
Vec2 manufactured_momentum_source(const PhysicalParams& prm, double t, double x, double y);
/// g = T_t - kappa Lap T + u.grad T.
double manufactured_temperature_source(const PhysicalParams& prm, double t, double x, double y);

/// Problem setup with all-Dirichlet exact traces and the manufactured sources.
ProblemSetup manufactured_setup(const PhysicalParams& prm);
/// Analytic initial data of the manufactured fields at time t.
AnalyticInitial manufactured_initial(double t);

/// Cavity: no-slip walls, T = 1/2 - x on the vertical walls, insulated top
/// and bottom, no sources.
ProblemSetup cavity_setup(const PhysicalParams& prm);
PhysicalParams cavity_params();

/// Called after every accepted step.
using StepObserver = std::function<void(const State&, const StepReport&)>;

/// Largest divergence residual over every accepted step of a run.
struct DivergenceMonitor {
  double max_u = 0.0;
  double max_w = 0.0;
  int steps = 0;
  void observe(const State& s, const SparseMatrix& divergence);
};

struct ConvergenceResult {
  RateTable l2;
  RateTable h1;  ///< empty for the time study
  DivergenceMonitor divergence;
};

ConvergenceResult run_convergence_time(const ScenarioConfig& cfg);
ConvergenceResult run_convergence_space(const ScenarioConfig& cfg);

struct EnergyEntry {
  double t = 0.0;
  double energy = 0.0;
  int newton_iters = 0;
  double div_u = 0.0;
  double div_w = 0.0;
};

struct CavityResult {
  std::vector<EnergyEntry> log;  ///< includes t = 0
  std::vector<std::string> snapshots;
  DivergenceMonitor divergence;
  State final_state;
};

CavityResult run_cavity(const ScenarioConfig& cfg);

struct ReynoldsComparison {
  double reynolds = 0.0;
  int adaptive_steps = 0;
  int constant_steps = 0;  ///< 0 when the baseline was skipped
  double adaptive_final_t = 0.0;
  double constant_final_t = 0.0;
  double adaptive_max_energy = 0.0;
  double constant_max_energy = 0.0;
  double initial_energy = 0.0;  ///< max(E_0, E_1)
  DivergenceMonitor divergence;
};

std::vector<ReynoldsComparison> run_adaptive_compare(const ScenarioConfig& cfg);

/// Dispatches on cfg.scenario, writes the scenario's files under cfg.out_dir
/// and returns a one-line JSON summary of the results.
std::string run_scenario(const ScenarioConfig& cfg);

}  // namespace tdaf
