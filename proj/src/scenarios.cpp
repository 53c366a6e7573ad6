#include "tdaf/scenarios.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>

#include <json.hpp>

#include "tdaf/errors.hpp"

namespace tdaf {

namespace {
constexpr double kPi = std::numbers::pi;
}

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::ConvergenceTime: return "convergence-time";
    case Scenario::ConvergenceSpace: return "convergence-space";
    case Scenario::Cavity: return "cavity";
    case Scenario::AdaptiveCompare: return "adaptive-compare";
  }
  return "cavity";
}

Scenario parse_scenario(const std::string& name) {
  for (Scenario s : {Scenario::ConvergenceTime, Scenario::ConvergenceSpace, Scenario::Cavity, Scenario::AdaptiveCompare}) {
    if (name == scenario_name(s)) return s;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

// ---------------------------------------------------------------------------
// Configuration

void ScenarioConfig::validate() const {
  params.validate();
  if (!(theta >= 0.0 && theta <= 1.0)) throw ParameterError("config: theta must lie in [0,1]");
  if (mesh_n < 1 || mesh_coarse < 1) throw ConfigError("config: mesh sizes must be positive");
  if (space_levels < 2 || time_levels < 2) throw ConfigError("config: convergence studies need at least two levels");
  if (!(t_end > 0.0)) throw ConfigError("config: t_end must be positive");
  if (!(dt > 0.0) || !(dt_coarse > 0.0)) throw ConfigError("config: time steps must be positive");
  if (constant_steps < 0) throw ConfigError("config: constant_steps must be nonnegative");
  for (double r : reynolds) {
    if (!(r > 0.0)) throw ConfigError("config: Reynolds numbers must be positive");
  }
  for (double t : snapshot_times) {
    if (t < 0.0 || t > t_end + 1e-12) throw ConfigError("config: snapshot time outside [0, t_end]");
  }
  if (scenario == Scenario::AdaptiveCompare) {
    adaptive.validate();
    if (reynolds.empty()) throw ConfigError("config: adaptive comparison needs at least one Reynolds number");
  }
  if ((scenario == Scenario::Cavity || scenario == Scenario::AdaptiveCompare) && !seed) {
    throw ConfigError("config: scenario '" + std::string(scenario_name(scenario)) + "' requires a seed");
  }
}

PhysicalParams cavity_params() {
  PhysicalParams p;
  p.mu = 0.045;
  p.nu = 0.003;
  p.lambda = 0.5;
  p.rho = -0.81;
  p.gamma = p.mu * p.mu * p.mu;
  p.sigma = 1.0;
  p.kappa = 1.0;
  p.xi = Vec2(0.0, 1.0);
  return p;
}

ScenarioConfig default_config(Scenario s, bool full_scale) {
  ScenarioConfig c;
  c.scenario = s;
  c.full_scale = full_scale;
  switch (s) {
    case Scenario::ConvergenceTime:
      c.mesh_n = full_scale ? 128 : 64;
      c.t_end = full_scale ? 1.0 : 0.5;
      c.dt_coarse = 0.25;
      c.time_levels = 4;
      break;
    case Scenario::ConvergenceSpace:
      c.mesh_coarse = 8;
      c.space_levels = 4;
      c.mesh_n = 64;
      c.dt = full_scale ? 1e-5 : 1e-3;
      c.t_end = full_scale ? 1.0 : 0.1;
      break;
    case Scenario::Cavity:
      c.params = cavity_params();
      c.mesh_n = 64;
      c.dt = 0.01;
      c.t_end = 1.0;
      c.snapshot_times = {0.0, 0.15, 0.30, 1.00};
      break;
    case Scenario::AdaptiveCompare:
      c.params = cavity_params();
      c.mesh_n = full_scale ? 64 : 8;
      c.t_end = 2.0;
      c.reynolds = full_scale ? std::vector<double>{5e2, 5e3, 5e4, 5e5, 5e6, 5e7} : std::vector<double>{5e2, 5e4, 5e6};
      c.constant_steps = 20000;
      break;
  }
  return c;
}

namespace {

using nlohmann::json;

const char* temperature_name(CavityInitialTemperature t) {
  return t == CavityInitialTemperature::Linear ? "linear" : "zero_lift";
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

ScenarioConfig config_from_json(const std::string& text, const ScenarioConfig& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  static const char* const kKeys[] = {"scenario",  "theta",         "mu",          "gamma",        "nu",
                                      "rho",       "lambda",        "sigma",       "kappa",        "xi_x",
                                      "xi_y",      "mesh_n",        "mesh_coarse", "space_levels", "t_end",
                                      "dt",        "dt_coarse",     "time_levels", "k_min",        "k_max",
                                      "delta",     "k0",            "reynolds",    "constant_steps",
                                      "initial_temperature",        "snapshot_times",
                                      "seed",      "out",           "full_scale"};
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : kKeys) known = known || key == k;
    if (!known) throw ConfigError("config: unknown key '" + key + "'");
    if (value.is_object()) throw ConfigError("config: nested objects are not supported ('" + key + "')");
  }

  ScenarioConfig c = base;
  if (j.contains("scenario")) {
    std::string s;
    read(j, "scenario", s);
    c.scenario = parse_scenario(s);
  }
  read(j, "theta", c.theta);
  read(j, "mu", c.params.mu);
  read(j, "gamma", c.params.gamma);
  read(j, "nu", c.params.nu);
  read(j, "rho", c.params.rho);
  read(j, "lambda", c.params.lambda);
  read(j, "sigma", c.params.sigma);
  read(j, "kappa", c.params.kappa);
  read(j, "xi_x", c.params.xi.x());
  read(j, "xi_y", c.params.xi.y());
  read(j, "mesh_n", c.mesh_n);
  read(j, "mesh_coarse", c.mesh_coarse);
  read(j, "space_levels", c.space_levels);
  read(j, "t_end", c.t_end);
  read(j, "dt", c.dt);
  read(j, "dt_coarse", c.dt_coarse);
  read(j, "time_levels", c.time_levels);
  read(j, "k_min", c.adaptive.k_min);
  read(j, "k_max", c.adaptive.k_max);
  read(j, "delta", c.adaptive.delta);
  read(j, "k0", c.adaptive.k0);
  read(j, "reynolds", c.reynolds);
  read(j, "constant_steps", c.constant_steps);
  if (j.contains("initial_temperature")) {
    std::string s;
    read(j, "initial_temperature", s);
    if (s == "linear") {
      c.initial_temperature = CavityInitialTemperature::Linear;
    } else if (s == "zero_lift") {
      c.initial_temperature = CavityInitialTemperature::ZeroWithLift;
    } else {
      throw ConfigError("config: initial_temperature must be 'linear' or 'zero_lift'");
    }
  }
  read(j, "snapshot_times", c.snapshot_times);
  if (j.contains("seed")) {
    if (j.at("seed").is_null()) {
      c.seed.reset();
    } else {
      std::uint64_t s = 0;
      read(j, "seed", s);
      c.seed = s;
    }
  }
  read(j, "out", c.out_dir);
  read(j, "full_scale", c.full_scale);
  return c;
}

ScenarioConfig config_from_json(const std::string& text) { return config_from_json(text, ScenarioConfig{}); }

std::string config_to_json(const ScenarioConfig& c) {
  json j;
  j["scenario"] = scenario_name(c.scenario);
  j["theta"] = c.theta;
  j["mu"] = c.params.mu;
  j["gamma"] = c.params.gamma;
  j["nu"] = c.params.nu;
  j["rho"] = c.params.rho;
  j["lambda"] = c.params.lambda;
  j["sigma"] = c.params.sigma;
  j["kappa"] = c.params.kappa;
  j["xi_x"] = c.params.xi.x();
  j["xi_y"] = c.params.xi.y();
  j["mesh_n"] = c.mesh_n;
  j["mesh_coarse"] = c.mesh_coarse;
  j["space_levels"] = c.space_levels;
  j["t_end"] = c.t_end;
  j["dt"] = c.dt;
  j["dt_coarse"] = c.dt_coarse;
  j["time_levels"] = c.time_levels;
  j["k_min"] = c.adaptive.k_min;
  j["k_max"] = c.adaptive.k_max;
  j["delta"] = c.adaptive.delta;
  j["k0"] = c.adaptive.k0;
  j["reynolds"] = c.reynolds;
  j["constant_steps"] = c.constant_steps;
  j["initial_temperature"] = temperature_name(c.initial_temperature);
  j["snapshot_times"] = c.snapshot_times;
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["out"] = c.out_dir;
  j["full_scale"] = c.full_scale;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Manufactured solution

ManufacturedValues manufactured_solution(double t, double x, double y) {
  const double a = 2 * kPi * x, b = 2 * kPi * y;
  const double sa = std::sin(a), ca = std::cos(a), sb = std::sin(b), cb = std::cos(b);
  const double e = std::exp(2 * t);
  const double pi2 = kPi * kPi, pi3 = pi2 * kPi, pi4 = pi2 * pi2;
  ManufacturedValues v;

  // -cos(2 pi x + pi) = cos(2 pi x).
  v.u = Vec2((ca - 1) * sb, -sa * cb) * e;
  v.u_t = 2 * v.u;
  v.grad_u << -2 * kPi * sa * sb, 2 * kPi * (ca - 1) * cb,
              -2 * kPi * ca * cb, 2 * kPi * sa * sb;
  v.grad_u *= e;
  v.lap_u = Vec2(-8 * pi2 * ca * sb + 4 * pi2 * sb, 8 * pi2 * sa * cb) * e;

  v.w = Vec2(-3 * x * x + 3 * y * y + 8 * pi2 * sb * ca - 4 * pi2 * sb, 6 * x * y - 8 * pi2 * sa * cb) * e;
  v.grad_w << -6 * x - 16 * pi3 * sa * sb, 6 * y + 16 * pi3 * ca * cb - 8 * pi3 * cb,
              6 * y - 16 * pi3 * ca * cb, 6 * x + 16 * pi3 * sa * sb;
  v.grad_w *= e;
  v.lap_w = Vec2(-64 * pi4 * ca * sb + 16 * pi4 * sb, 64 * pi4 * sa * cb) * e;

  v.phi = (x * x * x - 3 * x * y * y) * e;
  v.grad_phi = Vec2(3 * x * x - 3 * y * y, -6 * x * y) * e;

  const double c = 3 * pi2;
  const double em = std::exp(-t);
  v.p = std::sin(c * x) * std::cos(c * y) * em;
  v.grad_p = Vec2(c * std::cos(c * x) * std::cos(c * y), -c * std::sin(c * x) * std::sin(c * y)) * em;

  v.T = ((ca - 1) * sb - sa * cb) * e;
  v.T_t = 2 * v.T;
  v.grad_T = Vec2(-2 * kPi * sa * sb - 2 * kPi * ca * cb, 2 * kPi * (ca - 1) * cb + 2 * kPi * sa * sb) * e;
  v.lap_T = (-8 * pi2 * ca * sb + 4 * pi2 * sb + 8 * pi2 * sa * cb) * e;
  return v;
}

Vec2 manufactured_momentum_source(const PhysicalParams& prm, double t, double x, double y) {
  const ManufacturedValues v = manufactured_solution(t, x, y);
  return v.u_t - prm.mu * v.lap_u - prm.gamma * v.lap_w + prm.nu * (v.grad_u * v.u) + prm.rho * v.u +
         prm.lambda * v.u.squaredNorm() * v.u + v.grad_p - prm.sigma * v.T * prm.xi;
}

double manufactured_temperature_source(const PhysicalParams& prm, double t, double x, double y) {
  const ManufacturedValues v = manufactured_solution(t, x, y);
  return v.T_t - prm.kappa * v.lap_T + v.u.dot(v.grad_T);
}

ProblemSetup manufactured_setup(const PhysicalParams& prm) {
  ProblemSetup s;
  s.params = prm;
  s.temp_dirichlet = [](BoundaryTag) { return true; };
  s.u_boundary = [](double x, double y, double t) { return manufactured_solution(t, x, y).u; };
  s.w_boundary = [](double x, double y, double t) { return manufactured_solution(t, x, y).w; };
  s.temp_boundary = [](double x, double y, double t) { return manufactured_solution(t, x, y).T; };
  s.f = [prm](double x, double y, double t) { return manufactured_momentum_source(prm, t, x, y); };
  s.g = [prm](double x, double y, double t) { return manufactured_temperature_source(prm, t, x, y); };
  return s;
}

AnalyticInitial manufactured_initial(double t) {
  AnalyticInitial a;
  a.u = {[t](double x, double y) { return manufactured_solution(t, x, y).u; },
         [t](double x, double y) { return manufactured_solution(t, x, y).grad_u; }};
  a.w = {[t](double x, double y) { return manufactured_solution(t, x, y).w; },
         [t](double x, double y) { return manufactured_solution(t, x, y).grad_w; }};
  a.phi = {[t](double x, double y) { return manufactured_solution(t, x, y).phi; },
           [t](double x, double y) { return manufactured_solution(t, x, y).grad_phi; }};
  a.p = {[t](double x, double y) { return manufactured_solution(t, x, y).p; },
         [t](double x, double y) { return manufactured_solution(t, x, y).grad_p; }};
  a.T = {[t](double x, double y) { return manufactured_solution(t, x, y).T; },
         [t](double x, double y) { return manufactured_solution(t, x, y).grad_T; }};
  return a;
}

ProblemSetup cavity_setup(const PhysicalParams& prm) {
  ProblemSetup s;
  s.params = prm;
  s.temp_dirichlet = [](BoundaryTag tag) { return tag == BoundaryTag::Gamma1Left || tag == BoundaryTag::Gamma1Right; };
  s.temp_boundary = [](double x, double, double) { return 0.5 - x; };
  return s;
}

void DivergenceMonitor::observe(const State& s, const SparseMatrix& divergence) {
  const DivergenceResidual r = divergence_residual(s, divergence);
  max_u = std::max(max_u, r.u);
  max_w = std::max(max_w, r.w);
  ++steps;
}

// ---------------------------------------------------------------------------
// Runs

namespace {

std::shared_ptr<const Mesh> unit_square(int n, TaggingScheme scheme) {
  return std::make_shared<const Mesh>(tag_boundary(build_structured_mesh(n, n), scheme));
}

int constant_step_count(double dt, double t_end) {
  const double n = t_end / dt;
  const long long k = std::llround(n);
  if (k < 1 || std::abs(n - static_cast<double>(k)) > 1e-9 * n) {
    throw ConfigError("time step does not divide the time interval");
  }
  return static_cast<int>(k);
}

void require_converged(const StepReport& r, double t) {
  if (!r.converged) {
    throw NewtonError("Newton iteration did not converge in " + std::to_string(r.newton_iterations) +
                      " iterations at t=" + std::to_string(t) + " (residual " + std::to_string(r.final_residual) + ")");
  }
}

// Bootstrap plus constant DLN steps; returns the final state.
State run_constant(Stepper& stepper, const State& s0, double dt, int n_steps, double theta,
                   const std::function<void(const State&, const State&, const State&, const StepReport&)>& observer) {
  StepResult first = stepper.bootstrap_cn(s0, dt);
  require_converged(first.report, first.state.t);
  if (observer) observer(s0, s0, first.state, first.report);
  State prev = s0;
  State curr = std::move(first.state);
  const double t0 = s0.t;
  for (int n = 1; n < n_steps; ++n) {
    const double t_next = t0 + (n + 1) * dt;
    StepResult r = stepper.dln_step(prev, curr, t_next - curr.t, theta);
    require_converged(r.report, r.state.t);
    if (observer) observer(prev, curr, r.state, r.report);
    prev = std::move(curr);
    curr = std::move(r.state);
  }
  return curr;
}

struct FieldErrors {
  double l2[5];
  double h1[5];
};

FieldErrors manufactured_errors(const Problem& pb, const State& s, bool with_h1) {
  const double t = s.t;
  const AnalyticInitial ex = manufactured_initial(t);
  FieldErrors e{};
  e.l2[0] = l2_error(pb.vel_space(), s.u, ex.u.value);
  e.l2[1] = l2_error(pb.vel_space(), s.w, ex.w.value);
  e.l2[2] = l2_error(pb.pres_space(), s.phi, ex.phi.value, true);
  e.l2[3] = l2_error(pb.pres_space(), s.p, ex.p.value, true);
  e.l2[4] = l2_error(pb.temp_space(), s.T, ex.T.value);
  if (with_h1) {
    e.h1[0] = h1_error(pb.vel_space(), s.u, ex.u);
    e.h1[1] = h1_error(pb.vel_space(), s.w, ex.w);
    e.h1[2] = h1_error(pb.pres_space(), s.phi, ex.phi, true);
    e.h1[3] = h1_error(pb.pres_space(), s.p, ex.p, true);
    e.h1[4] = h1_error(pb.temp_space(), s.T, ex.T);
  }
  return e;
}

const std::vector<std::string> kFields = {"u", "w", "phi", "p", "T"};

std::string snapshot_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshot_t%.2f.vtk", t);
  return buf;
}

std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

ScalarField cavity_initial_temperature(CavityInitialTemperature kind) {
  if (kind == CavityInitialTemperature::Linear) {
    return {[](double x, double) { return 0.5 - x; }, [](double, double) { return Vec2(-1.0, 0.0); }};
  }
  // Zero inside; the Dirichlet walls keep their values.
  return {[](double x, double) {
            if (x <= 1e-12) return 0.5;
            if (x >= 1.0 - 1e-12) return -0.5;
            return 0.0;
          },
          [](double, double) { return Vec2(0.0, 0.0); }};
}

State cavity_initial_state(const Problem& pb, const ScenarioConfig& cfg) {
  State s = initialize_random(pb, *cfg.seed, cavity_initial_temperature(cfg.initial_temperature));
  if (cfg.initial_temperature == CavityInitialTemperature::ZeroWithLift) {
    s.T = pb.temp_trace(0.0);
  }
  return s;
}

}  // namespace

ConvergenceResult run_convergence_time(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto mesh = unit_square(cfg.mesh_n, TaggingScheme::AllDirichlet);
  const Problem pb(mesh, manufactured_setup(cfg.params));
  const State s0 = initialize(pb, manufactured_initial(0.0));
  ConvergenceResult res;
  std::vector<double> dts;
  std::vector<std::vector<double>> errs;
  Stepper stepper(pb);
  for (int level = 0; level < cfg.time_levels; ++level) {
    const double dt = cfg.dt_coarse / std::pow(2.0, level);
    const int n = constant_step_count(dt, cfg.t_end);
    const State fin = run_constant(stepper, s0, dt, n, cfg.theta,
                                   [&](const State&, const State&, const State& s, const StepReport&) {
                                     res.divergence.observe(s, pb.divergence());
                                   });
    const FieldErrors e = manufactured_errors(pb, fin, false);
    dts.push_back(dt);
    errs.emplace_back(e.l2, e.l2 + 5);
  }
  res.l2 = compute_rates(kFields, dts, errs);
  return res;
}

ConvergenceResult run_convergence_space(const ScenarioConfig& cfg) {
  cfg.validate();
  ConvergenceResult res;
  std::vector<double> hs;
  std::vector<std::vector<double>> l2, h1;
  const int n_steps = constant_step_count(cfg.dt, cfg.t_end);
  for (int level = 0; level < cfg.space_levels; ++level) {
    const int n = cfg.mesh_coarse << level;
    const auto mesh = unit_square(n, TaggingScheme::AllDirichlet);
    const Problem pb(mesh, manufactured_setup(cfg.params));
    Stepper stepper(pb);
    const State s0 = initialize(pb, manufactured_initial(0.0));
    const State fin = run_constant(stepper, s0, cfg.dt, n_steps, cfg.theta,
                                   [&](const State&, const State&, const State& s, const StepReport&) {
                                     res.divergence.observe(s, pb.divergence());
                                   });
    const FieldErrors e = manufactured_errors(pb, fin, true);
    hs.push_back(1.0 / n);
    l2.emplace_back(e.l2, e.l2 + 5);
    h1.emplace_back(e.h1, e.h1 + 5);
  }
  res.l2 = compute_rates(kFields, hs, l2);
  res.h1 = compute_rates(kFields, hs, h1);
  return res;
}

CavityResult run_cavity(const ScenarioConfig& cfg) {
  cfg.validate();
  ensure_dir(cfg.out_dir);
  const auto mesh = unit_square(cfg.mesh_n, TaggingScheme::Cavity);
  const Problem pb(mesh, cavity_setup(cfg.params));
  Stepper stepper(pb);
  const State s0 = cavity_initial_state(pb, cfg);
  const int n_steps = constant_step_count(cfg.dt, cfg.t_end);

  CavityResult res;
  std::vector<StepLogEntry> steps;
  auto snapshot = [&](const State& s) {
    if (cfg.out_dir.empty()) return;
    for (double ts : cfg.snapshot_times) {
      if (std::abs(ts - s.t) <= 1e-9) {
        const std::string path = join(cfg.out_dir, snapshot_name(ts));
        export_fields(pb, s, path);
        res.snapshots.push_back(path);
      }
    }
  };
  const DivergenceResidual d0 = divergence_residual(s0, pb.divergence());
  res.log.push_back({s0.t, energy(pb, s0), 0, d0.u, d0.w});
  snapshot(s0);
  res.final_state = run_constant(stepper, s0, cfg.dt, n_steps, cfg.theta,
                                 [&](const State& prev, const State& curr, const State& s, const StepReport& r) {
                                   const DivergenceResidual d = divergence_residual(s, pb.divergence());
                                   res.divergence.observe(s, pb.divergence());
                                   res.log.push_back({s.t, energy(pb, s), r.newton_iterations, d.u, d.w});
                                   StepLogEntry e;
                                   e.t = s.t;
                                   e.k = s.t - curr.t;
                                   if (curr.t > prev.t) {
                                     const DissipationIndicators ind = indicators(pb, prev, curr, s, cfg.theta);
                                     e.chi_u = ind.chi_u;
                                     e.chi_T = ind.chi_T;
                                   }
                                   e.energy = res.log.back().energy;
                                   e.newton_iters = r.newton_iterations;
                                   e.div_u = d.u;
                                   e.div_w = d.w;
                                   steps.push_back(e);
                                   snapshot(s);
                                 });
  if (!cfg.out_dir.empty()) {
    std::ofstream out(join(cfg.out_dir, "energy.csv"));
    if (!out) throw IoError("cannot write energy.csv");
    out << "t,energy,newton_iters,div_u,div_w\n" << std::setprecision(12);
    for (const auto& e : res.log) out << e.t << "," << e.energy << "," << e.newton_iters << "," << e.div_u << "," << e.div_w << "\n";
    write_step_log_csv(steps, join(cfg.out_dir, "steps.csv"));
  }
  return res;
}

std::vector<ReynoldsComparison> run_adaptive_compare(const ScenarioConfig& cfg) {
  cfg.validate();
  ensure_dir(cfg.out_dir);
  const auto mesh = unit_square(cfg.mesh_n, TaggingScheme::Cavity);
  std::vector<ReynoldsComparison> out;
  for (double re : cfg.reynolds) {
    PhysicalParams prm = cfg.params;
    prm.mu = 1.0 / re;
    const Problem pb(mesh, cavity_setup(prm));
    Stepper stepper(pb);
    const State s0 = cavity_initial_state(pb, cfg);

    ReynoldsComparison cmp;
    cmp.reynolds = re;
    StepResult first = stepper.bootstrap_cn(s0, cfg.adaptive.k0);
    require_converged(first.report, first.state.t);
    cmp.divergence.observe(first.state, pb.divergence());
    cmp.initial_energy = std::max(energy(pb, s0), energy(pb, first.state));
    const AdaptiveResult ad = run_adaptive(stepper, s0, first.state, cfg.t_end, cfg.adaptive, cfg.theta);
    cmp.adaptive_steps = ad.step_count;
    cmp.adaptive_final_t = ad.final_state.t;
    cmp.adaptive_max_energy = cmp.initial_energy;
    for (const auto& e : ad.log) {
      cmp.adaptive_max_energy = std::max(cmp.adaptive_max_energy, e.energy);
      cmp.divergence.max_u = std::max(cmp.divergence.max_u, e.div_u);
      cmp.divergence.max_w = std::max(cmp.divergence.max_w, e.div_w);
      ++cmp.divergence.steps;
    }
    if (!cfg.out_dir.empty()) {
      char name[64];
      std::snprintf(name, sizeof name, "steps_re%.0f.csv", re);
      write_step_log_csv(ad.log, join(cfg.out_dir, name));
    }

    if (cfg.constant_steps > 0) {
      const double dt = cfg.t_end / cfg.constant_steps;
      cmp.constant_max_energy = cmp.initial_energy;
      const State fin = run_constant(stepper, s0, dt, cfg.constant_steps, cfg.theta,
                                     [&](const State&, const State&, const State& s, const StepReport&) {
                                       cmp.constant_max_energy = std::max(cmp.constant_max_energy, energy(pb, s));
                                       cmp.divergence.observe(s, pb.divergence());
                                     });
      cmp.constant_steps = cfg.constant_steps;
      cmp.constant_final_t = fin.t;
    }
    out.push_back(cmp);
  }
  if (!cfg.out_dir.empty()) {
    std::ofstream f(join(cfg.out_dir, "comparison.csv"));
    if (!f) throw IoError("cannot write comparison.csv");
    f << "reynolds,adaptive_steps,constant_steps,adaptive_final_t,constant_final_t,adaptive_max_energy,"
         "constant_max_energy,initial_energy\n"
      << std::setprecision(12);
    for (const auto& c : out) {
      f << c.reynolds << "," << c.adaptive_steps << "," << c.constant_steps << "," << c.adaptive_final_t << ","
        << c.constant_final_t << "," << c.adaptive_max_energy << "," << c.constant_max_energy << ","
        << c.initial_energy << "\n";
    }
  }
  return out;
}

namespace {

json rate_json(const RateTable& t) {
  json rows = json::array();
  for (size_t r = 0; r < t.rows.size(); ++r) {
    json row;
    row["resolution"] = 1.0 / t.rows[r].resolution;
    for (size_t f = 0; f < t.fields.size(); ++f) {
      row["err_" + t.fields[f]] = t.rows[r].errors[f];
      const auto& rate = t.rows[r].rates[f];
      row["rate_" + t.fields[f]] = rate ? json(*rate) : json(nullptr);
    }
    rows.push_back(row);
  }
  return rows;
}

json divergence_json(const DivergenceMonitor& d) {
  return json{{"max_div_u", d.max_u}, {"max_div_w", d.max_w}, {"steps", d.steps}};
}

}  // namespace

std::string run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  ensure_dir(cfg.out_dir);
  json summary;
  summary["scenario"] = scenario_name(cfg.scenario);
  switch (cfg.scenario) {
    case Scenario::ConvergenceTime: {
      const ConvergenceResult r = run_convergence_time(cfg);
      write_rate_csv(r.l2, join(cfg.out_dir, "rates_time.csv"));
      summary["l2"] = rate_json(r.l2);
      summary["divergence"] = divergence_json(r.divergence);
      break;
    }
    case Scenario::ConvergenceSpace: {
      const ConvergenceResult r = run_convergence_space(cfg);
      write_rate_csv(r.l2, join(cfg.out_dir, "rates_space_l2.csv"));
      write_rate_csv(r.h1, join(cfg.out_dir, "rates_space_h1.csv"));
      summary["l2"] = rate_json(r.l2);
      summary["h1"] = rate_json(r.h1);
      summary["divergence"] = divergence_json(r.divergence);
      break;
    }
    case Scenario::Cavity: {
      const CavityResult r = run_cavity(cfg);
      double e_max = 0.0;
      for (const auto& e : r.log) e_max = std::max(e_max, e.energy);
      summary["steps"] = static_cast<int>(r.log.size()) - 1;
      summary["final_t"] = r.final_state.t;
      summary["initial_energy"] = r.log.front().energy;
      summary["final_energy"] = r.log.back().energy;
      summary["max_energy"] = e_max;
      summary["snapshots"] = r.snapshots;
      summary["divergence"] = divergence_json(r.divergence);
      break;
    }
    case Scenario::AdaptiveCompare: {
      json rows = json::array();
      for (const auto& c : run_adaptive_compare(cfg)) {
        rows.push_back({{"reynolds", c.reynolds},
                        {"adaptive_steps", c.adaptive_steps},
                        {"constant_steps", c.constant_steps},
                        {"adaptive_final_t", c.adaptive_final_t},
                        {"constant_final_t", c.constant_final_t},
                        {"adaptive_max_energy", c.adaptive_max_energy},
                        {"constant_max_energy", c.constant_max_energy},
                        {"initial_energy", c.initial_energy},
                        {"divergence", divergence_json(c.divergence)}});
      }
      summary["runs"] = rows;
      break;
    }
  }
  return summary.dump();
}

}  // namespace tdaf
