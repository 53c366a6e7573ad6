#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include <json.hpp>

#include "tdaf/errors.hpp"
#include "tdaf/scenarios.hpp"

using namespace tdaf;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tdaf_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("manufactured solution values") {
  const ManufacturedValues v = manufactured_solution(0.0, 0.25, 0.25);
  CHECK(v.u.x() == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(std::abs(v.u.y()) < 1e-15);
  const ManufacturedValues b = manufactured_solution(0.0, 0.0, 0.3);
  CHECK(b.u.norm() < 1e-14);
  CHECK(manufactured_solution(0.5, 0.3, 0.7).u.norm() ==
        doctest::Approx(std::exp(1.0) * manufactured_solution(0.0, 0.3, 0.7).u.norm()));
}

TEST_CASE("manufactured derivatives agree with finite differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const double h = 1e-4;
  for (int k = 0; k < 100; ++k) {
    const double x = u(rng), y = u(rng), t = 0.5 * u(rng);
    const ManufacturedValues v = manufactured_solution(t, x, y);
    const auto at = [&](double dx, double dy) { return manufactured_solution(t, x + dx, y + dy); };
    const ManufacturedValues xp = at(h, 0), xm = at(-h, 0), yp = at(0, h), ym = at(0, -h);
    const ManufacturedValues tp = manufactured_solution(t + h, x, y), tm = manufactured_solution(t - h, x, y);

    const double scale_u = 1.0 + v.u.norm();
    CHECK(((tp.u - tm.u) / (2 * h) - v.u_t).norm() <= 1e-5 * scale_u * 40);
    CHECK(std::abs((tp.T - tm.T) / (2 * h) - v.T_t) <= 1e-5 * 40);

    Mat2 gu, gw;
    gu.col(0) = (xp.u - xm.u) / (2 * h);
    gu.col(1) = (yp.u - ym.u) / (2 * h);
    gw.col(0) = (xp.w - xm.w) / (2 * h);
    gw.col(1) = (yp.w - ym.w) / (2 * h);
    CHECK((gu - v.grad_u).norm() <= 1e-5 * (1.0 + v.grad_u.norm()));
    CHECK((gw - v.grad_w).norm() <= 1e-5 * (1.0 + v.grad_w.norm()));

    const Vec2 lu = (xp.u + xm.u + yp.u + ym.u - 4 * v.u) / (h * h);
    const Vec2 lw = (xp.w + xm.w + yp.w + ym.w - 4 * v.w) / (h * h);
    CHECK((lu - v.lap_u).norm() <= 1e-4 * (1.0 + v.lap_u.norm()));
    CHECK((lw - v.lap_w).norm() <= 1e-4 * (1.0 + v.lap_w.norm()));
    const double lt = (xp.T + xm.T + yp.T + ym.T - 4 * v.T) / (h * h);
    CHECK(std::abs(lt - v.lap_T) <= 1e-4 * (1.0 + std::abs(v.lap_T)));

    const Vec2 gphi((xp.phi - xm.phi) / (2 * h), (yp.phi - ym.phi) / (2 * h));
    const Vec2 gp((xp.p - xm.p) / (2 * h), (yp.p - ym.p) / (2 * h));
    const Vec2 gt((xp.T - xm.T) / (2 * h), (yp.T - ym.T) / (2 * h));
    CHECK((gphi - v.grad_phi).norm() <= 1e-5 * (1.0 + v.grad_phi.norm()));
    CHECK((gp - v.grad_p).norm() <= 1e-5 * (1.0 + v.grad_p.norm()));
    CHECK((gt - v.grad_T).norm() <= 1e-5 * (1.0 + v.grad_T.norm()));

    // Solenoidal fields and the w-relation w + grad phi = -Lap u.
    CHECK(std::abs(v.grad_u.trace()) <= 1e-12 * (1.0 + v.grad_u.norm()));
    CHECK(std::abs(v.grad_w.trace()) <= 1e-11 * (1.0 + v.grad_w.norm()));
    CHECK((v.w + v.grad_phi + v.lap_u).norm() <= 1e-11 * (1.0 + v.lap_u.norm()));
  }
}

TEST_CASE("manufactured sources match the residual of the closed forms") {
  PhysicalParams prm;
  prm.rho = -0.5;
  prm.mu = 0.3;
  prm.gamma = 0.02;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int k = 0; k < 50; ++k) {
    const double x = u(rng), y = u(rng), t = u(rng);
    const ManufacturedValues v = manufactured_solution(t, x, y);
    const Vec2 adv(v.u.x() * v.grad_u(0, 0) + v.u.y() * v.grad_u(0, 1), v.u.x() * v.grad_u(1, 0) + v.u.y() * v.grad_u(1, 1));
    const Vec2 f = v.u_t - prm.mu * v.lap_u - prm.gamma * v.lap_w + prm.nu * adv + prm.rho * v.u +
                   prm.lambda * v.u.squaredNorm() * v.u + v.grad_p - prm.sigma * v.T * prm.xi;
    CHECK((manufactured_momentum_source(prm, t, x, y) - f).norm() <= 1e-10 * (1.0 + f.norm()));
    const double g = v.T_t - prm.kappa * v.lap_T + v.u.x() * v.grad_T.x() + v.u.y() * v.grad_T.y();
    CHECK(manufactured_temperature_source(prm, t, x, y) == doctest::Approx(g).epsilon(1e-12));
  }
}

TEST_CASE("scenario names") {
  for (Scenario s : {Scenario::ConvergenceTime, Scenario::ConvergenceSpace, Scenario::Cavity, Scenario::AdaptiveCompare}) {
    CHECK(parse_scenario(scenario_name(s)) == s);
  }
  CHECK_THROWS_AS(parse_scenario("cavity2"), ConfigError);
}

TEST_CASE("configuration JSON") {
  ScenarioConfig c = default_config(Scenario::AdaptiveCompare);
  c.seed = 42;
  c.theta = 0.7;
  c.reynolds = {10.0, 20.0};
  c.out_dir = "somewhere";
  const ScenarioConfig r = config_from_json(config_to_json(c));
  CHECK(r.scenario == Scenario::AdaptiveCompare);
  CHECK(r.theta == 0.7);
  CHECK(r.reynolds == c.reynolds);
  CHECK(r.seed == c.seed);
  CHECK(r.out_dir == "somewhere");
  CHECK(r.params.rho == c.params.rho);
  CHECK(r.params.gamma == c.params.gamma);
  CHECK(r.mesh_n == c.mesh_n);
  CHECK(config_to_json(r) == config_to_json(c));

  const ScenarioConfig m = config_from_json(R"({"mesh_n": 5})", c);
  CHECK(m.mesh_n == 5);
  CHECK(m.theta == 0.7);
  CHECK(config_from_json(R"({"seed": null})", c).seed == std::nullopt);

  CHECK_THROWS_AS(config_from_json(R"({"bogus": 1})", c), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"mu": {"a": 1}})", c), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"mu": "x"})", c), ConfigError);
  CHECK_THROWS_AS(config_from_json("[1, 2]", c), ConfigError);
  CHECK_THROWS_AS(config_from_json("{", c), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"initial_temperature": "hot"})", c), ConfigError);
}

TEST_CASE("configuration validation") {
  ScenarioConfig c = default_config(Scenario::Cavity);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.seed = 1;
  CHECK_NOTHROW(c.validate());
  c.snapshot_times = {2.0};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = default_config(Scenario::ConvergenceTime);
  CHECK_NOTHROW(c.validate());
  c.theta = 1.5;
  CHECK_THROWS_AS(c.validate(), ParameterError);
  c = default_config(Scenario::ConvergenceSpace);
  c.space_levels = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = default_config(Scenario::AdaptiveCompare);
  c.seed = 1;
  c.reynolds.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);

  const ScenarioConfig a = default_config(Scenario::AdaptiveCompare);
  CHECK(a.reynolds == std::vector<double>{5e2, 5e4, 5e6});
  CHECK(a.constant_steps == 20000);
  CHECK(a.t_end == 2.0);
  CHECK(default_config(Scenario::AdaptiveCompare, true).reynolds.size() == 6);
  const PhysicalParams p = cavity_params();
  CHECK(p.rho == -0.81);
  CHECK(p.gamma == doctest::Approx(0.045 * 0.045 * 0.045));
}

TEST_CASE("tiny cavity run is deterministic and writes its files") {
  ScenarioConfig c = default_config(Scenario::Cavity);
  c.mesh_n = 3;
  c.dt = 0.01;
  c.t_end = 0.03;
  c.snapshot_times = {0.0, 0.02};
  c.seed = 42;
  const fs::path dir = fresh_dir("cavity");
  c.out_dir = dir.string();
  const CavityResult a = run_cavity(c);
  CHECK(a.log.size() == 4);
  CHECK(a.log.front().t == 0.0);
  CHECK(a.final_state.t == doctest::Approx(0.03));
  CHECK(a.snapshots.size() == 2);
  CHECK(a.divergence.max_u <= 1e-9);
  CHECK(a.divergence.max_w <= 1e-9);
  CHECK(fs::exists(dir / "energy.csv"));
  CHECK(fs::exists(dir / "snapshot_t0.00.vtk"));
  CHECK(fs::exists(dir / "snapshot_t0.02.vtk"));

  c.out_dir.clear();
  const CavityResult b = run_cavity(c);
  CHECK((a.final_state.u - b.final_state.u).norm() == 0.0);
  CHECK((a.final_state.T - b.final_state.T).norm() == 0.0);

  c.seed = 43;
  CHECK((run_cavity(c).final_state.u - a.final_state.u).norm() > 0.0);
  fs::remove_all(dir);
}

TEST_CASE("run_scenario summaries on tiny configurations") {
  const fs::path dir = fresh_dir("summary");

  ScenarioConfig t = default_config(Scenario::ConvergenceTime);
  t.mesh_n = 2;
  t.t_end = 0.1;
  t.dt_coarse = 0.05;
  t.time_levels = 2;
  t.out_dir = (dir / "time").string();
  const auto jt = nlohmann::json::parse(run_scenario(t));
  CHECK(jt.contains("l2"));
  CHECK(fs::exists(dir / "time" / "rates_time.csv"));

  ScenarioConfig s = default_config(Scenario::ConvergenceSpace);
  s.mesh_coarse = 2;
  s.space_levels = 2;
  s.mesh_n = 4;
  s.dt = 0.01;
  s.t_end = 0.02;
  s.out_dir = (dir / "space").string();
  const auto js = nlohmann::json::parse(run_scenario(s));
  CHECK(js.contains("h1"));
  CHECK(fs::exists(dir / "space" / "rates_space_l2.csv"));
  CHECK(fs::exists(dir / "space" / "rates_space_h1.csv"));

  ScenarioConfig a = default_config(Scenario::AdaptiveCompare);
  a.mesh_n = 2;
  a.t_end = 0.01;
  a.reynolds = {100.0};
  a.constant_steps = 10;
  a.seed = 1;
  a.out_dir = (dir / "adaptive").string();
  const std::vector<ReynoldsComparison> runs = run_adaptive_compare(a);
  REQUIRE(runs.size() == 1);
  CHECK(runs[0].adaptive_final_t == doctest::Approx(0.01));
  CHECK(runs[0].constant_final_t == doctest::Approx(0.01));
  CHECK(runs[0].constant_steps == 10);
  CHECK(runs[0].adaptive_steps >= 2);
  CHECK(fs::exists(dir / "adaptive" / "comparison.csv"));
  CHECK(fs::exists(dir / "adaptive" / "steps_re100.csv"));
  const auto ja = nlohmann::json::parse(run_scenario(a));
  CHECK(ja.contains("runs"));
  fs::remove_all(dir);
}
