// Acceptance checks. Prints one PASS/FAIL line per criterion; arguments
// select a subset of criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tdaf/errors.hpp"
#include "tdaf/scenarios.hpp"

using namespace tdaf;

namespace {

constexpr std::uint64_t kSeed = 42;
constexpr double kDivergenceBound = 1e-9;
constexpr double kEnergyGrowth = 1e3;

int g_failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

void progress(const std::string& msg) {
  std::fprintf(stderr, "[acceptance] %s\n", msg.c_str());
  std::fflush(stderr);
}

struct DivergenceLedger {
  double max_u = 0.0;
  double max_w = 0.0;
  int steps = 0;
  std::vector<std::string> sources;
  void add(const std::string& name, const DivergenceMonitor& m) {
    max_u = std::max(max_u, m.max_u);
    max_w = std::max(max_w, m.max_w);
    steps += m.steps;
    sources.push_back(name);
  }
};

// Rates of `fields` on the last `pairs` rows must lie in [lo, hi].
bool rates_within(const RateTable& t, const std::vector<std::string>& fields, int pairs, double lo, double hi,
                  std::string& detail) {
  bool ok = true;
  const int last = static_cast<int>(t.rows.size()) - 1;
  for (const auto& f : fields) {
    for (int r = last - pairs + 1; r <= last; ++r) {
      const double v = t.rate(f, r);
      ok = ok && std::isfinite(v) && v >= lo && v <= hi;
      detail += " " + f + "@" + std::to_string(r) + "=" + fmt("%.3f", v);
    }
  }
  return ok;
}

void criterion_time(DivergenceLedger& div) {
  ScenarioConfig c = default_config(Scenario::ConvergenceTime);
  progress("time study: h=1/" + std::to_string(c.mesh_n) + ", t*=" + fmt("%g", c.t_end));
  try {
    const ConvergenceResult r = run_convergence_time(c);
    div.add("time study", r.divergence);
    std::string d = "L2 time rates in [1.7, 2.6]:";
    const bool ok = rates_within(r.l2, {"u", "w", "T"}, 2, 1.7, 2.6, d);
    report(1, ok, d);
  } catch (const std::exception& e) {
    report(1, false, std::string("time study failed: ") + e.what());
  }
}

void criterion_space(DivergenceLedger& div) {
  ScenarioConfig c = default_config(Scenario::ConvergenceSpace);
  progress("space study: h=1/" + std::to_string(c.mesh_coarse) + "..1/" + std::to_string(c.mesh_n));
  try {
    const ConvergenceResult r = run_convergence_space(c);
    div.add("space study", r.divergence);
    std::string d2 = "L2 space rates, u/w/T >= 2.7 and phi/p >= 1.8:";
    bool ok2 = rates_within(r.l2, {"u", "w", "T"}, 1, 2.7, INFINITY, d2);
    ok2 = rates_within(r.l2, {"phi", "p"}, 1, 1.8, INFINITY, d2) && ok2;
    report(2, ok2, d2);
    std::string d3 = "H1 space rates, u/w/T >= 1.8 and phi/p >= 0.85:";
    bool ok3 = rates_within(r.h1, {"u", "w", "T"}, 1, 1.8, INFINITY, d3);
    ok3 = rates_within(r.h1, {"phi", "p"}, 1, 0.85, INFINITY, d3) && ok3;
    report(3, ok3, d3);
  } catch (const std::exception& e) {
    report(2, false, std::string("space study failed: ") + e.what());
    report(3, false, std::string("space study failed: ") + e.what());
  }
}

void criterion_divergence(const DivergenceLedger& div) {
  std::string src;
  for (const auto& s : div.sources) src += (src.empty() ? "" : ", ") + s;
  const bool ok = div.steps > 0 && div.max_u <= kDivergenceBound && div.max_w <= kDivergenceBound;
  report(4, ok,
         "max |Bu| = " + fmt("%.2e", div.max_u) + ", max |Bw| = " + fmt("%.2e", div.max_w) + " over " +
             std::to_string(div.steps) + " steps (" + (src.empty() ? "no scenarios run" : src) + "), bound 1e-9");
}

void criterion_g_stability() {
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> th(0.0, 1.0), ep(-0.999, 0.999), u(-1.0, 1.0);
  std::uniform_int_distribution<int> dim(1, 16);
  double worst = 0.0;
  for (int s = 0; s < 1000; ++s) {
    const int n = dim(rng);
    Vector a(n), b(n), c(n);
    for (int i = 0; i < n; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      c[i] = u(rng);
    }
    const GStabilityCheck r = check_g_stability_identity(th(rng), ep(rng), a, b, c);
    worst = std::max(worst, r.scale > 0.0 ? r.residual / r.scale : r.residual);
  }
  report(5, worst <= 1e-12, "worst relative residual " + fmt("%.2e", worst) + " over 1000 samples, bound 1e-12");
}

void criterion_cavity(DivergenceLedger& div) {
  ScenarioConfig c = default_config(Scenario::Cavity);
  c.seed = kSeed;
  progress("cavity: h=1/" + std::to_string(c.mesh_n) + ", dt=" + fmt("%g", c.dt) + ", t in [0, " + fmt("%g", c.t_end) + "]");
  try {
    const CavityResult r = run_cavity(c);
    div.add("cavity", r.divergence);
    bool finite = true;
    double e_max = 0.0;
    for (const auto& e : r.log) {
      finite = finite && std::isfinite(e.energy);
      e_max = std::max(e_max, e.energy);
    }
    const double e01 = std::max(r.log.at(0).energy, r.log.at(1).energy);
    const bool reached = std::abs(r.final_state.t - c.t_end) <= 1e-9;
    const bool ok = finite && reached && e_max <= kEnergyGrowth * e01;
    report(6, ok,
           std::to_string(r.log.size() - 1) + " steps, max E = " + fmt("%.4e", e_max) + ", max(E0, E1) = " +
               fmt("%.4e", e01) + ", final t = " + fmt("%g", r.final_state.t) + ", no Newton failure");
  } catch (const NewtonError& e) {
    report(6, false, std::string("Newton failure: ") + e.what());
  } catch (const std::exception& e) {
    report(6, false, std::string("cavity run failed: ") + e.what());
  }
}

void criterion_adaptive(DivergenceLedger& div) {
  ScenarioConfig c = default_config(Scenario::AdaptiveCompare);
  c.seed = kSeed;
  progress("adaptive comparison: h=1/" + std::to_string(c.mesh_n) + ", " + std::to_string(c.reynolds.size()) +
           " Reynolds numbers, " + std::to_string(c.constant_steps) + " constant steps each");
  try {
    bool ok = true;
    std::string d;
    for (const ReynoldsComparison& r : run_adaptive_compare(c)) {
      div.add("adaptive Re=" + fmt("%g", r.reynolds), r.divergence);
      const bool steps_ok = r.adaptive_steps >= 400 && r.adaptive_steps <= 700;
      const bool reach = std::abs(r.adaptive_final_t - c.t_end) <= 1e-9 && std::abs(r.constant_final_t - c.t_end) <= 1e-9;
      const double bound = kEnergyGrowth * r.initial_energy;
      const bool bounded = std::isfinite(r.adaptive_max_energy) && std::isfinite(r.constant_max_energy) &&
                           r.adaptive_max_energy <= bound && r.constant_max_energy <= bound;
      ok = ok && steps_ok && reach && bounded && r.constant_steps == c.constant_steps;
      d += " Re=" + fmt("%g", r.reynolds) + ": " + std::to_string(r.adaptive_steps) + " adaptive vs " +
           std::to_string(r.constant_steps) + " constant" + (steps_ok ? "" : " (outside [400, 700])") +
           (reach ? "" : " (did not reach t_end)") + (bounded ? "" : " (energy unbounded)") + ";";
    }
    report(7, ok, d);
  } catch (const std::exception& e) {
    report(7, false, std::string("adaptive comparison failed: ") + e.what());
  }
}

void criterion_properties() {
  std::vector<std::string> failed;
  auto expect = [&](bool ok, const std::string& name) {
    if (!ok) failed.push_back(name);
  };
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto random_vector = [&](int n) {
    Vector v(n);
    for (auto& x : v) x = u(rng);
    return v;
  };

  const auto mesh = std::make_shared<const Mesh>(tag_boundary(build_structured_mesh(4, 4), TaggingScheme::AllDirichlet));
  const FeSpace vel = build_dof_map(mesh, 2, 2), tmp = build_dof_map(mesh, 2, 1);
  double skew = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Vector a = random_vector(vel.num_dofs()), v = random_vector(vel.num_dofs()),
                 th = random_vector(tmp.num_dofs());
    skew = std::max(skew, std::abs(trilinear_b(vel, a, vel, v, v)) / (a.norm() * v.squaredNorm()));
    skew = std::max(skew, std::abs(trilinear_b(vel, a, tmp, th, th)) / (a.norm() * th.squaredNorm()));
  }
  expect(skew <= 1e-13, "skew-symmetry " + fmt("%.1e", skew));

  const Vector c0 = random_vector(vel.num_dofs());
  const CubicTerm ct = cubic_term(vel, c0);
  double jac = 0.0;
  for (int k = 0; k < 5; ++k) {
    const Vector d = random_vector(vel.num_dofs());
    const double h = 1e-6;
    const Vector fd = (cubic_term(vel, c0 + h * d).residual - cubic_term(vel, c0 - h * d).residual) / (2 * h);
    const Vector jd = ct.jacobian * d;
    jac = std::max(jac, (fd - jd).norm() / jd.norm());
  }
  expect(jac <= 1e-6, "cubic Jacobian " + fmt("%.1e", jac));

  std::uniform_real_distribution<double> big(-5.0, 5.0);
  double gap = 0.0;
  for (int k = 0; k < 1000000; ++k) {
    const Vec2 x(big(rng), big(rng)), y(big(rng), big(rng));
    const MonotonicityGaps g = monotonicity_continuity_check(x, y);
    const double scale = std::pow(1.0 + x.norm() + y.norm(), 4);
    gap = std::min({gap, g.monotone_gap / scale, g.continuity_gap / scale});
  }
  expect(gap >= -1e-14, "monotonicity gaps " + fmt("%.1e", gap));

  double quad = 0.0;
  for (int deg = 1; deg <= 10; ++deg) {
    const QuadratureRule r = quadrature_rule(deg);
    for (int a = 0; a <= deg; ++a) {
      for (int b = 0; a + b <= deg; ++b) {
        const double exact = oracles::monomial_oracle(a, b, deg - a - b);
        quad = std::max(quad, std::abs(oracles::apply_rule(r, a, b, deg - a - b) - exact) / exact);
      }
    }
  }
  expect(quad <= 1e-13, "quadrature " + fmt("%.1e", quad));

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double ident = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const ManufacturedValues v = manufactured_solution(unit(rng), unit(rng), unit(rng));
    ident = std::max(ident, std::abs(v.grad_u.trace()) / (1.0 + v.grad_u.norm()));
    ident = std::max(ident, std::abs(v.grad_w.trace()) / (1.0 + v.grad_w.norm()));
    ident = std::max(ident, (v.w + v.lap_u + v.grad_phi).norm() / (1.0 + v.lap_u.norm()));
  }
  expect(ident <= 1e-10, "manufactured identities " + fmt("%.1e", ident));

  double worst_lo = 10.0, worst_hi = 0.0;
  const auto battery = oracles::ode_battery();
  for (double theta : {0.0, 0.3, 0.8, 1.0}) {
    for (size_t i = 0; i < battery.size(); ++i) {
      std::vector<double> grid = oracles::random_grid(20, 2.0, 7 + static_cast<unsigned>(i));
      double prev = oracles::dln_error(battery[i], theta, grid);
      for (int level = 0; level < 3; ++level) {
        grid = oracles::bisect(grid);
        const double e = oracles::dln_error(battery[i], theta, grid);
        const double order = std::log2(prev / e);
        worst_lo = std::min(worst_lo, order);
        worst_hi = std::max(worst_hi, order);
        prev = e;
      }
    }
  }
  expect(worst_lo > 1.8 && worst_hi < 2.3, "DLN order range [" + fmt("%.3f", worst_lo) + ", " + fmt("%.3f", worst_hi) + "]");

  std::string d = failed.empty() ? "skew-symmetry, cubic Jacobian, monotonicity gaps, quadrature, manufactured identities, "
                                   "DLN order (observed " + fmt("%.3f", worst_lo) + ".." + fmt("%.3f", worst_hi) + ")"
                                 : "failed:";
  for (const auto& f : failed) d += " " + f + ";";
  report(8, failed.empty(), d);
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto want = [&](int id) { return only.empty() || only.count(id) > 0; };
  const auto start = std::chrono::steady_clock::now();

  DivergenceLedger div;
  if (want(5)) criterion_g_stability();
  if (want(8)) criterion_properties();
  if (want(1)) criterion_time(div);
  if (want(2) || want(3)) criterion_space(div);
  if (want(6)) criterion_cavity(div);
  if (want(7)) criterion_adaptive(div);
  if (want(4)) criterion_divergence(div);

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d criteria failed, %.0f s\n", g_failures, secs);
  return g_failures == 0 ? 0 : 1;
}
