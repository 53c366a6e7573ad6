#include "tdaf/tdaf.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "tdaf/adaptivity.hpp"
#include "tdaf/dln.hpp"
#include "tdaf/errors.hpp"
#include "tdaf/scenarios.hpp"

struct tdaf_config {
  tdaf::ScenarioConfig cfg;
};

namespace {

thread_local std::string g_last_error;

tdaf_status status_of(tdaf::ErrorCategory c) {
  switch (c) {
    case tdaf::ErrorCategory::Config:
      return TDAF_ERR_CONFIG;
    case tdaf::ErrorCategory::Structural:
      return TDAF_ERR_STRUCTURAL;
    case tdaf::ErrorCategory::Parameter:
      return TDAF_ERR_PARAMETER;
    case tdaf::ErrorCategory::Solver:
      return TDAF_ERR_SOLVER;
    case tdaf::ErrorCategory::Newton:
      return TDAF_ERR_NEWTON;
    case tdaf::ErrorCategory::Io:
      return TDAF_ERR_IO;
    case tdaf::ErrorCategory::Internal:
      break;
  }
  return TDAF_ERR_INTERNAL;
}

// Runs f, translating exceptions into status codes and the thread's message.
template <typename F>
tdaf_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return TDAF_OK;
  } catch (const tdaf::Error& e) {
    g_last_error = e.what();
    return status_of(e.category());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown exception";
  }
  return TDAF_ERR_INTERNAL;
}

void require(const void* p, const char* what) {
  if (!p) throw tdaf::StructuralError(std::string(what) + " is NULL");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* tdaf_status_name(tdaf_status status) {
  switch (status) {
    case TDAF_OK:
      return "ok";
    case TDAF_ERR_CONFIG:
      return "config";
    case TDAF_ERR_STRUCTURAL:
      return "structural";
    case TDAF_ERR_PARAMETER:
      return "parameter";
    case TDAF_ERR_SOLVER:
      return "solver";
    case TDAF_ERR_NEWTON:
      return "newton";
    case TDAF_ERR_IO:
      return "io";
    case TDAF_ERR_INTERNAL:
      break;
  }
  return "internal";
}

const char* tdaf_last_error(void) { return g_last_error.c_str(); }

const char* tdaf_version(void) { return "1.0.0"; }

tdaf_status tdaf_dln_coefficients(double theta, double eps, double alpha[3], double beta[3]) {
  return guarded([&] {
    require(alpha, "alpha");
    require(beta, "beta");
    const tdaf::DlnCoefficients c = tdaf::dln_coefficients(theta, eps);
    for (int i = 0; i < 3; ++i) {
      alpha[i] = c.alpha[i];
      beta[i] = c.beta[i];
    }
  });
}

tdaf_status tdaf_next_step(double chi_u, double chi_T, double delta, double k_min, double k_max, double k_n,
                           double* k_next) {
  return guarded([&] {
    require(k_next, "k_next");
    tdaf::AdaptiveConfig cfg;
    cfg.delta = delta;
    cfg.k_min = k_min;
    cfg.k_max = k_max;
    cfg.k0 = k_min;
    cfg.validate();
    if (!(k_n >= k_min && k_n <= k_max)) throw tdaf::ParameterError("next_step: k_n outside [k_min, k_max]");
    *k_next = tdaf::next_step(chi_u, chi_T, cfg, k_n);
  });
}

tdaf_status tdaf_config_create(const char* scenario, int full_scale, tdaf_config** out) {
  return guarded([&] {
    require(scenario, "scenario");
    require(out, "out");
    *out = nullptr;
    auto* c = new tdaf_config{tdaf::default_config(tdaf::parse_scenario(scenario), full_scale != 0)};
    *out = c;
  });
}

void tdaf_config_destroy(tdaf_config* config) { delete config; }

tdaf_status tdaf_config_merge_json(tdaf_config* config, const char* json) {
  return guarded([&] {
    require(config, "config");
    require(json, "json");
    config->cfg = tdaf::config_from_json(json, config->cfg);
  });
}

tdaf_status tdaf_config_set_seed(tdaf_config* config, uint64_t seed) {
  return guarded([&] {
    require(config, "config");
    config->cfg.seed = seed;
  });
}

tdaf_status tdaf_config_to_json(const tdaf_config* config, char** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = copy_string(tdaf::config_to_json(config->cfg));
  });
}

tdaf_status tdaf_run(const tdaf_config* config, char** summary) {
  return guarded([&] {
    require(config, "config");
    if (summary) *summary = nullptr;
    const std::string s = tdaf::run_scenario(config->cfg);
    if (summary) *summary = copy_string(s);
  });
}

void tdaf_string_free(char* s) { std::free(s); }

}  // extern "C"
