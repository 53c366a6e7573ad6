// Command-line driver for the scenario runs. Uses only the C API.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tdaf/tdaf.h"

namespace {

struct Options {
  std::string config_path;
  std::optional<double> theta;
  std::optional<int> mesh_n;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool full_scale = false;
  bool print_config = false;
};

int fail(tdaf_status st) {
  std::fprintf(stderr, "error[%s]: %s\n", tdaf_status_name(st), tdaf_last_error());
  return static_cast<int>(st);
}

int fail(const char* category, const std::string& msg) {
  std::fprintf(stderr, "error[%s]: %s\n", category, msg.c_str());
  return static_cast<int>(category == std::string("io") ? TDAF_ERR_IO : TDAF_ERR_CONFIG);
}

int run(const std::string& scenario, const Options& o) {
  std::string file_text;
  bool full_scale = o.full_scale;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) return fail("io", "cannot read config file " + o.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    file_text = ss.str();
    const nlohmann::json j = nlohmann::json::parse(file_text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return fail("config", "config file is not a JSON object");
    if (j.contains("scenario") && j["scenario"] != scenario) {
      return fail("config", "config file is for scenario " + j["scenario"].dump() + ", not " + scenario);
    }
    if (j.contains("full_scale") && j["full_scale"].is_boolean()) full_scale = full_scale || j["full_scale"].get<bool>();
  }

  tdaf_config* cfg = nullptr;
  tdaf_status st = tdaf_config_create(scenario.c_str(), full_scale ? 1 : 0, &cfg);
  if (st != TDAF_OK) return fail(st);
  auto done = [&](tdaf_status s) {
    tdaf_config_destroy(cfg);
    return s == TDAF_OK ? 0 : fail(s);
  };

  if (!file_text.empty() && (st = tdaf_config_merge_json(cfg, file_text.c_str())) != TDAF_OK) return done(st);
  nlohmann::json flags = nlohmann::json::object();
  if (o.theta) flags["theta"] = *o.theta;
  if (o.mesh_n) flags["mesh_n"] = *o.mesh_n;
  if (o.out) flags["out"] = *o.out;
  if (o.full_scale) flags["full_scale"] = true;
  if ((st = tdaf_config_merge_json(cfg, flags.dump().c_str())) != TDAF_OK) return done(st);
  if (o.seed && (st = tdaf_config_set_seed(cfg, *o.seed)) != TDAF_OK) return done(st);

  if (o.print_config) {
    char* text = nullptr;
    if ((st = tdaf_config_to_json(cfg, &text)) != TDAF_OK) return done(st);
    std::printf("%s\n", text);
    tdaf_string_free(text);
    return done(TDAF_OK);
  }

  char* summary = nullptr;
  st = tdaf_run(cfg, &summary);
  if (st == TDAF_OK) {
    std::printf("%s\n", summary);
    tdaf_string_free(summary);
  }
  return done(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled active-fluid and heat transport solver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tdaf_version());

  Options o;
  std::string chosen;
  for (const char* name : {"convergence-time", "convergence-space", "cavity", "adaptive-compare"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", o.config_path, "Flat JSON configuration file");
    sub->add_option("--theta", o.theta, "Method parameter in [0, 1]");
    sub->add_option("--mesh-n", o.mesh_n, "Cells per side of the mesh");
    sub->add_option("--seed", o.seed, "Seed of the random initial velocity");
    sub->add_option("--out", o.out, "Output directory");
    sub->add_flag("--full-scale", o.full_scale, "Use the expensive full-size defaults");
    sub->add_flag("--print-config", o.print_config, "Print the resolved configuration and exit");
    sub->callback([&chosen, sub] { chosen = sub->get_name(); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("config", e.what());
  }
  return run(chosen, o);
}
