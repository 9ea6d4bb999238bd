#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "hiresim/presets.hpp"

namespace {

// --workers beats HIRESIM_WORKERS beats the hardware count.
int resolve_workers(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("HIRESIM_WORKERS")) {
    int w = 0;
    try {
      std::size_t used = 0;
      w = std::stoi(env, &used);
      if (used != std::string(env).size()) w = 0;
    } catch (const std::exception&) {
      w = 0;
    }
    if (w < 1)
      throw hiresim::ConfigError("HIRESIM_WORKERS", "must be a positive integer");
    return w;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? int(hc) : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hiring-market simulator: group-wise linear bandits, subsidies, quotas"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "results";
  std::string preset_name;
  std::string policy_str, subsidy_str;
  long runs = -1;
  double scale = 1.0;
  int workers = -1;

  CLI::App* sim = app.add_subcommand(
      "simulate", "run one configuration and write CSV results");
  sim->add_option("--config", config_path, "JSON config file")->required();
  sim->add_option("--policy", policy_str, "override the config's policy");
  sim->add_option("--subsidy", subsidy_str, "override the config's subsidy rule");
  sim->add_option("--out", out_dir, "output directory (default: results)");
  sim->add_option("--runs", runs, "override the run count");
  sim->add_option("--workers", workers, "thread count");

  CLI::App* pre = app.add_subcommand("preset", "run a named experiment preset");
  pre->add_option("--name", preset_name, "preset name; omit to list all");
  pre->add_option("--out", out_dir, "output directory (default: results)");
  pre->add_option("--runs", runs, "override the preset's run count");
  pre->add_option("--scale", scale, "multiply the preset's run count");
  pre->add_option("--workers", workers, "thread count");

  CLI::App* val = app.add_subcommand(
      "validate", "parse a config and print the resolved settings");
  val->add_option("--config", config_path, "JSON config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (sim->parsed()) {
      hiresim::SimConfig sc = hiresim::parse_config_file(config_path);
      if (!policy_str.empty()) sc.policy = hiresim::parse_policy(policy_str);
      if (!subsidy_str.empty()) sc.subsidy = hiresim::parse_subsidy(subsidy_str);
      hiresim::validate_policy(sc.market, sc.policy);
      hiresim::validate_pairing(sc.policy, sc.subsidy);
      if (runs > 0) sc.runs = runs;
      const int w = resolve_workers(workers);
      const hiresim::AggregateStats stats =
          hiresim::run_batch(sc.market, sc.policy, sc.subsidy, sc.runs, w);
      hiresim::emit_results(hiresim::bundle_single(sc, stats), out_dir);
      std::cout << "wrote " << out_dir << " (" << stats.runs << " runs)\n";
    } else if (pre->parsed()) {
      if (preset_name.empty()) {
        for (const auto& p : hiresim::all_presets())
          std::cout << p.name << "\t" << p.description << "\n";
        return 0;
      }
      if (!(scale > 0)) throw hiresim::ConfigError("--scale", "must be > 0");
      const hiresim::ExperimentPreset& p = hiresim::preset(preset_name);
      long r = runs > 0 ? runs : p.runs;
      if (scale != 1.0) r = std::max(1L, long(double(r) * scale + 0.5));
      const int w = resolve_workers(workers);
      hiresim::emit_results(hiresim::run_preset(p, r, w), out_dir);
      std::cout << "wrote " << out_dir << " (" << r << " runs per batch)\n";
    } else if (val->parsed()) {
      const hiresim::SimConfig sc = hiresim::parse_config_file(config_path);
      std::cout << hiresim::to_json(sc).dump(2) << "\n";
    }
    return 0;
  } catch (const hiresim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
