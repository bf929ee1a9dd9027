// Command-line driver: runs experiment batches, paired comparisons, and
// catalog generation on top of the simulator library.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wfsim/experiment.hpp"

namespace {

bool parse_weights(const std::string& text, wfsim::WeightVector& weights) {
  double t = 0, p = 0, s = 0;
  char extra = 0;
  const int matched =
      std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &t, &p, &s, &extra);
  if (matched != 3) return false;
  weights = {t, p, s};
  return true;
}

struct RunFlags {
  std::string config_path;
  std::string category;
  int runs = 0;
  double attack_rate = 0.0;
  std::string weights;
  std::uint64_t seed = 0;
  double p_detect = 0.0;
  int threads = 0;
  std::string catalog;
  std::string actions;
  std::string rules;
  std::string out;
};

// File config first, explicit flags override.
wfsim::ExperimentConfig merge_config(const CLI::App& cmd, const RunFlags& f) {
  wfsim::ExperimentConfig config;
  if (!f.config_path.empty()) {
    config = wfsim::load_config_file(f.config_path, config);
  }
  if (cmd.count("--category")) {
    config.category = wfsim::size_category_from_string(f.category);
  }
  if (cmd.count("--runs")) config.runs = f.runs;
  if (cmd.count("--attack-rate")) config.attack_rate = f.attack_rate;
  if (cmd.count("--weights")) {
    if (!parse_weights(f.weights, config.weights)) {
      throw CLI::ValidationError("--weights", "expected t,p,s");
    }
  }
  if (cmd.count("--seed")) config.seed = f.seed;
  if (cmd.count("--p-detect")) config.p_detect = f.p_detect;
  if (cmd.count("--threads")) config.threads = f.threads;
  if (cmd.count("--catalog")) config.catalog_path = f.catalog;
  if (cmd.count("--actions")) config.actions_path = f.actions;
  if (cmd.count("--rules")) config.rules_path = f.rules;
  if (cmd.count("--out")) config.out_dir = f.out;
  return config;
}

void add_run_flags(CLI::App& cmd, RunFlags& f) {
  cmd.add_option("--config", f.config_path,
                 "JSON config file; explicit flags override its values");
  cmd.add_option("--category", f.category, "workflow size category")
      ->check(CLI::IsMember({"small", "medium", "large"}))
      ->default_str("small");
  cmd.add_option("--runs", f.runs, "number of workflow instances")
      ->default_str("100");
  cmd.add_option("--attack-rate", f.attack_rate,
                 "per-execution attack probability")
      ->default_str("0.3");
  cmd.add_option("--weights", f.weights, "time,price,security weights")
      ->default_str("0.1,0.1,0.8");
  cmd.add_option("--seed", f.seed, "master seed")->default_str("42");
  cmd.add_option("--p-detect", f.p_detect,
                 "probability an injected attack is detected")
      ->default_str("1.0");
  cmd.add_option("--threads", f.threads,
                 "instance-level parallelism; 1 = sequential")
      ->default_str("1");
  cmd.add_option("--catalog", f.catalog,
                 "catalog JSON to pin the cloud environment (default: "
                 "generated from the seed)");
  cmd.add_option("--actions", f.actions, "adaptation action override JSON");
  cmd.add_option("--rules", f.rules, "tenant IDS rules JSON");
  cmd.add_option("--out", f.out, "output directory")->default_str("out");
}

int require_valid(const wfsim::ExperimentConfig& config,
                  const std::string& label) {
  const std::vector<std::string> violations = wfsim::validate_config(config);
  if (violations.empty()) return 0;
  for (const std::string& v : violations) {
    std::cerr << "error: " << label << v << '\n';
  }
  std::cerr << "run with --help for usage\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive security-aware workflow execution simulator"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand(
      "run", "run a batch and write run.log, metrics.json, metrics.csv");
  add_run_flags(*run_cmd, run_flags);

  std::string cfg_a, cfg_b, compare_out = "out";
  CLI::App* compare_cmd = app.add_subcommand(
      "compare", "run two configurations and write compare.json");
  compare_cmd->add_option("--config-a", cfg_a, "first configuration JSON")
      ->required();
  compare_cmd->add_option("--config-b", cfg_b, "second configuration JSON")
      ->required();
  compare_cmd->add_option("--out", compare_out, "output directory")
      ->default_str("out");

  std::uint64_t gen_seed = 1;
  int gen_providers = 5, gen_services = 3;
  std::string gen_out = "catalog.json";
  CLI::App* gen_cmd =
      app.add_subcommand("gen-catalog", "write a deterministic catalog file");
  gen_cmd->add_option("--seed", gen_seed, "master seed")->default_str("1");
  gen_cmd->add_option("--providers", gen_providers, "number of providers")
      ->check(CLI::PositiveNumber)
      ->default_str("5");
  gen_cmd->add_option("--services", gen_services, "services per provider")
      ->check(CLI::PositiveNumber)
      ->default_str("3");
  gen_cmd->add_option("--out", gen_out, "output file path")
      ->default_str("catalog.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run_cmd->parsed()) {
      const wfsim::ExperimentConfig config = merge_config(*run_cmd, run_flags);
      if (int rc = require_valid(config, "")) return rc;
      return wfsim::cmd_run(config);
    }
    if (compare_cmd->parsed()) {
      const wfsim::ExperimentConfig a = wfsim::load_config_file(cfg_a);
      const wfsim::ExperimentConfig b = wfsim::load_config_file(cfg_b);
      if (int rc = require_valid(a, "config-a: ")) return rc;
      if (int rc = require_valid(b, "config-b: ")) return rc;
      return wfsim::cmd_compare(a, b, compare_out);
    }
    if (gen_cmd->parsed()) {
      return wfsim::cmd_gen_catalog(gen_seed, gen_providers, gen_services,
                                    gen_out);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
