#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "wfsim/engine.hpp"
#include "wfsim/json_io.hpp"

namespace wfsim {

/// Everything one `run` invocation needs. Paths are optional: an empty
/// catalog path means "generate the default 5x3 catalog from the seed".
struct ExperimentConfig {
  SizeCategory category = SizeCategory::Small;
  int runs = 100;
  double attack_rate = 0.3;
  WeightVector weights{0.1, 0.1, 0.8};
  std::uint64_t seed = 42;
  double p_detect = 1.0;
  double p_false_positive = 0.0;
  int max_readapt = 3;
  int threads = 1;
  std::string catalog_path;
  std::string actions_path;
  std::string rules_path;
  std::string out_dir = "out";
};

inline std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> violations;
  if (c.runs < 1) violations.push_back("runs must be >= 1");
  if (c.attack_rate < 0.0 || c.attack_rate > 1.0) {
    violations.push_back("attack-rate must be within [0,1]");
  }
  if (c.p_detect < 0.0 || c.p_detect > 1.0) {
    violations.push_back("p-detect must be within [0,1]");
  }
  if (c.p_false_positive < 0.0 || c.p_false_positive > 1.0) {
    violations.push_back("p-false-positive must be within [0,1]");
  }
  if (!c.weights.valid()) {
    violations.push_back("weights must be >= 0 with a positive sum");
  }
  if (c.max_readapt < 0) violations.push_back("max-readapt must be >= 0");
  if (c.threads < 1) violations.push_back("threads must be >= 1");
  if (c.out_dir.empty()) violations.push_back("output directory must be set");
  return violations;
}

inline json config_to_json(const ExperimentConfig& c) {
  json j;
  j["category"] = std::string(to_string(c.category));
  j["runs"] = c.runs;
  j["attack_rate"] = c.attack_rate;
  j["weights"] = {{"time", c.weights.time},
                  {"price", c.weights.price},
                  {"security", c.weights.security}};
  j["seed"] = c.seed;
  j["p_detect"] = c.p_detect;
  j["p_false_positive"] = c.p_false_positive;
  j["max_readapt"] = c.max_readapt;
  j["threads"] = c.threads;
  j["catalog"] = c.catalog_path;
  j["actions"] = c.actions_path;
  j["rules"] = c.rules_path;
  j["out"] = c.out_dir;
  return j;
}

/// Reads a config file; fields mirror the CLI flags and all are optional.
inline ExperimentConfig config_from_json(const json& j,
                                         ExperimentConfig base = {}) {
  if (!j.is_object()) {
    throw std::runtime_error("config file: expected a top-level object");
  }
  if (j.contains("category")) {
    base.category = size_category_from_string(j["category"].get<std::string>());
  }
  if (j.contains("runs")) base.runs = j["runs"].get<int>();
  if (j.contains("attack_rate")) base.attack_rate = j["attack_rate"].get<double>();
  if (j.contains("weights")) {
    const json& jw = j["weights"];
    base.weights = {require_number(jw, "weights", "time"),
                    require_number(jw, "weights", "price"),
                    require_number(jw, "weights", "security")};
  }
  if (j.contains("seed")) base.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("p_detect")) base.p_detect = j["p_detect"].get<double>();
  if (j.contains("p_false_positive")) {
    base.p_false_positive = j["p_false_positive"].get<double>();
  }
  if (j.contains("max_readapt")) base.max_readapt = j["max_readapt"].get<int>();
  if (j.contains("threads")) base.threads = j["threads"].get<int>();
  if (j.contains("catalog")) base.catalog_path = j["catalog"].get<std::string>();
  if (j.contains("actions")) base.actions_path = j["actions"].get<std::string>();
  if (j.contains("rules")) base.rules_path = j["rules"].get<std::string>();
  if (j.contains("out")) base.out_dir = j["out"].get<std::string>();
  return base;
}

inline ExperimentConfig load_config_file(const std::string& path,
                                         ExperimentConfig base = {}) {
  return config_from_json(load_json_file(path), std::move(base));
}

// Shortest decimal form that round-trips the double; keeps CSV output stable.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

struct BatchArtifacts {
  Catalog catalog;
  BatchResult batch;
};

inline BatchOptions batch_options_from_config(const ExperimentConfig& c) {
  BatchOptions opts;
  opts.category = c.category;
  opts.runs = c.runs;
  opts.weights = c.weights;
  opts.seed = c.seed;
  opts.threads = c.threads;
  opts.engine.attack_rate = c.attack_rate;
  opts.engine.p_detect = c.p_detect;
  opts.engine.p_false_positive = c.p_false_positive;
  opts.engine.max_readapt = c.max_readapt;
  if (!c.actions_path.empty()) {
    opts.engine.actions = ActionCatalog::load(c.actions_path);
  }
  if (!c.rules_path.empty()) {
    opts.ids_rules = load_rules(c.rules_path);
  }
  return opts;
}

/// Runs one experiment batch per the config: the catalog is loaded when
/// pinned by path, otherwise generated from the master seed.
inline BatchArtifacts execute_batch(const ExperimentConfig& config) {
  BatchArtifacts artifacts;
  if (!config.catalog_path.empty()) {
    artifacts.catalog = load_catalog(config.catalog_path);
  } else {
    Rng catalog_rng(derive_seed(config.seed, kStreamCatalog));
    artifacts.catalog = generate_catalog(5, 3, catalog_rng);
  }
  artifacts.batch =
      run_batch(batch_options_from_config(config), artifacts.catalog);
  return artifacts;
}

inline json normalized_to_json(const NormalizedMetrics& nm) {
  return {{"avg_time", nm.avg_time},
          {"avg_price", nm.avg_price},
          {"avg_mitigation", nm.avg_mitigation}};
}

inline json metrics_json(const ExperimentConfig& config,
                         const BatchResult& batch) {
  json j;
  j["config"] = config_to_json(config);
  j["normalization"] =
      "min-max over the comparison set (time, price); comparison-set maximum "
      "(mitigation); degenerate min==max maps to 0";
  j["batch_size"] = batch.batch_size;
  json runs = json::array();
  for (const RunRecord& r : batch.records) {
    runs.push_back({{"time", r.time},
                    {"price", r.price},
                    {"mitigation", r.mitigation}});
  }
  j["runs"] = std::move(runs);
  j["normalized"] = normalized_to_json(batch.normalized);
  return j;
}

inline std::string metrics_csv(const BatchResult& batch) {
  std::string csv = "run_id,time,price,mitigation\n";
  for (const RunRecord& r : batch.records) {
    csv += std::to_string(r.run_id);
    csv += ',';
    csv += format_double(r.time);
    csv += ',';
    csv += format_double(r.price);
    csv += ',';
    csv += format_double(r.mitigation);
    csv += '\n';
  }
  return csv;
}

/// `run` subcommand: executes the batch and writes run.log, metrics.json,
/// metrics.csv, and the trust snapshot to the output directory.
inline int cmd_run(const ExperimentConfig& config) {
  std::filesystem::create_directories(config.out_dir);
  const BatchArtifacts artifacts = execute_batch(config);
  const std::filesystem::path out(config.out_dir);
  write_text_file((out / "run.log").string(), render_log(artifacts.batch.log));
  save_json_file(metrics_json(config, artifacts.batch),
                 (out / "metrics.json").string());
  write_text_file((out / "metrics.csv").string(),
                  metrics_csv(artifacts.batch));
  artifacts.batch.trust.save_snapshot((out / "trust.json").string());
  return 0;
}

/// `compare` subcommand: runs both configurations and reports their
/// normalized metrics side by side, normalized against the pooled run set so
/// the triples are directly comparable. Both arms share the workflow
/// population when their seed, category, and run count agree; otherwise the
/// report carries a warning.
inline int cmd_compare(const ExperimentConfig& config_a,
                       const ExperimentConfig& config_b,
                       const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const BatchArtifacts a = execute_batch(config_a);
  const BatchArtifacts b = execute_batch(config_b);

  std::vector<RunRecord> pooled = a.batch.records;
  pooled.insert(pooled.end(), b.batch.records.begin(), b.batch.records.end());
  const NormalizedMetrics na = normalize_metrics(a.batch.records, pooled);
  const NormalizedMetrics nb = normalize_metrics(b.batch.records, pooled);

  json warnings = json::array();
  if (config_a.seed != config_b.seed) {
    warnings.push_back(
        "different master seeds: workflow populations are not comparable");
  }
  if (config_a.category != config_b.category) {
    warnings.push_back("different size categories: workflow populations are "
                       "not comparable");
  }
  if (config_a.runs != config_b.runs) {
    warnings.push_back("different run counts: unpaired comparison");
  }

  json j;
  j["a"] = {{"config", config_to_json(config_a)},
            {"normalized", normalized_to_json(na)}};
  j["b"] = {{"config", config_to_json(config_b)},
            {"normalized", normalized_to_json(nb)}};
  j["delta"] = {{"avg_time", nb.avg_time - na.avg_time},
                {"avg_price", nb.avg_price - na.avg_price},
                {"avg_mitigation", nb.avg_mitigation - na.avg_mitigation}};
  j["warnings"] = std::move(warnings);
  save_json_file(j, (std::filesystem::path(out_dir) / "compare.json").string());
  return 0;
}

/// `gen-catalog` subcommand: writes a deterministic catalog file.
inline int cmd_gen_catalog(std::uint64_t seed, int providers,
                           int services_per_provider,
                           const std::string& path) {
  Rng rng(derive_seed(seed, kStreamCatalog));
  save_catalog(generate_catalog(providers, services_per_provider, rng), path);
  return 0;
}

}  // namespace wfsim
