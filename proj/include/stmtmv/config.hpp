#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stmtmv/features.hpp"
#include "stmtmv/solver.hpp"
#include "stmtmv/synthetic.hpp"

namespace stmtmv::harness {

// `key = value` lines with '#' comments. Values may be scalars or
// space-separated lists. Reading tracks consumption so unknown keys are
// reported after a config struct has been populated.
class KeyValueConfig {
public:
  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;
  std::vector<int> get_ints(const std::string& key, std::vector<int> fallback) const;
  std::vector<std::string> get_strings(const std::string& key,
                                       std::vector<std::string> fallback) const;

  // Throws ConfigError naming the first key never read.
  void reject_unknown_keys() const;

  // Sorted key=value rendering; basis for the config hash.
  std::string canonical_text() const;
  std::uint64_t hash() const;  // FNV-1a over canonical_text()

private:
  std::string origin_;
  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> consumed_;
};

struct ExperimentConfig {
  std::string data_kind = "synthetic";  // synthetic | csv
  std::string data_dir;
  int grid_minutes = 0;  // 0 = infer from the series

  features::FeatureConfig features;
  SyntheticSpec synth;

  std::vector<int> horizons = {1, 2, 3, 4};
  double train_fraction = 0.7;
  double validation_fraction = 0.2;  // tail of train used for grid selection
  std::string split_mode = "chronological";

  int coupling_k = 3;
  pipes::PowerTriplet triplet;
  bool coupling_normalize = true;

  std::vector<std::string> models = {"stmtmv", "ols", "lasso", "mrmtl"};
  std::vector<double> grid_lambda = {1e-3, 1e-2, 1e-1, 1.0, 10.0};
  std::vector<double> grid_gamma = {1e-3, 1e-2, 1e-1, 1.0, 10.0};
  std::vector<double> grid_theta = {1e-3, 1e-2, 1e-1, 1.0, 10.0};
  std::vector<double> grid_alpha = {1e-3, 1e-2, 1e-1, 1.0, 10.0};
  std::vector<double> grid_mr_lambda = {1e-3, 1e-2, 1e-1, 1.0, 10.0};
  std::vector<double> grid_mr_theta = {1e-3, 1e-2, 1e-1, 1.0, 10.0};

  solver::SolverParams solver;

  std::optional<std::uint64_t> seed;

  std::string canonical_text;
  std::uint64_t config_hash = 0;

  // Parses and validates; every recognized key is optional except that a
  // seed must arrive either here or on the command line.
  static ExperimentConfig from_kv(const KeyValueConfig& kv);
  static ExperimentConfig from_file(const std::string& path);

  std::uint64_t require_seed() const;
  void validate() const;
};

}  // namespace stmtmv::harness
