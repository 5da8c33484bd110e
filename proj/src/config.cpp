#include "stmtmv/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "stmtmv/errors.hpp"

namespace stmtmv::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string tok;
  while (ss >> tok) parts.push_back(tok);
  return parts;
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_string(buffer.str(), path);
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text, const std::string& origin) {
  KeyValueConfig kv;
  kv.origin_ = origin;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.resize(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) +
                        ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    }
    kv.entries_[key] = value;
  }
  return kv;
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  consumed_.insert(key);
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  consumed_.insert(key);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + it->second + "' as a number");
  }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  const double v = get_double(key, static_cast<double>(fallback));
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw ConfigError("config key '" + key + "': expected an integer");
  }
  return i;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  consumed_.insert(key);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
  if (it->second == "false" || it->second == "0" || it->second == "no") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + it->second + "'");
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key,
                                                std::vector<double> fallback) const {
  consumed_.insert(key);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::vector<double> out;
  for (const auto& tok : split_ws(it->second)) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': cannot parse '" + tok + "' as a number");
    }
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

std::vector<int> KeyValueConfig::get_ints(const std::string& key, std::vector<int> fallback) const {
  const auto ds = get_doubles(key, std::vector<double>(fallback.begin(), fallback.end()));
  std::vector<int> out;
  for (double d : ds) {
    const int i = static_cast<int>(d);
    if (static_cast<double>(i) != d) {
      throw ConfigError("config key '" + key + "': expected integers");
    }
    out.push_back(i);
  }
  return out;
}

std::vector<std::string> KeyValueConfig::get_strings(const std::string& key,
                                                     std::vector<std::string> fallback) const {
  consumed_.insert(key);
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const auto parts = split_ws(it->second);
  if (parts.empty()) throw ConfigError("config key '" + key + "': empty list");
  return parts;
}

void KeyValueConfig::reject_unknown_keys() const {
  for (const auto& [key, _] : entries_) {
    if (!consumed_.count(key)) {
      throw ConfigError(origin_ + ": unknown config key '" + key + "'");
    }
  }
}

std::string KeyValueConfig::canonical_text() const {
  std::string out;
  for (const auto& [key, value] : entries_) {
    out += key;
    out += "=";
    out += value;
    out += "\n";
  }
  return out;
}

std::uint64_t KeyValueConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical_text()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  return from_kv(KeyValueConfig::from_file(path));
}

ExperimentConfig ExperimentConfig::from_kv(const KeyValueConfig& kv) {
  ExperimentConfig cfg;
  cfg.data_kind = kv.get_string("data.kind", cfg.data_kind);
  cfg.data_dir = kv.get_string("data.dir", cfg.data_dir);
  cfg.grid_minutes = kv.get_int("data.grid_minutes", cfg.grid_minutes);

  cfg.features.autocorr_lags = kv.get_ints("features.autocorr_lags", cfg.features.autocorr_lags);
  cfg.features.paa_segments = kv.get_int("features.paa_segments", cfg.features.paa_segments);
  cfg.features.pla_segments = kv.get_int("features.pla_segments", cfg.features.pla_segments);
  cfg.features.fft_k = kv.get_int("features.fft_k", cfg.features.fft_k);
  cfg.features.dwt_k = kv.get_int("features.dwt_k", cfg.features.dwt_k);
  cfg.features.weather_vocab = kv.get_ints("features.weather_vocab", cfg.features.weather_vocab);
  cfg.features.poi_categories = kv.get_int("features.poi_categories", cfg.features.poi_categories);
  cfg.features.window_hours = kv.get_double("features.window_hours", cfg.features.window_hours);
  cfg.features.max_missing_fraction =
      kv.get_double("features.max_missing_fraction", cfg.features.max_missing_fraction);

  cfg.horizons = kv.get_ints("horizons", cfg.horizons);
  cfg.train_fraction = kv.get_double("split.train_fraction", cfg.train_fraction);
  cfg.validation_fraction = kv.get_double("split.validation_fraction", cfg.validation_fraction);
  cfg.split_mode = kv.get_string("split.mode", cfg.split_mode);

  cfg.coupling_k = kv.get_int("coupling.k", cfg.coupling_k);
  const auto trip = kv.get_ints("coupling.triplet", {cfg.triplet.pow_d, cfg.triplet.pow_len,
                                                     cfg.triplet.pow_age});
  if (trip.size() != 3) throw ConfigError("coupling.triplet: expected three integers");
  cfg.triplet = {trip[0], trip[1], trip[2]};
  cfg.coupling_normalize = kv.get_bool("coupling.normalize", cfg.coupling_normalize);

  cfg.models = kv.get_strings("models", cfg.models);
  cfg.grid_lambda = kv.get_doubles("grid.lambda", cfg.grid_lambda);
  cfg.grid_gamma = kv.get_doubles("grid.gamma", cfg.grid_gamma);
  cfg.grid_theta = kv.get_doubles("grid.theta", cfg.grid_theta);
  cfg.grid_alpha = kv.get_doubles("grid.alpha", cfg.grid_alpha);
  cfg.grid_mr_lambda = kv.get_doubles("grid.mr_lambda", cfg.grid_mr_lambda);
  cfg.grid_mr_theta = kv.get_doubles("grid.mr_theta", cfg.grid_mr_theta);

  cfg.solver.lambda = kv.get_double("solver.lambda", cfg.solver.lambda);
  cfg.solver.gamma = kv.get_double("solver.gamma", cfg.solver.gamma);
  cfg.solver.theta = kv.get_double("solver.theta", cfg.solver.theta);
  cfg.solver.max_iters = kv.get_int("solver.max_iters", cfg.solver.max_iters);
  cfg.solver.tol = kv.get_double("solver.tol", cfg.solver.tol);
  cfg.solver.lipschitz0 = kv.get_double("solver.l0", cfg.solver.lipschitz0);
  cfg.solver.backtrack_eta = kv.get_double("solver.eta", cfg.solver.backtrack_eta);

  if (kv.has("seed")) cfg.seed = static_cast<std::uint64_t>(kv.get_int("seed", 0));

  cfg.synth.stations = kv.get_int("synth.stations", cfg.synth.stations);
  cfg.synth.spatial_dim = kv.get_int("synth.spatial_dim", cfg.synth.spatial_dim);
  cfg.synth.temporal_dim = kv.get_int("synth.temporal_dim", cfg.synth.temporal_dim);
  cfg.synth.samples_per_station =
      kv.get_int("synth.samples_per_station", cfg.synth.samples_per_station);
  cfg.synth.support = kv.get_int("synth.support", cfg.synth.support);
  cfg.synth.noise = kv.get_double("synth.noise", cfg.synth.noise);
  cfg.synth.graph_nodes = kv.get_int("synth.graph_nodes", cfg.synth.graph_nodes);
  cfg.synth.extra_edge_prob = kv.get_double("synth.extra_edge_prob", cfg.synth.extra_edge_prob);
  cfg.synth.base_scale = kv.get_double("synth.base_scale", cfg.synth.base_scale);
  cfg.synth.smoothness = kv.get_double("synth.smoothness", cfg.synth.smoothness);
  cfg.synth.perturb_scale = kv.get_double("synth.perturb_scale", cfg.synth.perturb_scale);
  cfg.synth.coupling_k = cfg.coupling_k;
  cfg.synth.triplet = cfg.triplet;

  kv.reject_unknown_keys();
  cfg.canonical_text = kv.canonical_text();
  cfg.config_hash = kv.hash();
  cfg.validate();
  return cfg;
}

std::uint64_t ExperimentConfig::require_seed() const {
  if (!seed) throw ConfigError("a seed is mandatory: set 'seed' in the config or pass --seed");
  return *seed;
}

void ExperimentConfig::validate() const {
  if (data_kind != "synthetic" && data_kind != "csv") {
    throw ConfigError("data.kind must be 'synthetic' or 'csv'");
  }
  if (data_kind == "csv" && data_dir.empty()) {
    throw ConfigError("data.kind=csv requires data.dir");
  }
  if (horizons.empty()) throw ConfigError("horizons: empty");
  for (int h : horizons) {
    if (h < 1 || h > 4) throw ConfigError("horizons must lie in {1,2,3,4}");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("split.train_fraction must lie in (0, 1)");
  }
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("split.validation_fraction must lie in (0, 1)");
  }
  if (split_mode != "chronological") {
    throw ConfigError("split.mode: only 'chronological' is supported");
  }
  if (coupling_k < 1) throw ConfigError("coupling.k must be >= 1");
  for (int p : {triplet.pow_d, triplet.pow_len, triplet.pow_age}) {
    if (p < -5 || p > 5) throw ConfigError("coupling.triplet entries must lie in [-5, 5]");
  }
  if (models.empty()) throw ConfigError("models: empty");
  try {
    solver::SolverParams check = solver;
    check.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace stmtmv::harness
