#include "stmtmv/pipegraph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "csv_util.hpp"
#include "stmtmv/errors.hpp"

namespace stmtmv::pipes {

TaskCoupling TaskCoupling::from_correlation(Eigen::MatrixXd C, int k) {
  const auto M = C.rows();
  if (M == 0 || C.cols() != M) throw InvalidInput("TaskCoupling: C must be square");
  for (Eigen::Index i = 0; i < M; ++i) {
    if (C(i, i) != 0.0) throw InvalidInput("TaskCoupling: C must have a zero diagonal");
    for (Eigen::Index j = 0; j < M; ++j) {
      if (!(C(i, j) >= 0.0)) throw InvalidInput("TaskCoupling: C must be non-negative");
      if (std::abs(C(i, j) - C(j, i)) > 1e-12 * std::max(1.0, std::abs(C(i, j)))) {
        throw InvalidInput("TaskCoupling: C must be symmetric");
      }
    }
  }
  TaskCoupling tc;
  tc.L = Eigen::MatrixXd(-C);
  tc.L.diagonal() = C.rowwise().sum();
  tc.C = std::move(C);
  tc.k = k;
  return tc;
}

TaskCoupling TaskCoupling::decoupled(int tasks) {
  if (tasks < 1) throw InvalidInput("TaskCoupling: need at least one task");
  TaskCoupling tc;
  tc.C = Eigen::MatrixXd::Zero(tasks, tasks);
  tc.L = Eigen::MatrixXd::Zero(tasks, tasks);
  tc.k = 0;
  return tc;
}

TaskCoupling TaskCoupling::uniform_like() const {
  const auto M = C.rows();
  if (M == 1) return decoupled(1);
  const double total = C.sum();
  const double scale = total / static_cast<double>(M * (M - 1));
  Eigen::MatrixXd U = Eigen::MatrixXd::Constant(M, M, scale);
  U.diagonal().setZero();
  return from_correlation(std::move(U), k);
}

void PipeNetwork::add_node(int node_id) { adjacency_.try_emplace(node_id); }

int PipeNetwork::add_segment(const PipeSegment& segment) {
  if (!(segment.length_km > 0.0) || !(segment.diameter_mm > 0.0) || !(segment.age_years > 0.0)) {
    throw InvalidInput("PipeNetwork: segment attributes must be strictly positive");
  }
  const int idx = static_cast<int>(segments_.size());
  segments_.push_back(segment);
  add_node(segment.node_a);
  add_node(segment.node_b);
  auto insert_sorted = [](std::vector<std::pair<int, int>>& adj, std::pair<int, int> entry) {
    adj.insert(std::upper_bound(adj.begin(), adj.end(), entry), entry);
  };
  insert_sorted(adjacency_[segment.node_a], {segment.node_b, idx});
  insert_sorted(adjacency_[segment.node_b], {segment.node_a, idx});
  return idx;
}

void PipeNetwork::map_station(const std::string& station_id, int node_id) {
  if (!has_node(node_id)) {
    throw InvalidInput("PipeNetwork: station '" + station_id + "' maps to unknown node " +
                       std::to_string(node_id));
  }
  station_nodes_[station_id] = node_id;
}

int PipeNetwork::station_node(const std::string& station_id) const {
  const auto it = station_nodes_.find(station_id);
  if (it == station_nodes_.end()) {
    throw InvalidInput("PipeNetwork: unmapped station '" + station_id + "'");
  }
  return it->second;
}

std::vector<int> PipeNetwork::node_ids() const {
  std::vector<int> ids;
  ids.reserve(adjacency_.size());
  for (const auto& [id, _] : adjacency_) ids.push_back(id);
  return ids;
}

std::vector<std::string> PipeNetwork::station_ids() const {
  std::vector<std::string> ids;
  ids.reserve(station_nodes_.size());
  for (const auto& [id, _] : station_nodes_) ids.push_back(id);
  return ids;
}

const std::vector<std::pair<int, int>>& PipeNetwork::neighbors(int node_id) const {
  const auto it = adjacency_.find(node_id);
  if (it == adjacency_.end()) {
    throw InvalidInput("PipeNetwork: unknown node " + std::to_string(node_id));
  }
  return it->second;
}

double pipe_weight(const PipeSegment& p, const PowerTriplet& t) {
  if (!(p.length_km > 0.0) || !(p.diameter_mm > 0.0) || !(p.age_years > 0.0)) {
    throw InvalidInput("pipe_weight: segment attributes must be strictly positive");
  }
  return std::pow(p.diameter_mm, t.pow_d) * std::pow(p.length_km, t.pow_len) *
         std::pow(p.age_years, t.pow_age);
}

namespace {

double canonical_cost(const std::vector<int>& edges, const std::vector<double>& weights) {
  double c = 0.0;
  for (int e : edges) c += weights[e];
  return c;
}

// (cost, node sequence, edge sequence) total order used for all path ranking.
bool path_less(const PipePath& a, const PipePath& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  if (a.nodes != b.nodes) return a.nodes < b.nodes;
  return a.edges < b.edges;
}

// Dijkstra with deterministic tie-breaking: among equal-cost shortest paths
// the lexicographically smallest (node sequence, then edge sequence) wins.
// With strictly positive weights every predecessor settles strictly earlier,
// so labels are final at pop time.
std::optional<PipePath> masked_shortest_path(const PipeNetwork& g,
                                             const std::vector<double>& weights,
                                             const std::set<int>& masked_nodes,
                                             const std::set<int>& masked_edges,
                                             int src, int dst) {
  struct Label {
    double dist = std::numeric_limits<double>::infinity();
    std::vector<int> nodes, edges;
    bool settled = false;
  };
  std::map<int, Label> labels;
  labels[src].dist = 0.0;
  labels[src].nodes = {src};

  using QueueEntry = std::pair<double, int>;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> queue;
  queue.push({0.0, src});

  while (!queue.empty()) {
    const auto [dist, u] = queue.top();
    queue.pop();
    auto& lu = labels[u];
    if (lu.settled || dist != lu.dist) continue;
    lu.settled = true;
    if (u == dst) break;

    for (const auto& [v, e] : g.neighbors(u)) {
      if (masked_nodes.count(v) || masked_edges.count(e)) continue;
      auto& lv = labels[v];
      if (lv.settled) continue;
      const double cand = lu.dist + weights[e];
      bool improve = cand < lv.dist;
      if (!improve && cand == lv.dist) {
        // same cost: compare the full sequences
        std::vector<int> cn = lu.nodes;
        cn.push_back(v);
        if (cn < lv.nodes || (cn == lv.nodes && [&] {
              std::vector<int> ce = lu.edges;
              ce.push_back(e);
              return ce < lv.edges;
            }())) {
          improve = true;
        }
      }
      if (improve) {
        lv.dist = cand;
        lv.nodes = lu.nodes;
        lv.nodes.push_back(v);
        lv.edges = lu.edges;
        lv.edges.push_back(e);
        queue.push({cand, v});
      }
    }
  }

  const auto it = labels.find(dst);
  if (it == labels.end() || !it->second.settled) return std::nullopt;
  PipePath path;
  path.nodes = it->second.nodes;
  path.edges = it->second.edges;
  path.cost = canonical_cost(path.edges, weights);
  return path;
}

}  // namespace

std::vector<PipePath> k_shortest_paths(const PipeNetwork& g, int src, int dst, int k,
                                       const PowerTriplet& t) {
  if (src == dst) throw InvalidInput("k_shortest_paths: src and dst must differ");
  if (!g.has_node(src) || !g.has_node(dst)) {
    throw InvalidInput("k_shortest_paths: src/dst not in the network");
  }
  if (k < 1) throw InvalidInput("k_shortest_paths: k must be >= 1");

  std::vector<double> weights;
  weights.reserve(g.segments().size());
  for (const auto& s : g.segments()) weights.push_back(pipe_weight(s, t));

  std::vector<PipePath> accepted;
  auto first = masked_shortest_path(g, weights, {}, {}, src, dst);
  if (!first) return accepted;
  accepted.push_back(std::move(*first));

  std::vector<PipePath> candidates;
  std::set<std::vector<int>> candidate_edge_seqs;

  while (static_cast<int>(accepted.size()) < k) {
    const PipePath prev = accepted.back();
    for (std::size_t j = 0; j + 1 < prev.nodes.size(); ++j) {
      const int spur_node = prev.nodes[j];
      std::set<int> masked_nodes(prev.nodes.begin(), prev.nodes.begin() + j);
      std::set<int> masked_edges;
      for (const auto& p : accepted) {
        if (p.nodes.size() > j &&
            std::equal(p.nodes.begin(), p.nodes.begin() + j + 1, prev.nodes.begin()) &&
            std::equal(p.edges.begin(), p.edges.begin() + j, prev.edges.begin())) {
          masked_edges.insert(p.edges[j]);
        }
      }
      auto spur = masked_shortest_path(g, weights, masked_nodes, masked_edges, spur_node, dst);
      if (!spur) continue;

      PipePath cand;
      cand.nodes.assign(prev.nodes.begin(), prev.nodes.begin() + j);
      cand.nodes.insert(cand.nodes.end(), spur->nodes.begin(), spur->nodes.end());
      cand.edges.assign(prev.edges.begin(), prev.edges.begin() + j);
      cand.edges.insert(cand.edges.end(), spur->edges.begin(), spur->edges.end());
      cand.cost = canonical_cost(cand.edges, weights);
      if (candidate_edge_seqs.insert(cand.edges).second) {
        candidates.push_back(std::move(cand));
      }
    }
    if (candidates.empty()) break;
    const auto best = std::min_element(candidates.begin(), candidates.end(), path_less);
    accepted.push_back(*best);
    candidate_edge_seqs.erase(best->edges);
    candidates.erase(best);
  }
  return accepted;
}

double station_correlation(const PipeNetwork& g, const std::string& station_i,
                           const std::string& station_j, int k, const PowerTriplet& t) {
  const int src = g.station_node(station_i);
  const int dst = g.station_node(station_j);
  if (station_i == station_j || src == dst) {
    throw InvalidInput("station_correlation: stations must differ");
  }
  const auto paths = k_shortest_paths(g, src, dst, k, t);
  if (paths.empty()) return 0.0;
  double total = 0.0;
  for (const auto& p : paths) total += p.cost;
  return total / static_cast<double>(paths.size());
}

TaskCoupling correlation_matrix(const PipeNetwork& g, const std::vector<std::string>& stations,
                                int k, const PowerTriplet& t, bool normalize) {
  const int M = static_cast<int>(stations.size());
  if (M < 2) throw InvalidInput("correlation_matrix: need at least 2 stations");
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(M, M);
  for (int i = 0; i < M; ++i) {
    for (int j = i + 1; j < M; ++j) {
      const double c = station_correlation(g, stations[i], stations[j], k, t);
      C(i, j) = c;
      C(j, i) = c;
    }
  }
  if (normalize) {
    const double cmax = C.maxCoeff();
    if (cmax > 0.0) C /= cmax;
  }
  return TaskCoupling::from_correlation(std::move(C), k);
}

namespace {

// Pearson correlation over paired samples; 0 when either side is constant.
double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
    sab += (a[i] - ma) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

std::vector<TripletScore> power_triplet_scan(const PipeNetwork& g,
                                             const std::vector<std::string>& stations,
                                             const Eigen::MatrixXd& corr_mat, int k) {
  const int M = static_cast<int>(stations.size());
  if (M < 3) throw InvalidInput("power_triplet_scan: need at least 3 stations");
  if (corr_mat.rows() != M || corr_mat.cols() != M) {
    throw InvalidInput("power_triplet_scan: correlation matrix must be MxM");
  }
  if (!corr_mat.isApprox(corr_mat.transpose(), 1e-9)) {
    throw InvalidInput("power_triplet_scan: correlation matrix must be symmetric");
  }

  std::vector<double> empirical;
  empirical.reserve(M * (M - 1) / 2);
  for (int i = 0; i < M; ++i)
    for (int j = i + 1; j < M; ++j) empirical.push_back(corr_mat(i, j));

  std::vector<TripletScore> scores;
  scores.reserve(11 * 11 * 11);
  for (int pd = -5; pd <= 5; ++pd) {
    for (int pl = -5; pl <= 5; ++pl) {
      for (int pa = -5; pa <= 5; ++pa) {
        const PowerTriplet t{pd, pl, pa};
        const auto coupling = correlation_matrix(g, stations, k, t, /*normalize=*/false);
        std::vector<double> derived;
        derived.reserve(empirical.size());
        for (int i = 0; i < M; ++i)
          for (int j = i + 1; j < M; ++j) derived.push_back(coupling.C(i, j));
        scores.push_back({t, pearson(empirical, derived)});
      }
    }
  }
  std::stable_sort(scores.begin(), scores.end(), [](const TripletScore& a, const TripletScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.triplet < b.triplet;
  });
  return scores;
}

PipeNetwork read_pipe_network_csv(const std::string& pipe_csv_path) {
  auto in = csv::open_or_throw(pipe_csv_path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ParseError(pipe_csv_path + ": empty file");
  ++line_no;
  csv::check_header(csv::split_line(line),
                    {"node_a", "node_b", "length_km", "diameter_mm", "age_years"},
                    pipe_csv_path);
  PipeNetwork g;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = csv::split_line(line);
    if (f.size() != 5) {
      throw ParseError(csv::location(pipe_csv_path, line_no) + ": expected 5 fields, got " +
                       std::to_string(f.size()));
    }
    PipeSegment s;
    s.node_a = csv::parse_int(f[0], pipe_csv_path, line_no, "node_a");
    s.node_b = csv::parse_int(f[1], pipe_csv_path, line_no, "node_b");
    s.length_km = csv::parse_double(f[2], pipe_csv_path, line_no, "length_km");
    s.diameter_mm = csv::parse_double(f[3], pipe_csv_path, line_no, "diameter_mm");
    s.age_years = csv::parse_double(f[4], pipe_csv_path, line_no, "age_years");
    try {
      g.add_segment(s);
    } catch (const InvalidInput& e) {
      throw ParseError(csv::location(pipe_csv_path, line_no) + ": " + e.what());
    }
  }
  return g;
}

void read_station_map_csv(const std::string& station_csv_path, PipeNetwork& g) {
  auto in = csv::open_or_throw(station_csv_path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ParseError(station_csv_path + ": empty file");
  ++line_no;
  csv::check_header(csv::split_line(line), {"station_id", "node_id"}, station_csv_path);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = csv::split_line(line);
    if (f.size() != 2) {
      throw ParseError(csv::location(station_csv_path, line_no) + ": expected 2 fields, got " +
                       std::to_string(f.size()));
    }
    try {
      g.map_station(f[0], csv::parse_int(f[1], station_csv_path, line_no, "node_id"));
    } catch (const InvalidInput& e) {
      throw ParseError(csv::location(station_csv_path, line_no) + ": " + e.what());
    }
  }
}

}  // namespace stmtmv::pipes
