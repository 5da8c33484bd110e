#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace stmtmv::pipes {

// Undirected pipe segment. All three attributes enter the edge-weight
// formula multiplicatively, so they must be strictly positive.
struct PipeSegment {
  int node_a = 0;
  int node_b = 0;
  double length_km = 0.0;
  double diameter_mm = 0.0;
  double age_years = 0.0;
};

// Exponents applied to (diameter, length, age) when turning a segment into
// an edge weight. The default reproduces w_p = d^2 / (len * age).
struct PowerTriplet {
  int pow_d = 2;
  int pow_len = -1;
  int pow_age = -1;

  bool operator==(const PowerTriplet&) const = default;
  auto operator<=>(const PowerTriplet&) const = default;
};

// A loopless path through the network: node ids visited in order plus the
// segment index taken at each hop. `cost` is the sum of edge weights.
struct PipePath {
  std::vector<int> nodes;
  std::vector<int> edges;
  double cost = 0.0;
};

// Station correlation matrix C and its Laplacian L = D - C.
struct TaskCoupling {
  Eigen::MatrixXd C;
  Eigen::MatrixXd L;
  int k = 0;

  int tasks() const { return static_cast<int>(C.rows()); }

  // Validates C (square, symmetric, non-negative, zero diagonal) and fills L.
  static TaskCoupling from_correlation(Eigen::MatrixXd C, int k);
  // All-zero coupling for M tasks; the Laplacian penalty is inert.
  static TaskCoupling decoupled(int tasks);
  // Uniform off-diagonal coupling scaled so tr(D) matches this coupling's.
  TaskCoupling uniform_like() const;
};

// Undirected weighted multigraph of pipe segments with named monitoring
// stations attached to nodes. Parallel edges are kept distinct.
class PipeNetwork {
public:
  void add_node(int node_id);
  // Registers both endpoints as nodes; rejects non-positive attributes.
  int add_segment(const PipeSegment& segment);
  // The node must already exist.
  void map_station(const std::string& station_id, int node_id);

  bool has_node(int node_id) const { return adjacency_.count(node_id) > 0; }
  int station_node(const std::string& station_id) const;
  const std::vector<PipeSegment>& segments() const { return segments_; }
  std::vector<int> node_ids() const;
  std::vector<std::string> station_ids() const;  // sorted
  const std::map<std::string, int>& stations() const { return station_nodes_; }

  // Neighbors of a node as (neighbor id, segment index), sorted.
  const std::vector<std::pair<int, int>>& neighbors(int node_id) const;

private:
  std::map<int, std::vector<std::pair<int, int>>> adjacency_;
  std::vector<PipeSegment> segments_;
  std::map<std::string, int> station_nodes_;
};

// w_p = d^pow_d * len^pow_len * age^pow_age.
double pipe_weight(const PipeSegment& p, const PowerTriplet& t);

// Yen's k-shortest loopless paths under the triplet-derived edge weights.
// Output is sorted by (cost, node sequence, edge sequence); fewer than k
// paths are returned when the graph admits fewer, none when disconnected.
std::vector<PipePath> k_shortest_paths(const PipeNetwork& g, int src, int dst,
                                       int k, const PowerTriplet& t);

// Mean total weight of the top-k shortest paths between two stations
// (average over the paths found; 0 when disconnected).
double station_correlation(const PipeNetwork& g, const std::string& station_i,
                           const std::string& station_j, int k,
                           const PowerTriplet& t);

// Pairwise station correlations, optionally scaled by 1/max so C lies in
// [0, 1], plus the Laplacian.
TaskCoupling correlation_matrix(const PipeNetwork& g,
                                const std::vector<std::string>& stations,
                                int k, const PowerTriplet& t, bool normalize);

struct TripletScore {
  PowerTriplet triplet;
  double score = 0.0;
};

// Scans every power triplet in [-5,5]^3, scoring each by the Pearson
// correlation between the upper triangles of the empirical correlation
// matrix and the triplet's pipe-derived weight matrix. Constant weight
// matrices score 0. Result is sorted by score descending (ties by triplet).
std::vector<TripletScore> power_triplet_scan(const PipeNetwork& g,
                                             const std::vector<std::string>& stations,
                                             const Eigen::MatrixXd& corr_mat, int k);

// CSV ingestion. Pipe rows: node_a,node_b,length_km,diameter_mm,age_years.
// Station rows: station_id,node_id. Errors name the file and line.
PipeNetwork read_pipe_network_csv(const std::string& pipe_csv_path);
void read_station_map_csv(const std::string& station_csv_path, PipeNetwork& g);

}  // namespace stmtmv::pipes
