#include "stmtmv/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "stmtmv/errors.hpp"

namespace stmtmv::harness {

void SyntheticSpec::validate() const {
  if (stations < 1) throw InvalidInput("SyntheticSpec: need at least 1 station");
  if (spatial_dim < 1 || temporal_dim < 1) throw InvalidInput("SyntheticSpec: view dims must be >= 1");
  if (samples_per_station < 2) throw InvalidInput("SyntheticSpec: need at least 2 samples per station");
  if (support < 1 || support > dim()) throw InvalidInput("SyntheticSpec: support must lie in [1, D]");
  if (noise < 0.0) throw InvalidInput("SyntheticSpec: noise must be non-negative");
  if (graph_nodes < stations) throw InvalidInput("SyntheticSpec: graph must hold all stations");
  if (extra_edge_prob < 0.0 || extra_edge_prob > 1.0) {
    throw InvalidInput("SyntheticSpec: edge probability must lie in [0, 1]");
  }
  if (min_length_km <= 0.0 || min_diameter_mm <= 0.0 || min_age_years <= 0.0 ||
      max_length_km < min_length_km || max_diameter_mm < min_diameter_mm ||
      max_age_years < min_age_years) {
    throw InvalidInput("SyntheticSpec: invalid pipe attribute ranges");
  }
  if (smoothness < 0.0 || perturb_scale < 0.0 || base_scale <= 0.0) {
    throw InvalidInput("SyntheticSpec: scales must be positive, smoothness non-negative");
  }
  if (coupling_k < 1) throw InvalidInput("SyntheticSpec: coupling_k must be >= 1");
}

SyntheticData generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SyntheticData out;

  // Random geometric graph, made connected by a shuffled spanning chain.
  const int n = spec.graph_nodes;
  std::vector<double> px(n), py(n);
  for (int i = 0; i < n; ++i) {
    px[i] = unit(rng);
    py[i] = unit(rng);
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::uniform_real_distribution<double> diameter(spec.min_diameter_mm, spec.max_diameter_mm);
  std::uniform_real_distribution<double> age(spec.min_age_years, spec.max_age_years);
  auto add_pipe = [&](int a, int b) {
    const double dist = std::hypot(px[a] - px[b], py[a] - py[b]) / std::sqrt(2.0);
    pipes::PipeSegment s;
    s.node_a = a;
    s.node_b = b;
    s.length_km = spec.min_length_km + dist * (spec.max_length_km - spec.min_length_km);
    s.diameter_mm = diameter(rng);
    s.age_years = age(rng);
    out.network.add_segment(s);
  };
  for (int i = 0; i + 1 < n; ++i) add_pipe(order[i], order[i + 1]);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (unit(rng) < spec.extra_edge_prob) add_pipe(a, b);
    }
  }

  std::vector<int> station_nodes(order.begin(), order.begin() + spec.stations);
  std::sort(station_nodes.begin(), station_nodes.end());
  std::vector<std::string> station_ids;
  for (int i = 0; i < spec.stations; ++i) {
    std::string id = "S" + std::string(i + 1 < 10 ? "0" : "") + std::to_string(i + 1);
    out.network.map_station(id, station_nodes[i]);
    station_ids.push_back(std::move(id));
  }

  out.coupling = spec.stations >= 2
                     ? pipes::correlation_matrix(out.network, station_ids, spec.coupling_k,
                                                 spec.triplet, /*normalize=*/true)
                     : pipes::TaskCoupling::decoupled(1);

  // Planted weights: shared sparse base plus per-task deviations drawn in the
  // Laplacian's non-null eigenspace, weighted by lambda^(-smoothness/2), so
  // strongly coupled stations stay close in exactly the metric the solver's
  // gamma penalty uses. Deviation energy is normalized after shaping.
  const int D = spec.dim();
  const int M = spec.stations;
  std::vector<int> rows(D);
  std::iota(rows.begin(), rows.end(), 0);
  std::shuffle(rows.begin(), rows.end(), rng);

  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(D, M);
  Eigen::MatrixXd deviation = Eigen::MatrixXd::Zero(spec.support, M);
  if (M > 1) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.coupling.L);
    for (int r = 0; r < spec.support; ++r) {
      for (int i = 0; i < M; ++i) {
        const double lambda = eig.eigenvalues()(i);
        if (lambda < 1e-9) continue;  // constant direction carries no task difference
        deviation.row(r) += gauss(rng) * std::pow(lambda, -0.5 * spec.smoothness) *
                            eig.eigenvectors().col(i).transpose();
      }
    }
    const double energy = deviation.norm();
    if (energy > 0.0) {
      deviation *= spec.base_scale * spec.perturb_scale *
                   std::sqrt(static_cast<double>(spec.support * M)) / energy;
    }
  }
  for (int r = 0; r < spec.support; ++r) {
    const double base = spec.base_scale * gauss(rng);
    W.row(rows[r]) = Eigen::RowVectorXd::Constant(M, base) + deviation.row(r);
  }
  out.planted.W = W;
  out.planted.Ds = spec.spatial_dim;

  // Features and targets.
  out.dataset.Ds = spec.spatial_dim;
  out.dataset.Dt = spec.temporal_dim;
  out.dataset.ids = station_ids;
  for (int l = 0; l < M; ++l) {
    Eigen::MatrixXd X(spec.samples_per_station, D);
    for (int i = 0; i < X.rows(); ++i)
      for (int j = 0; j < X.cols(); ++j) X(i, j) = gauss(rng);
    Eigen::VectorXd y = 0.5 * (X * W.col(l));
    for (int i = 0; i < y.size(); ++i) y(i) += spec.noise * gauss(rng);
    out.dataset.Xs.push_back(X.leftCols(spec.spatial_dim));
    out.dataset.Xt.push_back(X.rightCols(spec.temporal_dim));
    out.dataset.y.push_back(std::move(y));
  }
  out.dataset.validate();
  return out;
}

}  // namespace stmtmv::harness
