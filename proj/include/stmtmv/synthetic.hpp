#pragma once

#include <cstdint>

#include "stmtmv/pipegraph.hpp"
#include "stmtmv/solver.hpp"

namespace stmtmv::harness {

// Planted-model generator: a connected random geometric pipe graph yields the
// task coupling; the planted weight matrix has `support` shared active rows
// plus per-task perturbations smoothed along the graph so strongly coupled
// stations stay close; features are i.i.d. standard normal and targets follow
// the late-fusion model y = 0.5 X w + noise.
struct SyntheticSpec {
  int stations = 6;
  int spatial_dim = 8;
  int temporal_dim = 12;
  int samples_per_station = 80;
  int support = 5;
  double noise = 0.1;

  int graph_nodes = 24;
  double extra_edge_prob = 0.08;
  double min_length_km = 0.2, max_length_km = 3.0;
  double min_diameter_mm = 100.0, max_diameter_mm = 600.0;
  double min_age_years = 1.0, max_age_years = 30.0;

  double base_scale = 0.4;     // std of the shared active-row values
  double smoothness = 3.0;      // spectral tilt of the per-task deviations
  double perturb_scale = 0.4;   // per-task deviation scale relative to the base
  int coupling_k = 3;
  pipes::PowerTriplet triplet;  // defaults to (2, -1, -1)

  int dim() const { return spatial_dim + temporal_dim; }
  void validate() const;
};

struct SyntheticData {
  solver::StationDataset dataset;
  pipes::PipeNetwork network;
  pipes::TaskCoupling coupling;
  solver::WeightMatrix planted;
};

// Fully reproducible from the seed: identical spec and seed give identical
// bytes everywhere.
SyntheticData generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace stmtmv::harness
