#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stmtmv/config.hpp"
#include "stmtmv/pipegraph.hpp"
#include "stmtmv/solver.hpp"

namespace stmtmv::harness {

// A dataset realized from flat files: feature matrices aligned with targets
// at t + horizon, plus what the evaluation harness needs on the side (sample
// times for chronological splits, raw RC windows for the decay baseline).
struct LoadedDataset {
  solver::StationDataset data;
  pipes::PipeNetwork network;
  pipes::TaskCoupling coupling;
  std::vector<std::vector<std::int64_t>> sample_times;
  std::vector<std::vector<std::vector<double>>> rc_windows;
  int grid_step_minutes = 0;
  long skipped_warmup = 0;
  long skipped_missing = 0;
  long skipped_target = 0;
  std::vector<std::string> temporal_names;
  std::vector<std::string> spatial_names;
};

// "YYYY-MM-DDTHH:MM:SS" (optional trailing 'Z') to unix seconds.
std::int64_t parse_iso8601_utc(const std::string& ts, const std::string& file, int line_no);

// Reads <dir>/pipes.csv, <dir>/stations.csv, <dir>/geo.csv and
// <dir>/series/<station_id>.csv, resamples each station onto its native
// uniform grid, windows the five sensor series, extracts both views and
// aligns targets `horizon_hours` ahead. Samples are emitted at on-the-hour
// grid points whose trailing window is complete; rows without enough history
// or with too many gaps are skipped and counted.
LoadedDataset load_dataset(const std::string& dir, const ExperimentConfig& cfg,
                           int horizon_hours);

}  // namespace stmtmv::harness
