#include "stmtmv/dataset_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "csv_util.hpp"
#include "stmtmv/errors.hpp"
#include "stmtmv/features.hpp"

namespace stmtmv::harness {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

}  // namespace

std::int64_t parse_iso8601_utc(const std::string& ts, const std::string& file, int line_no) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char tail = '\0';
  const int matched =
      std::sscanf(ts.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &s, &tail);
  const bool ok = (matched == 6) || (matched == 7 && tail == 'Z');
  if (!ok || mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 59) {
    throw ParseError(csv::location(file, line_no) + ": column 'timestamp_iso8601': cannot parse '" +
                     ts + "'");
  }
  return days_from_civil(y, mo, d) * kSecondsPerDay + h * 3600 + mi * 60 + s;
}

namespace {

constexpr const char* kSeriesColumns[] = {
    "timestamp_iso8601", "rc_mgL", "turbidity_ntu", "ph",       "flow_m3h",     "pressure_kPa",
    "temp_C",            "humidity_pct", "baro_hPa", "wind_ms", "weather_code"};

// One station's series resampled onto a uniform grid; NaN marks gaps.
struct StationGrid {
  std::int64_t t0 = 0;
  std::int64_t step_sec = 0;
  int slots = 0;
  // column order: rc, turbidity, ph, flow, pressure, temp, humidity, baro, wind, weather
  std::vector<std::vector<double>> columns;
  std::vector<std::vector<double>> ffilled;  // forward-filled views, same layout

  std::int64_t time_at(int slot) const { return t0 + slot * step_sec; }
  // last grid slot whose time is <= t; -1 when t predates the grid
  int slot_at_or_before(std::int64_t t) const {
    if (t < t0) return -1;
    const std::int64_t slot = (t - t0) / step_sec;
    return static_cast<int>(std::min<std::int64_t>(slot, slots - 1));
  }
};

StationGrid load_station_grid(const std::string& path, int grid_minutes_override) {
  auto in = csv::open_or_throw(path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  ++line_no;
  csv::check_header(csv::split_line(line),
                    {kSeriesColumns, kSeriesColumns + std::size(kSeriesColumns)}, path);

  std::vector<std::int64_t> times;
  std::vector<std::array<double, 10>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = csv::split_line(line);
    if (f.size() != std::size(kSeriesColumns)) {
      throw ParseError(csv::location(path, line_no) + ": expected " +
                       std::to_string(std::size(kSeriesColumns)) + " fields, got " +
                       std::to_string(f.size()));
    }
    const std::int64_t t = parse_iso8601_utc(f[0], path, line_no);
    if (!times.empty() && t <= times.back()) {
      throw ParseError(csv::location(path, line_no) + ": timestamps must strictly increase");
    }
    times.push_back(t);
    std::array<double, 10> row{};
    for (int c = 0; c < 10; ++c) {
      row[c] = csv::parse_double(f[c + 1], path, line_no, kSeriesColumns[c + 1]);
    }
    rows.push_back(row);
  }
  if (times.size() < 2) throw ParseError(path + ": need at least 2 data rows");

  std::int64_t step_sec = 0;
  if (grid_minutes_override > 0) {
    step_sec = static_cast<std::int64_t>(grid_minutes_override) * 60;
  } else {
    // native grid: the median inter-row spacing
    std::vector<std::int64_t> diffs;
    diffs.reserve(times.size() - 1);
    for (std::size_t i = 1; i < times.size(); ++i) diffs.push_back(times[i] - times[i - 1]);
    std::nth_element(diffs.begin(), diffs.begin() + diffs.size() / 2, diffs.end());
    step_sec = diffs[diffs.size() / 2];
  }
  if (step_sec <= 0 || step_sec % 60 != 0) {
    throw ParseError(path + ": cannot infer a whole-minute sampling step");
  }

  StationGrid grid;
  grid.t0 = times.front();
  grid.step_sec = step_sec;
  grid.slots = static_cast<int>((times.back() - times.front()) / step_sec) + 1;
  grid.columns.assign(10, std::vector<double>(grid.slots, std::numeric_limits<double>::quiet_NaN()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const std::int64_t slot =
        (times[i] - grid.t0 + step_sec / 2) / step_sec;  // snap to nearest slot
    if (slot < 0 || slot >= grid.slots) continue;
    for (int c = 0; c < 10; ++c) grid.columns[c][slot] = rows[i][c];
  }
  grid.ffilled = grid.columns;
  for (auto& col : grid.ffilled) {
    double last = std::numeric_limits<double>::quiet_NaN();
    for (double& v : col) {
      if (std::isfinite(v)) {
        last = v;
      } else {
        v = last;
      }
    }
  }
  return grid;
}

struct GeoTable {
  std::map<std::string, features::GeoSummary> by_station;
};

GeoTable load_geo_csv(const std::string& path, int poi_categories) {
  auto in = csv::open_or_throw(path);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  ++line_no;
  std::vector<std::string> expected = {"station_id", "road_len_km", "intersections",
                                       "poi_density"};
  for (int i = 1; i <= poi_categories; ++i) {
    expected.push_back("poi_c" + std::string(i < 10 ? "0" : "") + std::to_string(i));
  }
  csv::check_header(csv::split_line(line), expected, path);

  GeoTable geo;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = csv::split_line(line);
    if (f.size() != expected.size()) {
      throw ParseError(csv::location(path, line_no) + ": expected " +
                       std::to_string(expected.size()) + " fields, got " +
                       std::to_string(f.size()));
    }
    features::GeoSummary g;
    g.road_total_length_km = csv::parse_double(f[1], path, line_no, "road_len_km");
    g.road_intersections = csv::parse_double(f[2], path, line_no, "intersections");
    g.poi_density = csv::parse_double(f[3], path, line_no, "poi_density");
    for (int i = 0; i < poi_categories; ++i) {
      g.poi_counts.push_back(csv::parse_double(f[4 + i], path, line_no, expected[4 + i]));
    }
    geo.by_station[f[0]] = std::move(g);
  }
  return geo;
}

features::TimeSeriesWindow slice_window(const std::vector<double>& column, int end_slot,
                                        int window_slots, double step_minutes) {
  features::TimeSeriesWindow w;
  w.step_minutes = step_minutes;
  w.values.assign(column.begin() + (end_slot - window_slots + 1), column.begin() + end_slot + 1);
  return w;
}

}  // namespace

LoadedDataset load_dataset(const std::string& dir, const ExperimentConfig& cfg,
                           int horizon_hours) {
  if (horizon_hours < 1) throw InvalidInput("load_dataset: horizon must be >= 1 hour");
  LoadedDataset out;

  out.network = pipes::read_pipe_network_csv(dir + "/pipes.csv");
  pipes::read_station_map_csv(dir + "/stations.csv", out.network);
  const std::vector<std::string> ids = out.network.station_ids();
  if (ids.empty()) throw ParseError(dir + "/stations.csv: no stations mapped");
  const int M = static_cast<int>(ids.size());

  out.coupling = M >= 2 ? pipes::correlation_matrix(out.network, ids, cfg.coupling_k, cfg.triplet,
                                                    cfg.coupling_normalize)
                        : pipes::TaskCoupling::decoupled(1);

  const GeoTable geo = load_geo_csv(dir + "/geo.csv", cfg.features.poi_categories);
  for (const auto& id : ids) {
    if (!geo.by_station.count(id)) {
      throw ParseError(dir + "/geo.csv: no row for station '" + id + "'");
    }
  }

  std::vector<StationGrid> grids;
  grids.reserve(M);
  for (const auto& id : ids) {
    grids.push_back(load_station_grid(dir + "/series/" + id + ".csv", cfg.grid_minutes));
  }
  for (const auto& g : grids) {
    if (g.step_sec != grids.front().step_sec) {
      throw ParseError(dir + ": stations disagree on the sampling step; set data.grid_minutes");
    }
  }
  const std::int64_t step_sec = grids.front().step_sec;
  out.grid_step_minutes = static_cast<int>(step_sec / 60);
  const double step_minutes = static_cast<double>(out.grid_step_minutes);

  const std::int64_t window_span_sec =
      static_cast<std::int64_t>(cfg.features.window_hours * 3600.0);
  if (window_span_sec % step_sec != 0) {
    throw ConfigError("features.window_hours is not a multiple of the sampling step");
  }
  const int window_slots = static_cast<int>(window_span_sec / step_sec);
  if (window_slots < 2) throw ConfigError("window too short for the sampling step");

  out.data.Ds = cfg.features.spatial_dim();
  out.data.Dt = cfg.features.temporal_dim();
  out.data.ids = ids;
  out.temporal_names = features::temporal_layout(cfg.features);
  out.spatial_names = features::spatial_layout(cfg.features);

  for (int l = 0; l < M; ++l) {
    const StationGrid& grid = grids[l];
    const features::GeoSummary& station_geo = geo.by_station.at(ids[l]);
    const int horizon_slots = static_cast<int>(horizon_hours * 3600 / step_sec);

    std::vector<Eigen::VectorXd> xs_rows, xt_rows;
    std::vector<double> targets;
    std::vector<std::int64_t> times;
    std::vector<std::vector<double>> rc_windows;

    for (int i = 0; i < grid.slots; ++i) {
      const std::int64_t t = grid.time_at(i);
      if (t % 3600 != 0) continue;  // samples end on the hour
      if (i - window_slots + 1 < 0) {
        ++out.skipped_warmup;
        continue;
      }
      const int target_slot = i + horizon_slots;
      if (target_slot >= grid.slots || !std::isfinite(grid.columns[0][target_slot])) {
        ++out.skipped_target;
        continue;
      }

      // the five sensor windows, each gap-filled independently
      features::TimeSeriesWindow win[5];
      bool usable = true;
      for (int c = 0; c < 5; ++c) {
        win[c] = slice_window(grid.columns[c], i, window_slots, step_minutes);
        if (!features::fill_missing(win[c].values, cfg.features.max_missing_fraction)) {
          usable = false;
          break;
        }
      }
      if (!usable) {
        ++out.skipped_missing;
        continue;
      }

      features::MeteoSnapshot meteo;
      meteo.temperature_c = grid.ffilled[5][i];
      meteo.humidity_pct = grid.ffilled[6][i];
      meteo.barometer_hpa = grid.ffilled[7][i];
      meteo.wind_ms = grid.ffilled[8][i];
      const double weather = grid.ffilled[9][i];
      if (!std::isfinite(meteo.temperature_c) || !std::isfinite(meteo.humidity_pct) ||
          !std::isfinite(meteo.barometer_hpa) || !std::isfinite(meteo.wind_ms) ||
          !std::isfinite(weather)) {
        ++out.skipped_missing;
        continue;
      }
      meteo.weather_code = static_cast<int>(weather);

      const double hour_of_day = static_cast<double>((t % kSecondsPerDay + kSecondsPerDay) %
                                                     kSecondsPerDay) /
                                 3600.0;

      std::vector<double> neighbor_rc, neighbor_weight;
      for (int m = 0; m < M; ++m) {
        if (m == l) continue;
        const int slot = grids[m].slot_at_or_before(t);
        if (slot < 0) continue;
        const double rc = grids[m].ffilled[0][slot];
        if (!std::isfinite(rc)) continue;
        neighbor_rc.push_back(rc);
        neighbor_weight.push_back(out.coupling.C(l, m));
      }

      try {
        const auto temporal = features::build_temporal_view(win[0], win[1], win[2], win[3], win[4],
                                                            meteo, hour_of_day, cfg.features);
        const auto spatial =
            features::build_spatial_view(station_geo, neighbor_rc, neighbor_weight, cfg.features);
        xs_rows.push_back(Eigen::Map<const Eigen::VectorXd>(spatial.values.data(),
                                                            spatial.values.size()));
        xt_rows.push_back(Eigen::Map<const Eigen::VectorXd>(temporal.values.data(),
                                                            temporal.values.size()));
      } catch (const InvalidInput& e) {
        throw ParseError(dir + "/series/" + ids[l] + ".csv: sample at grid slot " +
                         std::to_string(i) + ": " + e.what());
      }
      targets.push_back(grid.columns[0][target_slot]);
      times.push_back(t);
      rc_windows.push_back(win[0].values);
    }

    if (targets.empty()) {
      throw ParseError(dir + "/series/" + ids[l] + ".csv: no usable samples for station '" +
                       ids[l] + "'");
    }
    Eigen::MatrixXd Xs(targets.size(), out.data.Ds), Xt(targets.size(), out.data.Dt);
    Eigen::VectorXd y(targets.size());
    for (std::size_t r = 0; r < targets.size(); ++r) {
      Xs.row(r) = xs_rows[r];
      Xt.row(r) = xt_rows[r];
      y(r) = targets[r];
    }
    out.data.Xs.push_back(std::move(Xs));
    out.data.Xt.push_back(std::move(Xt));
    out.data.y.push_back(std::move(y));
    out.sample_times.push_back(std::move(times));
    out.rc_windows.push_back(std::move(rc_windows));
  }

  out.data.validate();
  return out;
}

}  // namespace stmtmv::harness
