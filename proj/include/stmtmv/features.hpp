#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stmtmv::features {

// A uniformly sampled sensor series covering the trailing observation window
// (12 hours by default at the dataset level). Values must be finite; missing
// samples are resolved with fill_missing() before a window is built.
struct TimeSeriesWindow {
  std::vector<double> values;
  double step_minutes = 60.0;

  std::size_t size() const { return values.size(); }
  double span_hours() const {
    return static_cast<double>(values.size()) * step_minutes / 60.0;
  }
};

// Meteorological snapshot taken at the prediction time. The weather code is
// categorical over a vocabulary declared in FeatureConfig.
struct MeteoSnapshot {
  double temperature_c = 0.0;
  double humidity_pct = 0.0;
  double barometer_hpa = 0.0;
  double wind_ms = 0.0;
  int weather_code = 0;
};

// Precomputed geographic summary of a station's affecting region.
struct GeoSummary {
  double road_total_length_km = 0.0;   // f_rl
  double road_intersections = 0.0;     // f_rs
  std::vector<double> poi_counts;      // fixed category ordering
  double poi_density = 0.0;            // count per km^2
};

// A flat feature vector plus its deterministic layout: names[i] describes
// values[i]. Layout depends only on FeatureConfig, never on the data.
struct FeatureVector {
  std::vector<double> values;
  std::vector<std::string> names;
};

struct FeatureConfig {
  std::vector<int> autocorr_lags = {1, 2, 3};
  int paa_segments = 4;
  int pla_segments = 4;
  int fft_k = 3;
  int dwt_k = 3;
  std::vector<int> weather_vocab = {0, 1, 2, 3, 4};
  int poi_categories = 20;
  double window_hours = 12.0;
  double max_missing_fraction = 0.2;

  int per_series_dim() const;
  int temporal_dim() const;  // D_t
  int spatial_dim() const;   // D_s
};

// Population moments of the window: (mean, variance, max, min, skewness,
// excess kurtosis). Skewness and kurtosis are 0 for zero-variance series.
std::vector<double> stat_features(const TimeSeriesWindow& w);

// Biased autocorrelation estimate at the given lag, in [-1, 1]. r(0) = 1;
// zero-variance series give 0 at positive lags.
double autocorrelation(const TimeSeriesWindow& w, int lag);

// Piecewise aggregate approximation: per-segment means over equal-support
// partitions. Samples straddling a boundary contribute fractional weight to
// both sides so every segment averages exactly n/segments samples.
std::vector<double> paa(const TimeSeriesWindow& w, int segments);

// Piecewise linear approximation: least-squares (slope, intercept) per
// segment, fitted on local sample index. Output is
// (slope_0, intercept_0, slope_1, intercept_1, ...).
std::vector<double> pla(const TimeSeriesWindow& w, int segments);

// Magnitudes of the k largest non-DC DFT coefficients over the half spectrum
// (bins 1..floor(n/2)), in descending-magnitude order, ties broken toward the
// lower frequency. Zero-padded when fewer bins exist.
std::vector<double> fft_topk(const TimeSeriesWindow& w, int k = 3);

// Magnitudes of the k largest Haar detail coefficients from a full
// orthonormal decomposition of the window truncated to its largest
// power-of-two prefix. Ties prefer the coarser level, then lower position.
std::vector<double> dwt_topk(const TimeSeriesWindow& w, int k = 3);

// Concatenates, for each of the five series (rc, turbidity, ph, flow,
// pressure): stats(6) | autocorr(|lags|) | paa | pla | fft_topk | dwt_topk,
// followed by the four numeric meteo fields, the weather one-hot, and the
// (sin, cos) encoding of hour-of-day. Layout is fixed given the config.
FeatureVector build_temporal_view(const TimeSeriesWindow& rc,
                                  const TimeSeriesWindow& turbidity,
                                  const TimeSeriesWindow& ph,
                                  const TimeSeriesWindow& flow,
                                  const TimeSeriesWindow& pressure,
                                  const MeteoSnapshot& meteo,
                                  double hour_of_day,
                                  const FeatureConfig& cfg);

// Concatenates road length, intersections, POI density, per-category POI
// counts and the coupling-weighted mean of the neighbors' latest RC readings
// (0 when all weights vanish). D_s = 4 + poi_categories.
FeatureVector build_spatial_view(const GeoSummary& geo,
                                 const std::vector<double>& neighbor_rc,
                                 const std::vector<double>& coupling_row,
                                 const FeatureConfig& cfg);

// Layout-only variants used by `features --describe`; deterministic per cfg.
std::vector<std::string> temporal_layout(const FeatureConfig& cfg);
std::vector<std::string> spatial_layout(const FeatureConfig& cfg);

// Forward-fills NaN gaps in place (leading gaps take the first finite value).
// Returns false, leaving `values` untouched, when the missing fraction
// exceeds `max_missing_fraction` or no finite sample exists.
bool fill_missing(std::vector<double>& values, double max_missing_fraction);

}  // namespace stmtmv::features
