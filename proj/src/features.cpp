#include "stmtmv/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include <unsupported/Eigen/FFT>

#include "stmtmv/errors.hpp"

namespace stmtmv::features {

namespace {

void require_nonempty(const TimeSeriesWindow& w, const char* op) {
  if (w.values.empty()) {
    throw InvalidInput(std::string(op) + ": empty window");
  }
}

}  // namespace

int FeatureConfig::per_series_dim() const {
  return 6 + static_cast<int>(autocorr_lags.size()) + paa_segments +
         2 * pla_segments + fft_k + dwt_k;
}

int FeatureConfig::temporal_dim() const {
  return 5 * per_series_dim() + 4 + static_cast<int>(weather_vocab.size()) + 2;
}

int FeatureConfig::spatial_dim() const { return 4 + poi_categories; }

std::vector<double> stat_features(const TimeSeriesWindow& w) {
  require_nonempty(w, "stat_features");
  const auto& x = w.values;
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;

  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  double skew = 0.0, kurt = 0.0;
  if (m2 > 0.0) {
    skew = m3 / std::pow(m2, 1.5);
    kurt = m4 / (m2 * m2) - 3.0;
  }
  return {mean, m2, *mx, *mn, skew, kurt};
}

double autocorrelation(const TimeSeriesWindow& w, int lag) {
  require_nonempty(w, "autocorrelation");
  const auto& x = w.values;
  const int n = static_cast<int>(x.size());
  if (lag < 0 || lag >= n) {
    throw InvalidInput("autocorrelation: lag " + std::to_string(lag) +
                       " out of range for window of length " + std::to_string(n));
  }
  if (lag == 0) return 1.0;

  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double denom = 0.0;
  for (double v : x) denom += (v - mean) * (v - mean);
  if (denom == 0.0) return 0.0;

  double num = 0.0;
  for (int t = 0; t + lag < n; ++t) num += (x[t] - mean) * (x[t + lag] - mean);
  return num / denom;
}

std::vector<double> paa(const TimeSeriesWindow& w, int segments) {
  require_nonempty(w, "paa");
  const int n = static_cast<int>(w.values.size());
  if (segments < 1 || segments > n) {
    throw InvalidInput("paa: need 1 <= segments <= length, got segments=" +
                       std::to_string(segments) + " for length " + std::to_string(n));
  }
  // Sample t occupies [t, t+1); segment s occupies [s*n/S, (s+1)*n/S).
  // Fractional overlap makes every segment's support exactly n/S.
  const double support = static_cast<double>(n) / segments;
  std::vector<double> out(segments, 0.0);
  for (int s = 0; s < segments; ++s) {
    const double lo = s * support;
    const double hi = (s + 1) * support;
    double acc = 0.0;
    for (int t = static_cast<int>(std::floor(lo)); t < n && t < hi; ++t) {
      const double overlap = std::min(hi, t + 1.0) - std::max(lo, static_cast<double>(t));
      if (overlap > 0.0) acc += overlap * w.values[t];
    }
    out[s] = acc / support;
  }
  return out;
}

std::vector<double> pla(const TimeSeriesWindow& w, int segments) {
  require_nonempty(w, "pla");
  const int n = static_cast<int>(w.values.size());
  if (segments < 1 || n / segments < 2) {
    throw InvalidInput("pla: each segment needs >= 2 points (length " +
                       std::to_string(n) + ", segments " + std::to_string(segments) + ")");
  }
  std::vector<double> out;
  out.reserve(2 * segments);
  const int base = n / segments;
  const int extra = n % segments;
  int start = 0;
  for (int s = 0; s < segments; ++s) {
    const int len = base + (s < extra ? 1 : 0);
    double tbar = 0.0, xbar = 0.0;
    for (int i = 0; i < len; ++i) {
      tbar += i;
      xbar += w.values[start + i];
    }
    tbar /= len;
    xbar /= len;
    double sxy = 0.0, sxx = 0.0;
    for (int i = 0; i < len; ++i) {
      sxy += (i - tbar) * (w.values[start + i] - xbar);
      sxx += (i - tbar) * (i - tbar);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    out.push_back(slope);
    out.push_back(xbar - slope * tbar);
    start += len;
  }
  return out;
}

std::vector<double> fft_topk(const TimeSeriesWindow& w, int k) {
  const int n = static_cast<int>(w.values.size());
  if (n < 2) throw InvalidInput("fft_topk: window length must be >= 2");
  if (k < 0) throw InvalidInput("fft_topk: k must be non-negative");

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, w.values);

  const int half = n / 2;  // non-DC half-spectrum bins 1..half
  std::vector<std::pair<double, int>> mags;
  mags.reserve(half);
  for (int b = 1; b <= half; ++b) mags.emplace_back(std::abs(spectrum[b]), b);
  std::stable_sort(mags.begin(), mags.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });

  std::vector<double> out(k, 0.0);
  for (int i = 0; i < k && i < static_cast<int>(mags.size()); ++i) out[i] = mags[i].first;
  return out;
}

std::vector<double> dwt_topk(const TimeSeriesWindow& w, int k) {
  const int n = static_cast<int>(w.values.size());
  if (n < 2) throw InvalidInput("dwt_topk: window length must be >= 2");
  if (k < 0) throw InvalidInput("dwt_topk: k must be non-negative");

  int pow2 = 1;
  while (pow2 * 2 <= n) pow2 *= 2;
  std::vector<double> approx(w.values.begin(), w.values.begin() + pow2);

  struct Detail {
    double mag;
    int level;  // 1 = finest
    int pos;
  };
  std::vector<Detail> details;
  details.reserve(pow2 - 1);

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  int level = 1;
  while (approx.size() > 1) {
    const std::size_t half = approx.size() / 2;
    std::vector<double> next(half);
    for (std::size_t i = 0; i < half; ++i) {
      const double a = approx[2 * i];
      const double b = approx[2 * i + 1];
      next[i] = (a + b) * inv_sqrt2;
      details.push_back({std::abs((a - b) * inv_sqrt2), level, static_cast<int>(i)});
    }
    approx = std::move(next);
    ++level;
  }

  std::stable_sort(details.begin(), details.end(), [](const Detail& a, const Detail& b) {
    if (a.mag != b.mag) return a.mag > b.mag;
    if (a.level != b.level) return a.level > b.level;  // coarser first
    return a.pos < b.pos;
  });

  std::vector<double> out(k, 0.0);
  for (int i = 0; i < k && i < static_cast<int>(details.size()); ++i) out[i] = details[i].mag;
  return out;
}

namespace {

void append_series_features(const TimeSeriesWindow& w, const FeatureConfig& cfg,
                            std::vector<double>& values) {
  const auto stats = stat_features(w);
  values.insert(values.end(), stats.begin(), stats.end());
  for (int lag : cfg.autocorr_lags) values.push_back(autocorrelation(w, lag));
  const auto p = paa(w, cfg.paa_segments);
  values.insert(values.end(), p.begin(), p.end());
  const auto l = pla(w, cfg.pla_segments);
  values.insert(values.end(), l.begin(), l.end());
  const auto f = fft_topk(w, cfg.fft_k);
  values.insert(values.end(), f.begin(), f.end());
  const auto d = dwt_topk(w, cfg.dwt_k);
  values.insert(values.end(), d.begin(), d.end());
}

void append_series_layout(const std::string& series, const FeatureConfig& cfg,
                          std::vector<std::string>& names) {
  for (const char* s : {"mean", "var", "max", "min", "skew", "kurt"})
    names.push_back(series + "." + s);
  for (int lag : cfg.autocorr_lags)
    names.push_back(series + ".acf_lag" + std::to_string(lag));
  for (int i = 0; i < cfg.paa_segments; ++i)
    names.push_back(series + ".paa_" + std::to_string(i));
  for (int i = 0; i < cfg.pla_segments; ++i) {
    names.push_back(series + ".pla_slope_" + std::to_string(i));
    names.push_back(series + ".pla_icpt_" + std::to_string(i));
  }
  for (int i = 0; i < cfg.fft_k; ++i)
    names.push_back(series + ".fft_" + std::to_string(i));
  for (int i = 0; i < cfg.dwt_k; ++i)
    names.push_back(series + ".dwt_" + std::to_string(i));
}

constexpr const char* kSeriesNames[5] = {"rc", "turbidity", "ph", "flow", "pressure"};

}  // namespace

std::vector<std::string> temporal_layout(const FeatureConfig& cfg) {
  std::vector<std::string> names;
  names.reserve(cfg.temporal_dim());
  for (const char* s : kSeriesNames) append_series_layout(s, cfg, names);
  for (const char* m : {"meteo.temp_c", "meteo.humidity_pct", "meteo.baro_hpa", "meteo.wind_ms"})
    names.push_back(m);
  for (int code : cfg.weather_vocab)
    names.push_back("weather.code_" + std::to_string(code));
  names.push_back("tod.sin");
  names.push_back("tod.cos");
  return names;
}

std::vector<std::string> spatial_layout(const FeatureConfig& cfg) {
  std::vector<std::string> names;
  names.reserve(cfg.spatial_dim());
  names.push_back("geo.road_len_km");
  names.push_back("geo.intersections");
  names.push_back("geo.poi_density");
  for (int i = 1; i <= cfg.poi_categories; ++i) {
    names.push_back("geo.poi_c" + std::string(i < 10 ? "0" : "") + std::to_string(i));
  }
  names.push_back("neighbors.rc_weighted_mean");
  return names;
}

FeatureVector build_temporal_view(const TimeSeriesWindow& rc,
                                  const TimeSeriesWindow& turbidity,
                                  const TimeSeriesWindow& ph,
                                  const TimeSeriesWindow& flow,
                                  const TimeSeriesWindow& pressure,
                                  const MeteoSnapshot& meteo,
                                  double hour_of_day,
                                  const FeatureConfig& cfg) {
  const TimeSeriesWindow* series[5] = {&rc, &turbidity, &ph, &flow, &pressure};
  for (const auto* s : series) {
    if (s->values.size() != rc.values.size() || s->step_minutes != rc.step_minutes) {
      throw InvalidInput("build_temporal_view: windows must share one span and step");
    }
  }
  if (hour_of_day < 0.0 || hour_of_day >= 24.0) {
    throw InvalidInput("build_temporal_view: hour_of_day must lie in [0, 24)");
  }
  if (meteo.humidity_pct < 0.0 || meteo.humidity_pct > 100.0) {
    throw InvalidInput("build_temporal_view: humidity outside [0, 100]");
  }
  const auto vocab_it =
      std::find(cfg.weather_vocab.begin(), cfg.weather_vocab.end(), meteo.weather_code);
  if (vocab_it == cfg.weather_vocab.end()) {
    throw InvalidInput("build_temporal_view: weather code " +
                       std::to_string(meteo.weather_code) + " not in vocabulary");
  }

  FeatureVector fv;
  fv.values.reserve(cfg.temporal_dim());
  for (const auto* s : series) append_series_features(*s, cfg, fv.values);
  fv.values.push_back(meteo.temperature_c);
  fv.values.push_back(meteo.humidity_pct);
  fv.values.push_back(meteo.barometer_hpa);
  fv.values.push_back(meteo.wind_ms);
  for (int code : cfg.weather_vocab) fv.values.push_back(code == meteo.weather_code ? 1.0 : 0.0);
  const double angle = 2.0 * M_PI * hour_of_day / 24.0;
  fv.values.push_back(std::sin(angle));
  fv.values.push_back(std::cos(angle));

  fv.names = temporal_layout(cfg);
  return fv;
}

FeatureVector build_spatial_view(const GeoSummary& geo,
                                 const std::vector<double>& neighbor_rc,
                                 const std::vector<double>& coupling_row,
                                 const FeatureConfig& cfg) {
  if (neighbor_rc.size() != coupling_row.size()) {
    throw InvalidInput("build_spatial_view: neighbor readings and coupling row differ in length");
  }
  if (static_cast<int>(geo.poi_counts.size()) != cfg.poi_categories) {
    throw InvalidInput("build_spatial_view: expected " + std::to_string(cfg.poi_categories) +
                       " POI categories, got " + std::to_string(geo.poi_counts.size()));
  }
  double wsum = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < coupling_row.size(); ++i) {
    if (coupling_row[i] < 0.0) {
      throw InvalidInput("build_spatial_view: coupling weights must be non-negative");
    }
    wsum += coupling_row[i];
    acc += coupling_row[i] * neighbor_rc[i];
  }

  FeatureVector fv;
  fv.values.reserve(cfg.spatial_dim());
  fv.values.push_back(geo.road_total_length_km);
  fv.values.push_back(geo.road_intersections);
  fv.values.push_back(geo.poi_density);
  fv.values.insert(fv.values.end(), geo.poi_counts.begin(), geo.poi_counts.end());
  fv.values.push_back(wsum > 0.0 ? acc / wsum : 0.0);
  fv.names = spatial_layout(cfg);
  return fv;
}

bool fill_missing(std::vector<double>& values, double max_missing_fraction) {
  if (values.empty()) return false;
  std::size_t missing = 0;
  for (double v : values)
    if (!std::isfinite(v)) ++missing;
  if (missing == 0) return true;
  if (static_cast<double>(missing) > max_missing_fraction * values.size()) return false;

  double first_finite = 0.0;
  bool found = false;
  for (double v : values) {
    if (std::isfinite(v)) {
      first_finite = v;
      found = true;
      break;
    }
  }
  if (!found) return false;

  double last = first_finite;
  for (double& v : values) {
    if (std::isfinite(v)) {
      last = v;
    } else {
      v = last;
    }
  }
  return true;
}

}  // namespace stmtmv::features
