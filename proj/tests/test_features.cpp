#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <tuple>

#include "stmtmv/errors.hpp"
#include "stmtmv/features.hpp"

using namespace stmtmv;
using features::FeatureConfig;
using features::TimeSeriesWindow;

namespace {

TimeSeriesWindow win(std::vector<double> v, double step = 60.0) {
  return {std::move(v), step};
}

// Independent oracle: central moments by direct two-pass summation.
std::vector<double> moment_oracle(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    m2 += std::pow(v - mean, 2) / n;
    m3 += std::pow(v - mean, 3) / n;
    m4 += std::pow(v - mean, 4) / n;
  }
  return {mean, m2, m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3.0};
}

// Independent oracle: textbook O(N^2) DFT.
std::complex<double> naive_dft_bin(const std::vector<double>& x, int bin) {
  std::complex<double> acc(0.0, 0.0);
  const double n = static_cast<double>(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    const double angle = -2.0 * M_PI * bin * static_cast<double>(t) / n;
    acc += x[t] * std::complex<double>(std::cos(angle), std::sin(angle));
  }
  return acc;
}

// Independent oracle: recursive orthonormal Haar analysis collecting detail
// coefficients as (level, position, value), level 1 = finest.
void recursive_haar(const std::vector<double>& x, int level,
                    std::vector<std::tuple<int, int, double>>& details) {
  if (x.size() < 2) return;
  std::vector<double> approx(x.size() / 2);
  for (std::size_t i = 0; i < approx.size(); ++i) {
    approx[i] = (x[2 * i] + x[2 * i + 1]) / std::sqrt(2.0);
    details.emplace_back(level, static_cast<int>(i),
                         (x[2 * i] - x[2 * i + 1]) / std::sqrt(2.0));
  }
  recursive_haar(approx, level + 1, details);
}

std::vector<double> dwt_oracle(std::vector<double> x, int k) {
  int p = 1;
  while (p * 2 <= static_cast<int>(x.size())) p *= 2;
  x.resize(p);
  std::vector<std::tuple<int, int, double>> details;
  recursive_haar(x, 1, details);
  std::stable_sort(details.begin(), details.end(), [](const auto& a, const auto& b) {
    const double ma = std::abs(std::get<2>(a)), mb = std::abs(std::get<2>(b));
    if (ma != mb) return ma > mb;
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::get<1>(a) < std::get<1>(b);
  });
  std::vector<double> out(k, 0.0);
  for (int i = 0; i < k && i < static_cast<int>(details.size()); ++i) {
    out[i] = std::abs(std::get<2>(details[i]));
  }
  return out;
}

std::vector<double> random_series(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

}  // namespace

TEST_CASE("stat_features: constant series has zero spread") {
  const auto s = features::stat_features(win({5, 5, 5}));
  CHECK(s == std::vector<double>{5, 0, 5, 5, 0, 0});
}

TEST_CASE("stat_features: small analytic case") {
  const auto s = features::stat_features(win({1, 2, 3}));
  CHECK(s[0] == doctest::Approx(2.0));
  CHECK(s[1] == doctest::Approx(2.0 / 3.0));
  CHECK(s[2] == 3.0);
  CHECK(s[3] == 1.0);
  CHECK(s[4] == doctest::Approx(0.0));
}

TEST_CASE("stat_features: matches the moment oracle on a seeded normal draw") {
  std::mt19937_64 rng(42);
  const auto x = random_series(rng, 1000);
  const auto s = features::stat_features(win(x));
  const auto oracle = moment_oracle(x);
  CHECK(s[0] == doctest::Approx(oracle[0]).epsilon(1e-12));
  CHECK(s[1] == doctest::Approx(oracle[1]).epsilon(1e-12));
  CHECK(s[4] == doctest::Approx(oracle[2]).epsilon(1e-10));
  CHECK(s[5] == doctest::Approx(oracle[3]).epsilon(1e-10));
  CHECK(std::abs(s[4]) < 0.2);  // standard normal: skew ~ 0
  CHECK(std::abs(s[5]) < 0.2);  // excess kurtosis ~ 0
}

TEST_CASE("stat_features: shift and scale equivariance") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto x = random_series(rng, 40, 2.0);
    const double c = random_series(rng, 1)[0];
    const double a = std::abs(random_series(rng, 1)[0]) + 0.1;

    std::vector<double> shifted = x, scaled = x;
    for (double& v : shifted) v += c;
    for (double& v : scaled) v *= a;

    const auto s0 = features::stat_features(win(x));
    const auto s1 = features::stat_features(win(shifted));
    const auto s2 = features::stat_features(win(scaled));
    CHECK(s1[0] == doctest::Approx(s0[0] + c).epsilon(1e-10));
    CHECK(s1[1] == doctest::Approx(s0[1]).epsilon(1e-9));
    CHECK(s1[4] == doctest::Approx(s0[4]).epsilon(1e-7));
    CHECK(s1[5] == doctest::Approx(s0[5]).epsilon(1e-7));
    CHECK(s2[1] == doctest::Approx(s0[1] * a * a).epsilon(1e-9));
    CHECK(s2[4] == doctest::Approx(s0[4]).epsilon(1e-9));
    CHECK(s2[5] == doctest::Approx(s0[5]).epsilon(1e-9));
  }
}

TEST_CASE("stat_features: empty window rejected") {
  CHECK_THROWS_AS(features::stat_features(win({})), InvalidInput);
}

TEST_CASE("autocorrelation: lag 0 is 1 by definition") {
  std::mt19937_64 rng(3);
  CHECK(features::autocorrelation(win(random_series(rng, 16)), 0) == 1.0);
  CHECK(features::autocorrelation(win({2, 2, 2}), 0) == 1.0);
}

TEST_CASE("autocorrelation: zero-variance convention") {
  CHECK(features::autocorrelation(win({2, 2, 2, 2}), 1) == 0.0);
}

TEST_CASE("autocorrelation: alternating series at lag 1") {
  CHECK(features::autocorrelation(win({1, -1, 1, -1}), 1) == doctest::Approx(-0.75).epsilon(1e-14));
}

TEST_CASE("autocorrelation: reversal symmetry and |r| <= 1") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto x = random_series(rng, 24);
    auto rev = x;
    std::reverse(rev.begin(), rev.end());
    for (int lag : {1, 2, 5}) {
      const double r = features::autocorrelation(win(x), lag);
      CHECK(r == doctest::Approx(features::autocorrelation(win(rev), lag)).epsilon(1e-12));
      CHECK(std::abs(r) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("autocorrelation: lag out of range rejected") {
  CHECK_THROWS_AS(features::autocorrelation(win({1, 2, 3}), 3), InvalidInput);
  CHECK_THROWS_AS(features::autocorrelation(win({1, 2, 3}), -1), InvalidInput);
}

TEST_CASE("paa: even split") {
  CHECK(features::paa(win({1, 2, 3, 4}), 2) == std::vector<double>{1.5, 3.5});
}

TEST_CASE("paa: identity when segments == length") {
  std::mt19937_64 rng(5);
  const auto x = random_series(rng, 9);
  const auto p = features::paa(win(x), 9);
  for (int i = 0; i < 9; ++i) CHECK(p[i] == doctest::Approx(x[i]).epsilon(1e-14));
}

TEST_CASE("paa: fractional boundary weights") {
  const auto p = features::paa(win({1, 2, 3}), 2);
  CHECK(p[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("paa: preserves the mean under equal supports") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 5 + static_cast<int>(rng() % 40);
    const int s = 1 + static_cast<int>(rng() % n);
    const auto x = random_series(rng, n);
    const auto p = features::paa(win(x), s);
    double mean_in = 0, mean_out = 0;
    for (double v : x) mean_in += v / n;
    for (double v : p) mean_out += v / s;
    CHECK(mean_out == doctest::Approx(mean_in).epsilon(1e-10));
  }
}

TEST_CASE("paa: bad segment counts rejected") {
  CHECK_THROWS_AS(features::paa(win({1, 2, 3}), 4), InvalidInput);
  CHECK_THROWS_AS(features::paa(win({1, 2, 3}), 0), InvalidInput);
}

TEST_CASE("pla: constant series gives zero slopes") {
  const auto c = features::pla(win({4, 4, 4, 4, 4, 4}), 3);
  CHECK(c == std::vector<double>{0, 4, 0, 4, 0, 4});
}

TEST_CASE("pla: exact line recovered") {
  std::vector<double> x(10);
  for (int t = 0; t < 10; ++t) x[t] = 2.0 * t + 1.0;
  const auto c = features::pla(win(x), 1);
  CHECK(c[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(c[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("pla: per-segment least squares matches the normal equations") {
  // [0,1] -> slope 1, intercept 0; [4,9] local -> slope 5, intercept 4
  const auto c = features::pla(win({0, 1, 4, 9}), 2);
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(0.0));
  CHECK(c[2] == doctest::Approx(5.0));
  CHECK(c[3] == doctest::Approx(4.0));

  // general segment against a direct normal-equation solve
  std::mt19937_64 rng(17);
  const auto x = random_series(rng, 11);
  const auto coeffs = features::pla(win(x), 2);  // segments of 6 and 5
  auto ols = [](const std::vector<double>& seg) {
    const int n = static_cast<int>(seg.size());
    double st = 0, sx = 0, stt = 0, stx = 0;
    for (int t = 0; t < n; ++t) {
      st += t;
      sx += seg[t];
      stt += static_cast<double>(t) * t;
      stx += t * seg[t];
    }
    const double slope = (n * stx - st * sx) / (n * stt - st * st);
    return std::pair{slope, (sx - slope * st) / n};
  };
  const auto [s0, i0] = ols({x.begin(), x.begin() + 6});
  const auto [s1, i1] = ols({x.begin() + 6, x.end()});
  CHECK(coeffs[0] == doctest::Approx(s0).epsilon(1e-10));
  CHECK(coeffs[1] == doctest::Approx(i0).epsilon(1e-10));
  CHECK(coeffs[2] == doctest::Approx(s1).epsilon(1e-10));
  CHECK(coeffs[3] == doctest::Approx(i1).epsilon(1e-10));
}

TEST_CASE("pla: segments with fewer than 2 points rejected") {
  CHECK_THROWS_AS(features::pla(win({1, 2, 3}), 2), InvalidInput);
}

TEST_CASE("fft_topk: constant series has no non-DC energy") {
  CHECK(features::fft_topk(win({3, 3, 3, 3}), 3) == std::vector<double>{0, 0, 0});
}

TEST_CASE("fft_topk: pure cosine concentrates at its bin") {
  std::vector<double> x(16);
  for (int t = 0; t < 16; ++t) x[t] = std::cos(2.0 * M_PI * 2.0 * t / 16.0);
  const auto top = features::fft_topk(win(x), 3);
  CHECK(top[0] == doctest::Approx(std::abs(naive_dft_bin(x, 2))).epsilon(1e-10));
  CHECK(top[0] == doctest::Approx(8.0).epsilon(1e-10));  // N/2 for a unit cosine
  CHECK(top[1] == doctest::Approx(0.0).scale(1).epsilon(1e-9));
}

TEST_CASE("fft_topk: two sinusoids ranked like the naive DFT") {
  std::vector<double> x(32);
  for (int t = 0; t < 32; ++t) {
    x[t] = 3.0 * std::sin(2.0 * M_PI * 5.0 * t / 32.0) + 1.5 * std::cos(2.0 * M_PI * 9.0 * t / 32.0);
  }
  const auto top = features::fft_topk(win(x), 2);
  CHECK(top[0] == doctest::Approx(std::abs(naive_dft_bin(x, 5))).epsilon(1e-10));
  CHECK(top[1] == doctest::Approx(std::abs(naive_dft_bin(x, 9))).epsilon(1e-10));
}

TEST_CASE("fft_topk: full half-spectrum agrees with the naive DFT oracle") {
  std::mt19937_64 rng(23);
  const auto x = random_series(rng, 20);
  std::vector<double> mags;
  for (int b = 1; b <= 10; ++b) mags.push_back(std::abs(naive_dft_bin(x, b)));
  std::sort(mags.rbegin(), mags.rend());
  const auto top = features::fft_topk(win(x), 10);
  for (int i = 0; i < 10; ++i) CHECK(top[i] == doctest::Approx(mags[i]).epsilon(1e-9));
}

TEST_CASE("fft_topk: invariant under mean shifts") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_series(rng, 24);
    auto shifted = x;
    for (double& v : shifted) v += 17.5;
    const auto a = features::fft_topk(win(x), 3);
    const auto b = features::fft_topk(win(shifted), 3);
    for (int i = 0; i < 3; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-8).scale(25));
  }
}

TEST_CASE("dwt_topk: constant series has vanishing details") {
  CHECK(features::dwt_topk(win({2, 2, 2, 2}), 3) == std::vector<double>{0, 0, 0});
}

TEST_CASE("dwt_topk: step series dominated by the coarsest level") {
  const auto top = features::dwt_topk(win({1, 1, -1, -1}), 3);
  CHECK(top[0] == doctest::Approx(2.0).epsilon(1e-14));  // coarsest detail of the step
  CHECK(top[1] == 0.0);
  CHECK(top[2] == 0.0);
}

TEST_CASE("dwt_topk: ramp matches the recursive oracle") {
  std::vector<double> ramp(8);
  for (int i = 0; i < 8; ++i) ramp[i] = i;
  const auto got = features::dwt_topk(win(ramp), 3);
  const auto want = dwt_oracle(ramp, 3);
  for (int i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("dwt_topk: non-power-of-two lengths truncate, then match the oracle") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5 + static_cast<int>(rng() % 60);
    const auto x = random_series(rng, n);
    const auto got = features::dwt_topk(win(x), 3);
    const auto want = dwt_oracle(x, 3);
    for (int i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-10));
  }
}

TEST_CASE("dwt_topk: invariant under mean shifts") {
  std::mt19937_64 rng(37);
  const auto x = random_series(rng, 16);
  auto shifted = x;
  for (double& v : shifted) v -= 40.0;
  const auto a = features::dwt_topk(win(x), 3);
  const auto b = features::dwt_topk(win(shifted), 3);
  for (int i = 0; i < 3; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-8).scale(40));
}

namespace {

features::MeteoSnapshot default_meteo() {
  features::MeteoSnapshot m;
  m.temperature_c = 21.0;
  m.humidity_pct = 60.0;
  m.barometer_hpa = 1012.0;
  m.wind_ms = 3.5;
  m.weather_code = 1;
  return m;
}

}  // namespace

TEST_CASE("build_temporal_view: dimension arithmetic") {
  FeatureConfig cfg;
  CHECK(cfg.per_series_dim() == 27);
  CHECK(cfg.temporal_dim() == 146);  // 135 + 4 + 5 + 2
  CHECK(cfg.spatial_dim() == 24);
}

TEST_CASE("build_temporal_view: layout, composition and determinism") {
  FeatureConfig cfg;
  std::mt19937_64 rng(101);
  const TimeSeriesWindow rc = win(random_series(rng, 12));
  const TimeSeriesWindow tu = win(random_series(rng, 12));
  const TimeSeriesWindow ph = win(random_series(rng, 12));
  const TimeSeriesWindow flow = win(random_series(rng, 12));
  const TimeSeriesWindow press = win(random_series(rng, 12));

  const auto fv = features::build_temporal_view(rc, tu, ph, flow, press, default_meteo(), 7.0, cfg);
  REQUIRE(static_cast<int>(fv.values.size()) == cfg.temporal_dim());
  REQUIRE(fv.names.size() == fv.values.size());

  // golden check: the view is exactly the composition of the per-op outputs
  std::vector<double> expect;
  for (const auto* w : {&rc, &tu, &ph, &flow, &press}) {
    const auto stats = features::stat_features(*w);
    expect.insert(expect.end(), stats.begin(), stats.end());
    for (int lag : cfg.autocorr_lags) expect.push_back(features::autocorrelation(*w, lag));
    const auto p = features::paa(*w, cfg.paa_segments);
    expect.insert(expect.end(), p.begin(), p.end());
    const auto l = features::pla(*w, cfg.pla_segments);
    expect.insert(expect.end(), l.begin(), l.end());
    const auto f = features::fft_topk(*w, cfg.fft_k);
    expect.insert(expect.end(), f.begin(), f.end());
    const auto d = features::dwt_topk(*w, cfg.dwt_k);
    expect.insert(expect.end(), d.begin(), d.end());
  }
  expect.insert(expect.end(), {21.0, 60.0, 1012.0, 3.5});
  expect.insert(expect.end(), {0.0, 1.0, 0.0, 0.0, 0.0});
  expect.push_back(std::sin(2.0 * M_PI * 7.0 / 24.0));
  expect.push_back(std::cos(2.0 * M_PI * 7.0 / 24.0));
  REQUIRE(expect.size() == fv.values.size());
  for (std::size_t i = 0; i < expect.size(); ++i) {
    CHECK(fv.values[i] == expect[i]);  // bit-identical composition
  }

  // determinism: a second call reproduces the same bytes
  const auto fv2 = features::build_temporal_view(rc, tu, ph, flow, press, default_meteo(), 7.0, cfg);
  CHECK(fv.values == fv2.values);
  CHECK(fv.names == fv2.names);

  // a couple of layout anchors
  CHECK(fv.names[0] == "rc.mean");
  CHECK(fv.names[27] == "turbidity.mean");
  CHECK(fv.names.back() == "tod.cos");
}

TEST_CASE("build_temporal_view: all-constant inputs zero the dynamic features") {
  FeatureConfig cfg;
  const auto c = win(std::vector<double>(12, 3.0));
  const auto fv = features::build_temporal_view(c, c, c, c, c, default_meteo(), 0.0, cfg);
  for (std::size_t i = 0; i < fv.names.size(); ++i) {
    const auto& n = fv.names[i];
    if (n.find(".acf_") != std::string::npos || n.find(".fft_") != std::string::npos ||
        n.find(".dwt_") != std::string::npos || n.find(".pla_slope_") != std::string::npos ||
        n.find(".skew") != std::string::npos || n.find(".kurt") != std::string::npos) {
      CHECK(fv.values[i] == 0.0);
    }
  }
}

TEST_CASE("build_temporal_view: mismatched spans rejected") {
  FeatureConfig cfg;
  const auto a = win(std::vector<double>(12, 1.0));
  const auto b = win(std::vector<double>(13, 1.0));
  CHECK_THROWS_AS(features::build_temporal_view(a, a, a, a, b, default_meteo(), 0.0, cfg),
                  InvalidInput);
  const auto c = win(std::vector<double>(12, 1.0), 30.0);  // different step
  CHECK_THROWS_AS(features::build_temporal_view(a, a, a, c, a, default_meteo(), 0.0, cfg),
                  InvalidInput);
}

TEST_CASE("build_temporal_view: weather code must be in the vocabulary") {
  FeatureConfig cfg;
  auto m = default_meteo();
  m.weather_code = 9;
  const auto a = win(std::vector<double>(12, 1.0));
  CHECK_THROWS_AS(features::build_temporal_view(a, a, a, a, a, m, 0.0, cfg), InvalidInput);
}

TEST_CASE("build_spatial_view: aggregate conventions") {
  FeatureConfig cfg;
  features::GeoSummary geo;
  geo.road_total_length_km = 12.5;
  geo.road_intersections = 40;
  geo.poi_density = 210.0;
  geo.poi_counts.assign(20, 1.0);

  const auto zero = features::build_spatial_view(geo, {0.4, 0.8}, {0.0, 0.0}, cfg);
  CHECK(zero.values.back() == 0.0);
  CHECK(static_cast<int>(zero.values.size()) == 24);
  CHECK(zero.values[0] == 12.5);
  CHECK(zero.values[1] == 40.0);
  CHECK(zero.values[2] == 210.0);

  const auto single = features::build_spatial_view(geo, {0.8}, {1.0}, cfg);
  CHECK(single.values.back() == doctest::Approx(0.8));

  const auto weighted = features::build_spatial_view(geo, {0.4, 0.8}, {1.0, 3.0}, cfg);
  CHECK(weighted.values.back() == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("build_spatial_view: bad inputs rejected") {
  FeatureConfig cfg;
  features::GeoSummary geo;
  geo.poi_counts.assign(20, 0.0);
  CHECK_THROWS_AS(features::build_spatial_view(geo, {0.1}, {1.0, 2.0}, cfg), InvalidInput);
  CHECK_THROWS_AS(features::build_spatial_view(geo, {0.1}, {-1.0}, cfg), InvalidInput);
  geo.poi_counts.assign(7, 0.0);
  CHECK_THROWS_AS(features::build_spatial_view(geo, {0.1}, {1.0}, cfg), InvalidInput);
}

TEST_CASE("fill_missing: forward fill within budget") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> v = {nan, 1.0, nan, 3.0, 4.0, nan, 6.0, 7.0, 8.0, 9.0};
  CHECK(features::fill_missing(v, 0.3));
  CHECK(v == std::vector<double>{1, 1, 1, 3, 4, 4, 6, 7, 8, 9});

  std::vector<double> too_sparse = {nan, nan, nan, 1.0};
  CHECK_FALSE(features::fill_missing(too_sparse, 0.2));
  CHECK(std::isnan(too_sparse[0]));  // untouched on rejection

  std::vector<double> all_missing = {nan, nan};
  CHECK_FALSE(features::fill_missing(all_missing, 1.0));
}
