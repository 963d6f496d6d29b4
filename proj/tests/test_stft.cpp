#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wblcmp/rng.hpp"
#include "wblcmp/stft.hpp"

using namespace wblcmp;

namespace {

std::vector<double> windowed_frame(const std::vector<double>& x, const StftConfig& cfg, int t) {
  const auto w = sqrt_hann_window(cfg.frame_len);
  const long start = static_cast<long>(t) * cfg.frame_shift - (cfg.frame_len - cfg.frame_shift);
  std::vector<double> frame(cfg.frame_len, 0.0);
  for (int i = 0; i < cfg.frame_len; ++i) {
    const long s = start + i;
    if (s >= 0 && s < static_cast<long>(x.size())) frame[i] = x[s] * w[i];
  }
  return frame;
}

}  // namespace

TEST_CASE("analyze matches a naive DFT oracle on a bin-centered sine") {
  StftConfig cfg;
  const int k0 = 32;  // exact bin center
  const double freq = k0 * cfg.sample_rate / cfg.frame_len;
  std::vector<double> x(static_cast<size_t>(cfg.sample_rate / 2));
  for (size_t i = 0; i < x.size(); ++i)
    x[i] = std::sin(2.0 * M_PI * freq * i / cfg.sample_rate);

  const SpectralTensor spec = analyze({x}, cfg);
  const int t = spec.n_frames / 2;  // interior frame, fully overlapping the signal
  const auto ref = oracle::naive_rdft(windowed_frame(x, cfg, t));

  double frame_energy = 0.0, neighborhood = 0.0, err = 0.0;
  for (int f = 0; f < spec.n_bins; ++f) {
    err = std::max(err, std::abs(spec.at(t, f, 0) - ref[f]));
    const double one_sided = (f == 0 || f == spec.n_bins - 1) ? 1.0 : 2.0;
    const double e = one_sided * std::norm(spec.at(t, f, 0));
    frame_energy += e;
    if (std::abs(f - k0) <= 1) neighborhood += e;
  }
  CHECK(err < 1e-9 * std::sqrt(frame_energy));
  // sqrt-Hann leakage: the center bin holds ~81% of the energy and the
  // 3-bin neighborhood more than 99%
  CHECK(neighborhood / frame_energy > 0.99);
  CHECK(std::norm(spec.at(t, k0, 0)) * 2.0 / frame_energy > 0.8);
}

TEST_CASE("analyze of silence is silence") {
  StftConfig cfg;
  const SpectralTensor spec = analyze({std::vector<double>(4000, 0.0)}, cfg);
  double peak = 0.0;
  for (const auto& v : spec.data) peak = std::max(peak, std::abs(v));
  CHECK(peak == 0.0);
}

TEST_CASE("analyze of an impulse matches the windowed-impulse DFT") {
  StftConfig cfg;
  std::vector<double> x(2048, 0.0);
  x[0] = 1.0;
  const SpectralTensor spec = analyze({x}, cfg);
  // the start padding puts sample 0 at window position frame_len - shift,
  // where the sqrt-Hann window equals 1
  const int pos = cfg.frame_len - cfg.frame_shift;
  const double w0 = sqrt_hann_window(cfg.frame_len)[pos];
  CHECK(w0 == doctest::Approx(1.0));
  for (int f = 0; f < spec.n_bins; ++f) {
    const cplx expect = w0 * std::polar(1.0, -2.0 * M_PI * f * pos / cfg.frame_len);
    CHECK(std::abs(spec.at(0, f, 0) - expect) < 1e-12);
  }
}

TEST_CASE("round-trip reconstruction is exact in the interior") {
  StftConfig cfg;
  Rng rng(31);
  Audio x(2, std::vector<double>(static_cast<size_t>(cfg.sample_rate)));
  for (auto& ch : x)
    for (auto& v : ch) v = rng.gaussian();

  const Audio y = synthesize(analyze(x, cfg), cfg, x[0].size());
  for (size_t ch = 0; ch < x.size(); ++ch) {
    double num = 0.0, den = 0.0;
    for (size_t i = cfg.frame_len; i + cfg.frame_len < x[ch].size(); ++i) {
      num += (y[ch][i] - x[ch][i]) * (y[ch][i] - x[ch][i]);
      den += x[ch][i] * x[ch][i];
    }
    CHECK(std::sqrt(num / den) < 1e-4);  // -80 dB
    CHECK(std::sqrt(num / den) < 1e-12); // COLA is exact up to FFT round-off
  }
}

TEST_CASE("synthesize is linear and maps zeros to zeros") {
  StftConfig cfg;
  Rng rng(32);
  Audio x(1, std::vector<double>(8192));
  for (auto& v : x[0]) v = rng.gaussian();
  SpectralTensor s = analyze(x, cfg);

  SpectralTensor zeros(s.n_frames, s.n_bins, 1);
  const Audio z = synthesize(zeros, cfg);
  double peak = 0.0;
  for (const double v : z[0]) peak = std::max(peak, std::abs(v));
  CHECK(peak == 0.0);

  SpectralTensor scaled = s;
  for (auto& v : scaled.data) v *= cplx(2.5, 0.0);
  const Audio y1 = synthesize(s, cfg);
  const Audio y2 = synthesize(scaled, cfg);
  double err = 0.0;
  for (size_t i = 0; i < y1[0].size(); ++i) err = std::max(err, std::abs(y2[0][i] - 2.5 * y1[0][i]));
  CHECK(err < 1e-12);
}

TEST_CASE("analyze is linear") {
  StftConfig cfg;
  Rng rng(33);
  std::vector<double> x(6000), y(6000);
  for (auto& v : x) v = rng.gaussian();
  for (auto& v : y) v = rng.gaussian();
  std::vector<double> mix(6000);
  const double a = 0.7, b = -1.3;
  for (size_t i = 0; i < mix.size(); ++i) mix[i] = a * x[i] + b * y[i];

  const SpectralTensor sx = analyze({x}, cfg);
  const SpectralTensor sy = analyze({y}, cfg);
  const SpectralTensor sm = analyze({mix}, cfg);
  double err = 0.0, scale = 0.0;
  for (size_t i = 0; i < sm.data.size(); ++i) {
    err = std::max(err, std::abs(sm.data[i] - (a * sx.data[i] + b * sy.data[i])));
    scale = std::max(scale, std::abs(sm.data[i]));
  }
  CHECK(err < 1e-10 * scale);
}

TEST_CASE("Parseval consistency with one-sided doubling") {
  StftConfig cfg;
  Rng rng(34);
  std::vector<double> x(static_cast<size_t>(0.5 * cfg.sample_rate));
  for (auto& v : x) v = rng.gaussian();
  const SpectralTensor spec = analyze({x}, cfg);

  double spectral = 0.0;
  for (int t = 0; t < spec.n_frames; ++t)
    for (int f = 0; f < spec.n_bins; ++f) {
      const double one_sided = (f == 0 || f == spec.n_bins - 1) ? 1.0 : 2.0;
      spectral += one_sided * std::norm(spec.at(t, f, 0));
    }
  spectral /= cfg.frame_len;  // DFT Parseval: sum|X|^2 = N sum|x|^2

  double windowed = 0.0;
  for (int t = 0; t < spec.n_frames; ++t)
    for (const double v : windowed_frame(x, cfg, t)) windowed += v * v;

  CHECK(std::abs(spectral - windowed) / windowed < 1e-6);
}

TEST_CASE("config validation") {
  StftConfig bad;
  bad.frame_shift = 128;  // not 50% overlap
  CHECK_THROWS_AS(bad.validate(), ConfigInvalid);
  CHECK_THROWS_AS(analyze(Audio{}, StftConfig{}), ConfigInvalid);
  StftConfig cfg;
  CHECK_THROWS_AS(analyze({std::vector<double>(10, 0.0)}, cfg), ConfigInvalid);
}
