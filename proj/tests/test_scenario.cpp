#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "oracles.hpp"
#include "wblcmp/metrics.hpp"
#include "wblcmp/rng.hpp"
#include "wblcmp/scenario.hpp"

using namespace wblcmp;

namespace {

double energy(const std::vector<double>& x, size_t a, size_t b) {
  double e = 0.0;
  for (size_t i = a; i < std::min(b, x.size()); ++i) e += x[i] * x[i];
  return e;
}

// small 4-mic scene with one target, one interferer, short duration
ScenarioSpec small_spec(double duration = 7.0, double t60 = 0.4) {
  ScenarioSpec spec = paper_switching_target_spec(7, 39.0);
  spec.duration = duration;
  spec.t60 = t60;
  spec.sources.resize(2);
  spec.sources[0].activity = {2.0, duration};
  spec.sources[1].role = SourceRole::interferer;
  spec.sources[1].position = {-1.5, -1.0, 0.0};
  spec.sources[1].activity = {1.0, duration};
  return spec;
}

}  // namespace

TEST_CASE("generate_rir: near-anechoic tail stays under 1% of the direct energy") {
  const Vec3 src{0.0, 2.0, 0.0};
  const Vec3 mic{0.05, 0.0, 0.0};
  const auto h = generate_rir(src, mic, 0.001, 16000.0, 99);
  const double delay = std::sqrt(0.05 * 0.05 + 4.0) / kSpeedOfSound * 16000.0;
  const size_t cut = static_cast<size_t>(delay) + 42;  // end of the direct sinc support
  const double direct = energy(h, 0, cut);
  const double tail = energy(h, cut, h.size());
  CHECK(tail < 0.01 * direct);
}

TEST_CASE("generate_rir: equidistant mics share the direct-path delay") {
  const Vec3 src{0.0, 2.0, 0.0};
  const auto h1 = generate_rir(src, Vec3{0.5, 0.0, 0.0}, 0.001, 16000.0, 1);
  const auto h2 = generate_rir(src, Vec3{-0.5, 0.0, 0.0}, 0.001, 16000.0, 2);
  // near-anechoic: the peak is the direct tap
  const auto argmax = [](const std::vector<double>& h) {
    size_t best = 0;
    for (size_t i = 1; i < h.size(); ++i)
      if (std::abs(h[i]) > std::abs(h[best])) best = i;
    return best;
  };
  CHECK(argmax(h1) == argmax(h2));
}

TEST_CASE("generate_rir: Schroeder fit recovers the requested T60") {
  for (const double t60 : {0.2, 0.5, 1.0}) {
    const auto h = generate_rir(Vec3{0.0, 2.0, 0.0}, Vec3{0.0, 0.0, 0.0}, t60, 16000.0, 7);
    const double fit = oracle::schroeder_t60(h, 16000.0);
    CHECK(fit > 0.85 * t60);
    CHECK(fit < 1.15 * t60);
  }
}

TEST_CASE("oracle_rtf: identical channels give the all-ones vector") {
  StftConfig cfg;
  std::vector<double> h(400, 0.0);
  h[60] = 1.0;
  h[100] = -0.4;
  const auto rtfs = oracle_rtf({h, h, h}, cfg, 0);
  for (const auto& v : rtfs) {
    CHECK(v(0) == cplx(1.0, 0.0));
    CHECK(std::abs(v(1) - 1.0) < 1e-6);
    CHECK(std::abs(v(2) - 1.0) < 1e-6);
  }
}

TEST_CASE("oracle_rtf: a pure relative delay appears as a linear phase") {
  StftConfig cfg;
  const int delta = 3;  // samples
  std::vector<double> h1(256, 0.0), h2(256, 0.0);
  h1[40] = 1.0;
  h2[40 + delta] = 1.0;
  const auto rtfs = oracle_rtf({h1, h2}, cfg, 0);
  for (int f = 1; f < cfg.n_bins() - 1; ++f) {
    const double hz = f * cfg.sample_rate / cfg.frame_len;
    if (hz >= 4000.0) break;
    CHECK(rtfs[f](0) == cplx(1.0, 0.0));  // exact normalization
    CVec expect(2);
    expect << cplx(1.0, 0.0), std::polar(1.0, -2.0 * M_PI * hz * delta / cfg.sample_rate);
    CHECK(hermitian_angle_free(rtfs[f], expect) < 0.05);
  }
}

TEST_CASE("build_scenario: determinism, additivity, and calibration") {
  const ScenarioSpec spec = small_spec();
  const ScenarioBundle b1 = build_scenario(spec);
  const ScenarioBundle b2 = build_scenario(spec);

  // bit-identical under the same seed
  REQUIRE(b1.mixture.size() == b2.mixture.size());
  for (size_t m = 0; m < b1.mixture.size(); ++m)
    CHECK(b1.mixture[m] == b2.mixture[m]);
  CHECK(b1.labels == b2.labels);

  // the mixer keeps every addend
  for (size_t m = 0; m < b1.mixture.size(); ++m) {
    double err = 0.0;
    for (size_t i = 0; i < b1.mixture[m].size(); ++i) {
      double sum = b1.noise.empty() ? 0.0 : b1.noise[m][i];
      for (const auto& img : b1.source_images) sum += img[m][i];
      err = std::max(err, std::abs(sum - b1.mixture[m][i]));
    }
    CHECK(err == 0.0);
  }

  // re-measured broadband SNR and SIR match the spec within 0.1 dB
  const double fs = spec.sample_rate;
  const auto& act = spec.sources[0].activity;
  const size_t a = static_cast<size_t>(act.begin * fs), b = static_cast<size_t>(act.end * fs);
  const double p_t = energy(b1.source_images[0][spec.ref_mic], a, b);
  const double p_i = energy(b1.source_images[1][spec.ref_mic], a, b);
  const double p_n = energy(b1.noise[spec.ref_mic], a, b);
  CHECK(10.0 * std::log10(p_t / p_n) == doctest::Approx(spec.snr_db).epsilon(0.0).scale(1.0));
  CHECK(std::abs(10.0 * std::log10(p_t / p_n) - spec.snr_db) < 0.1);
  CHECK(std::abs(10.0 * std::log10(p_t / p_i) - spec.sir_db) < 0.1);
}

TEST_CASE("build_scenario: label consistency against component energies") {
  const ScenarioSpec spec = small_spec();
  const ScenarioBundle bundle = build_scenario(spec);
  const int pad = bundle.stft.frame_len - bundle.stft.frame_shift;
  const auto frame_energy = [&](const std::vector<double>& x, int t) {
    const long lo = static_cast<long>(t) * bundle.stft.frame_shift - pad;
    return energy(x, static_cast<size_t>(std::max(0L, lo)),
                  static_cast<size_t>(std::max(0L, lo + bundle.stft.frame_len)));
  };
  for (size_t t = 0; t < bundle.labels.size(); ++t) {
    const int ti = static_cast<int>(t);
    const double e_target = frame_energy(bundle.source_images[0][spec.ref_mic], ti);
    const double e_intf = frame_energy(bundle.source_images[1][spec.ref_mic], ti);
    switch (bundle.labels[t]) {
      case FrameLabel::target_1_active:
        CHECK(e_target > 0.0);
        break;
      case FrameLabel::noise_only:
        CHECK(e_target == 0.0);
        CHECK(e_intf == 0.0);
        break;
      case FrameLabel::noise_plus_interferer:
        CHECK(e_target == 0.0);
        CHECK(e_intf > 0.0);
        break;
      default:
        FAIL("unexpected label in a single-target scenario");
    }
  }
}

TEST_CASE("build_scenario: degenerate and disabled-noise scenarios") {
  ScenarioSpec bad = small_spec();
  bad.duration = 0.0;
  CHECK_THROWS_AS(build_scenario(bad), SpecInvalid);

  // noise disabled, single near-anechoic target: the mixture is exactly the
  // single stored image
  ScenarioSpec clean = small_spec(6.0, 0.001);
  clean.snr_db = std::numeric_limits<double>::infinity();
  clean.sources.resize(1);
  clean.sources[0].activity = {0.5, 6.0};
  const ScenarioBundle bundle = build_scenario(clean);
  CHECK(bundle.noise.empty());
  for (size_t m = 0; m < bundle.mixture.size(); ++m)
    CHECK(bundle.mixture[m] == bundle.source_images[0][m]);
}

TEST_CASE("paper preset layout") {
  const ScenarioSpec spec = paper_switching_target_spec(1);
  CHECK(spec.duration == 39.0);
  CHECK(spec.n_mics == 4);
  REQUIRE(spec.sources.size() == 3);
  CHECK(spec.sources[0].activity.begin == 2.0);
  CHECK(spec.sources[0].activity.end == doctest::Approx(20.4));
  CHECK(spec.sources[1].activity.begin == doctest::Approx(20.4));
  CHECK(spec.sources[1].activity.end == 39.0);
  CHECK(spec.sources[2].role == SourceRole::interferer);
  CHECK(spec.sources[2].activity.begin == 1.0);
  CHECK(spec.noise_only.end == 1.0);
  CHECK(spec.noise_plus_interferer.end == 2.0);
  spec.validate();
}

TEST_CASE("bundle save/load round trip") {
  const std::string dir = "test_bundle_tmp";
  const ScenarioBundle bundle = build_scenario(small_spec(5.0));
  save_bundle(bundle, dir);
  const ScenarioBundle loaded = load_bundle(dir);

  CHECK(loaded.labels == bundle.labels);
  CHECK(loaded.spec.seed == bundle.spec.seed);
  CHECK(loaded.spec.sources.size() == bundle.spec.sources.size());
  REQUIRE(loaded.mixture.size() == bundle.mixture.size());
  double err = 0.0;
  for (size_t m = 0; m < bundle.mixture.size(); ++m)
    for (size_t i = 0; i < bundle.mixture[m].size(); ++i)
      err = std::max(err, std::abs(loaded.mixture[m][i] - bundle.mixture[m][i]));
  CHECK(err < 1e-6);  // float32 quantization on disk
  REQUIRE(loaded.oracle_rtfs.size() == bundle.oracle_rtfs.size());
  for (size_t j = 0; j < bundle.oracle_rtfs.size(); ++j)
    for (size_t f = 0; f < bundle.oracle_rtfs[j].size(); ++f)
      CHECK((loaded.oracle_rtfs[j][f] - bundle.oracle_rtfs[j][f]).norm() == 0.0);
  std::filesystem::remove_all(dir);
}
