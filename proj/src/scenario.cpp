// scenario.cpp

#include "wblcmp/scenario.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>

#include <json.hpp>

#include "wblcmp/errors.hpp"
#include "wblcmp/rng.hpp"
#include "wblcmp/wav.hpp"

namespace wblcmp {

namespace {

constexpr double kDecayLn = 6.907755278982137;  // ln(10^3): 60 dB amplitude decay
constexpr double kTailEnergyAt500ms = 1.5;      // reverberant/direct energy at 2 m, T60 0.5 s
constexpr double kTailRefDistance = 2.0;        // m
constexpr int kSincHalfWidth = 40;              // taps of the fractional-delay kernel
constexpr int kNumEarlyTaps = 8;
constexpr int kNumNoiseSources = 16;
constexpr double kNoiseCircleRadius = 2.5;  // m

double dist(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Hann-windowed sinc tap centered at fractional sample position `pos`.
void add_frac_impulse(std::vector<double>& h, double pos, double amp) {
  const int lo = std::max(0, static_cast<int>(std::ceil(pos)) - kSincHalfWidth);
  const int hi = std::min(static_cast<int>(h.size()) - 1,
                          static_cast<int>(std::floor(pos)) + kSincHalfWidth);
  for (int n = lo; n <= hi; ++n) {
    const double x = n - pos;
    const double sinc = (std::abs(x) < 1e-12) ? 1.0 : std::sin(M_PI * x) / (M_PI * x);
    const double win = 0.5 + 0.5 * std::cos(M_PI * x / (kSincHalfWidth + 1));
    h[n] += amp * sinc * win;
  }
}

std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double mean_power(const std::vector<double>& x, size_t begin, size_t end) {
  begin = std::min(begin, x.size());
  end = std::min(end, x.size());
  if (end <= begin) return 0.0;
  double e = 0.0;
  for (size_t i = begin; i < end; ++i) e += x[i] * x[i];
  return e / static_cast<double>(end - begin);
}

void scale_audio(Audio& a, double g) {
  for (auto& ch : a)
    for (auto& v : ch) v *= g;
}

}  // namespace

std::vector<double> fft_convolve(const std::vector<double>& x, const std::vector<double>& h,
                                 size_t out_len) {
  if (x.empty() || h.empty()) return std::vector<double>(out_len, 0.0);
  const size_t full = x.size() + h.size() - 1;
  if (out_len == 0) out_len = full;
  const size_t n = next_pow2(full);
  const size_t nb = n / 2 + 1;

  double* buf = fftw_alloc_real(n);
  fftw_complex* xs = fftw_alloc_complex(nb);
  fftw_complex* hs = fftw_alloc_complex(nb);
  fftw_plan fwd, inv;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf, xs, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), xs, buf, FFTW_ESTIMATE);
  }
  std::fill(buf, buf + n, 0.0);
  std::copy(x.begin(), x.end(), buf);
  fftw_execute(fwd);
  std::memcpy(hs, xs, nb * sizeof(fftw_complex));
  std::fill(buf, buf + n, 0.0);
  std::copy(h.begin(), h.end(), buf);
  fftw_execute(fwd);
  for (size_t i = 0; i < nb; ++i) {
    const double re = hs[i][0] * xs[i][0] - hs[i][1] * xs[i][1];
    const double im = hs[i][0] * xs[i][1] + hs[i][1] * xs[i][0];
    xs[i][0] = re / n;
    xs[i][1] = im / n;
  }
  fftw_execute(inv);
  std::vector<double> out(out_len, 0.0);
  const size_t copy_n = std::min(out_len, full);
  std::copy(buf, buf + copy_n, out.begin());
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  fftw_free(buf);
  fftw_free(xs);
  fftw_free(hs);
  return out;
}

std::vector<double> synthetic_speech(size_t n_samples, double sample_rate, std::uint64_t seed,
                                     bool modulated) {
  Rng rng(seed);
  std::vector<double> out(n_samples);

  // spectral shaping: one-pole lowpass near 400 Hz over white noise, then a
  // first-order highpass at 80 Hz to kill DC
  const double a_lp = std::exp(-2.0 * M_PI * 400.0 / sample_rate);
  const double a_hp = std::exp(-2.0 * M_PI * 80.0 / sample_rate);
  // slow envelope state, ~2.5 Hz bandwidth, unit variance after scaling
  const double a_env = std::exp(-2.0 * M_PI * 2.5 / sample_rate);
  const double env_norm = std::sqrt((1.0 + a_env) / (1.0 - a_env));

  double lp = 0.0, hp_y = 0.0, hp_x = 0.0, env = 0.0;
  for (size_t i = 0; i < n_samples; ++i) {
    const double w = rng.gaussian();
    lp = a_lp * lp + (1.0 - a_lp) * w;
    hp_y = a_hp * (hp_y + lp - hp_x);
    hp_x = lp;
    double v = hp_y;
    if (modulated) {
      env = a_env * env + (1.0 - a_env) * rng.gaussian();
      v *= std::exp(0.8 * env * env_norm);
    }
    out[i] = v;
  }
  // unit RMS
  const double p = mean_power(out, 0, n_samples);
  if (p > 0.0) {
    const double g = 1.0 / std::sqrt(p);
    for (auto& v : out) v *= g;
  }
  return out;
}

std::vector<double> generate_rir(const Vec3& src_pos, const Vec3& mic_pos, double t60,
                                 double sample_rate, std::uint64_t seed) {
  if (t60 <= 0.0) throw SpecInvalid("generate_rir: t60 must be positive");
  const double d = dist(src_pos, mic_pos);
  if (d <= 0.0) throw SpecInvalid("generate_rir: source and mic coincide");

  const double delay = d / kSpeedOfSound * sample_rate;  // fractional samples
  const double alpha = kDecayLn / (t60 * sample_rate);   // per-sample amplitude decay
  const size_t len = static_cast<size_t>(
      std::ceil(delay + (1.25 * t60 + kEarlyRirSeconds) * sample_rate) + 2 * kSincHalfWidth);
  std::vector<double> h(len, 0.0);

  const double direct_amp = 1.0 / d;
  add_frac_impulse(h, delay, direct_amp);

  Rng rng(seed);
  // early reflections: seeded sparse taps between the direct arrival and 50 ms
  const double early_lo = delay + 0.001 * sample_rate;
  const double early_hi = kEarlyRirSeconds * sample_rate;
  for (int k = 0; k < kNumEarlyTaps; ++k) {
    const double pos = rng.uniform(early_lo, std::max(early_lo + 1.0, early_hi));
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double amp =
        0.7 * direct_amp * std::exp(-alpha * (pos - delay)) * rng.uniform(0.5, 1.0);
    if (pos < early_hi) add_frac_impulse(h, pos, sign * amp);
  }

  // diffuse tail: Gaussian noise under an exponential envelope; tail energy
  // is distance independent (diffuse field), referenced to 2 m at T60 0.5 s
  const double tail_energy =
      kTailEnergyAt500ms * (t60 / 0.5) / (kTailRefDistance * kTailRefDistance);
  const double c = std::sqrt(tail_energy * (1.0 - std::exp(-2.0 * alpha)));
  const size_t tail_start = static_cast<size_t>(std::ceil(delay + 0.001 * sample_rate));
  for (size_t n = tail_start; n < len; ++n) {
    const double env = c * std::exp(-alpha * (static_cast<double>(n) - delay));
    h[n] += env * rng.gaussian();
  }
  return h;
}

std::vector<CVec> oracle_rtf(const std::vector<std::vector<double>>& rir_early,
                             const StftConfig& cfg, int ref_mic) {
  cfg.validate();
  const int n_mics = static_cast<int>(rir_early.size());
  if (n_mics < 1 || ref_mic < 0 || ref_mic >= n_mics)
    throw SpecInvalid("oracle_rtf: bad mic setup");

  // white probe through the early RIRs; fixed internal seed keeps the
  // oracle deterministic for a given scenario
  const size_t probe_len = static_cast<size_t>(6.0 * cfg.sample_rate);
  std::vector<double> white(probe_len);
  {
    Rng rng(0x0c0ffee5ULL);
    for (auto& v : white) v = rng.gaussian();
  }
  Audio convolved(n_mics);
  for (int m = 0; m < n_mics; ++m) convolved[m] = fft_convolve(white, rir_early[m], probe_len);

  const SpectralTensor spec = analyze(convolved, cfg);
  std::vector<CVec> rtfs(spec.n_bins);
  for (int f = 0; f < spec.n_bins; ++f) {
    CMat r = CMat::Zero(n_mics, n_mics);
    for (int t = 0; t < spec.n_frames; ++t) {
      const CVec y = spec.frame_vec(t, f);
      r.noalias() += y * y.adjoint();
    }
    r = hermitianized(r / static_cast<double>(spec.n_frames));
    if (r.real().trace() < 1e-12)
      throw DegenerateCovariance("oracle_rtf: empty covariance at bin " + std::to_string(f));
    CVec v = principal_eigvec(r);
    const cplx ref = v(ref_mic);
    if (std::abs(ref) < 1e-9 * v.cwiseAbs().maxCoeff())
      throw DegenerateCovariance("oracle_rtf: reference entry vanishes at bin " +
                                 std::to_string(f));
    v /= ref;
    v(ref_mic) = cplx(1.0, 0.0);
    rtfs[f] = std::move(v);
  }
  return rtfs;
}

void ScenarioSpec::validate() const {
  if (n_mics < 2) throw SpecInvalid("scenario: need at least 2 microphones");
  if (static_cast<int>(mic_positions.size()) != n_mics)
    throw SpecInvalid("scenario: mic_positions size must equal n_mics");
  if (t60 <= 0.0) throw SpecInvalid("scenario: t60 must be positive");
  if (sample_rate <= 0.0) throw SpecInvalid("scenario: sample_rate must be positive");
  if (duration <= 0.0) throw SpecInvalid("scenario: duration must be positive");
  if (ref_mic < 0 || ref_mic >= n_mics) throw SpecInvalid("scenario: ref_mic out of range");
  if (sources.empty()) throw SpecInvalid("scenario: no sources");
  if (!noise_only.empty() && !noise_plus_interferer.empty() &&
      noise_only.end > noise_plus_interferer.begin)
    throw SpecInvalid("scenario: oracle periods must be ordered and non-overlapping");

  int n_interferers = 0;
  std::vector<TimeInterval> target_acts;
  for (const auto& s : sources) {
    if (s.activity.begin < 0.0 || s.activity.end > duration || s.activity.empty())
      throw SpecInvalid("scenario: source activity outside scenario duration");
    if (s.role == SourceRole::interferer)
      ++n_interferers;
    else
      target_acts.push_back(s.activity);
  }
  if (target_acts.empty()) throw SpecInvalid("scenario: need a target source");
  if (target_acts.size() > 2)
    throw SpecInvalid("scenario: at most two target positions are supported");
  if (n_interferers > 1) throw SpecInvalid("scenario: at most one interferer is supported");
  for (size_t i = 0; i < target_acts.size(); ++i)
    for (size_t j = i + 1; j < target_acts.size(); ++j)
      if (target_acts[i].begin < target_acts[j].end && target_acts[j].begin < target_acts[i].end)
        throw SpecInvalid("scenario: target activities overlap");
}

std::vector<int> ScenarioSpec::target_indices() const {
  std::vector<int> out;
  for (size_t i = 0; i < sources.size(); ++i)
    if (sources[i].role == SourceRole::target) out.push_back(static_cast<int>(i));
  // order by activity start so "target 1" is the first active position
  std::sort(out.begin(), out.end(), [this](int a, int b) {
    return sources[a].activity.begin < sources[b].activity.begin;
  });
  return out;
}

int ScenarioSpec::interferer_index() const {
  for (size_t i = 0; i < sources.size(); ++i)
    if (sources[i].role == SourceRole::interferer) return static_cast<int>(i);
  return -1;
}

const char* frame_label_name(FrameLabel l) {
  switch (l) {
    case FrameLabel::noise_only: return "noise_only";
    case FrameLabel::noise_plus_interferer: return "noise_plus_interferer";
    case FrameLabel::target_1_active: return "target_1_active";
    case FrameLabel::target_2_active: return "target_2_active";
  }
  return "?";
}

namespace {

// source dry signal over the whole scenario, zero outside its activity,
// 10 ms raised-cosine ramps at the interval edges
std::vector<double> source_signal(const SourceSpec& src, const ScenarioSpec& spec,
                                  std::uint64_t seed) {
  const double fs = spec.sample_rate;
  const size_t n = static_cast<size_t>(std::llround(spec.duration * fs));
  const size_t a = static_cast<size_t>(std::llround(src.activity.begin * fs));
  const size_t b = std::min(n, static_cast<size_t>(std::llround(src.activity.end * fs)));
  const size_t act_len = b > a ? b - a : 0;

  std::vector<double> active;
  if (src.signal == "synthetic" || src.signal.empty()) {
    active = synthetic_speech(act_len, fs, seed);
  } else {
    const WavData wav = read_wav(src.signal);
    if (wav.sample_rate != fs)
      throw SpecInvalid("scenario: source WAV sample rate mismatch: " + src.signal);
    if (wav.channels.empty()) throw SpecInvalid("scenario: empty source WAV: " + src.signal);
    active = wav.channels[0];
    active.resize(act_len, 0.0);
    const double p = mean_power(active, 0, act_len);
    if (p > 0.0) {
      const double g = 1.0 / std::sqrt(p);
      for (auto& v : active) v *= g;
    }
  }
  const size_t ramp = std::min<size_t>(static_cast<size_t>(0.01 * fs), act_len / 2);
  for (size_t i = 0; i < ramp; ++i) {
    const double g = 0.5 - 0.5 * std::cos(M_PI * (i + 1) / static_cast<double>(ramp + 1));
    active[i] *= g;
    active[act_len - 1 - i] *= g;
  }
  std::vector<double> out(n, 0.0);
  std::copy(active.begin(), active.end(), out.begin() + a);
  return out;
}

Audio convolve_multi(const std::vector<double>& x, const Audio& rirs, size_t out_len) {
  Audio out(rirs.size());
  for (size_t m = 0; m < rirs.size(); ++m) out[m] = fft_convolve(x, rirs[m], out_len);
  return out;
}

size_t first_nonzero(const std::vector<double>& x) {
  for (size_t i = 0; i < x.size(); ++i)
    if (x[i] != 0.0) return i;
  return x.size();
}

size_t last_nonzero(const std::vector<double>& x) {
  for (size_t i = x.size(); i > 0; --i)
    if (x[i - 1] != 0.0) return i - 1;
  return 0;
}

}  // namespace

ScenarioBundle build_scenario(const ScenarioSpec& spec, const StftConfig& cfg) {
  spec.validate();
  cfg.validate();
  if (cfg.sample_rate != spec.sample_rate)
    throw SpecInvalid("build_scenario: STFT and scenario sample rates differ");

  const double fs = spec.sample_rate;
  const size_t n = static_cast<size_t>(std::llround(spec.duration * fs));
  const int n_src = static_cast<int>(spec.sources.size());
  const std::vector<int> targets = spec.target_indices();
  const int intf = spec.interferer_index();

  ScenarioBundle bundle;
  bundle.spec = spec;
  bundle.stft = cfg;

  // RIRs and raw images
  bundle.rirs.resize(n_src);
  std::vector<std::vector<double>> signals(n_src);
  bundle.source_images.resize(n_src);
  for (int j = 0; j < n_src; ++j) {
    bundle.rirs[j].resize(spec.n_mics);
    for (int m = 0; m < spec.n_mics; ++m)
      bundle.rirs[j][m] = generate_rir(spec.sources[j].position, spec.mic_positions[m], spec.t60,
                                       fs, mix_seed(spec.seed, j, m));
    signals[j] = source_signal(spec.sources[j], spec, mix_seed(spec.seed, 100 + j));
    bundle.source_images[j] = convolve_multi(signals[j], bundle.rirs[j], n);
  }

  // per-position calibration: each target image gets unit mean power at the
  // reference mic over its own activity interval
  std::vector<double> gains(n_src, 1.0);
  for (int j : targets) {
    const auto& act = spec.sources[j].activity;
    const double p = mean_power(bundle.source_images[j][spec.ref_mic],
                                static_cast<size_t>(act.begin * fs),
                                static_cast<size_t>(act.end * fs));
    if (p <= 0.0) throw SpecInvalid("build_scenario: silent target source");
    gains[j] = 1.0 / std::sqrt(p);
    scale_audio(bundle.source_images[j], gains[j]);
  }

  // target-active sample ranges (union) for SIR/SNR measurement
  std::vector<std::pair<size_t, size_t>> act_ranges;
  for (int j : targets)
    act_ranges.emplace_back(static_cast<size_t>(spec.sources[j].activity.begin * fs),
                            static_cast<size_t>(spec.sources[j].activity.end * fs));

  auto mean_power_over_ranges = [&](const std::vector<double>& x) {
    double e = 0.0;
    size_t cnt = 0;
    for (const auto& [a, b] : act_ranges) {
      for (size_t i = a; i < std::min(b, x.size()); ++i) e += x[i] * x[i];
      cnt += std::min(b, x.size()) - std::min(a, x.size());
    }
    return cnt ? e / static_cast<double>(cnt) : 0.0;
  };

  if (intf >= 0) {
    if (std::isinf(spec.sir_db)) {
      scale_audio(bundle.source_images[intf], 0.0);
    } else {
      const double p = mean_power_over_ranges(bundle.source_images[intf][spec.ref_mic]);
      if (p <= 0.0) throw SpecInvalid("build_scenario: silent interferer");
      // targets are unit power, so SIR reduces to 1 / interferer power
      const double g = std::pow(10.0, -spec.sir_db / 20.0) / std::sqrt(p);
      gains[intf] = g;
      scale_audio(bundle.source_images[intf], g);
    }
  }

  // diffuse noise: ring of independent point sources around the array
  if (!std::isinf(spec.snr_db)) {
    Vec3 center{0.0, 0.0, 0.0};
    for (const auto& mp : spec.mic_positions)
      for (int k = 0; k < 3; ++k) center[k] += mp[k] / spec.n_mics;
    bundle.noise.assign(spec.n_mics, std::vector<double>(n, 0.0));
    for (int k = 0; k < kNumNoiseSources; ++k) {
      const double ang = 2.0 * M_PI * k / kNumNoiseSources;
      const Vec3 pos{center[0] + kNoiseCircleRadius * std::cos(ang),
                     center[1] + kNoiseCircleRadius * std::sin(ang), center[2]};
      const auto sig =
          synthetic_speech(n, fs, mix_seed(spec.seed, 500 + k), /*modulated=*/false);
      for (int m = 0; m < spec.n_mics; ++m) {
        const auto rir =
            generate_rir(pos, spec.mic_positions[m], spec.t60, fs, mix_seed(spec.seed, 500 + k, m));
        const auto img = fft_convolve(sig, rir, n);
        for (size_t i = 0; i < n; ++i) bundle.noise[m][i] += img[i];
      }
    }
    const double p = mean_power_over_ranges(bundle.noise[spec.ref_mic]);
    if (p <= 0.0) throw SpecInvalid("build_scenario: degenerate noise field");
    scale_audio(bundle.noise, std::pow(10.0, -spec.snr_db / 20.0) / std::sqrt(p));
  }

  // mixture keeps all addends: mixture = sum(images) + noise, exactly
  bundle.mixture.assign(spec.n_mics, std::vector<double>(n, 0.0));
  for (int m = 0; m < spec.n_mics; ++m) {
    for (int j = 0; j < n_src; ++j)
      for (size_t i = 0; i < n; ++i) bundle.mixture[m][i] += bundle.source_images[j][m][i];
    if (!bundle.noise.empty())
      for (size_t i = 0; i < n; ++i) bundle.mixture[m][i] += bundle.noise[m][i];
  }

  // direct-plus-early reference: scaled dry targets through the first 50 ms
  // of their RIRs
  const size_t early_len = static_cast<size_t>(kEarlyRirSeconds * fs);
  bundle.reference_direct.assign(spec.n_mics, std::vector<double>(n, 0.0));
  for (int j : targets) {
    for (int m = 0; m < spec.n_mics; ++m) {
      std::vector<double> early(bundle.rirs[j][m].begin(),
                                bundle.rirs[j][m].begin() +
                                    std::min(early_len, bundle.rirs[j][m].size()));
      const auto img = fft_convolve(signals[j], early, n);
      for (size_t i = 0; i < n; ++i) bundle.reference_direct[m][i] += gains[j] * img[i];
    }
  }

  // per-frame oracle labels from the actual component extents
  const int n_frames = static_cast<int>((n + cfg.frame_shift - 1) / cfg.frame_shift);
  const int pad = cfg.frame_len - cfg.frame_shift;
  std::vector<std::pair<long, long>> extents(n_src);
  for (int j = 0; j < n_src; ++j) {
    const auto& x = bundle.source_images[j][spec.ref_mic];
    extents[j] = {static_cast<long>(first_nonzero(x)), static_cast<long>(last_nonzero(x))};
  }
  auto frame_energy = [&](int j, long lo, long hi) {
    const auto& x = bundle.source_images[j][spec.ref_mic];
    double e = 0.0;
    for (long i = std::max(0L, lo); i < std::min<long>(hi, x.size()); ++i) e += x[i] * x[i];
    return e;
  };
  bundle.labels.resize(n_frames);
  for (int t = 0; t < n_frames; ++t) {
    const long lo = static_cast<long>(t) * cfg.frame_shift - pad;
    const long hi = lo + cfg.frame_len;
    int best_target = -1;
    double best_e = 0.0;
    for (size_t ti = 0; ti < targets.size(); ++ti) {
      const int j = targets[ti];
      if (extents[j].first <= hi - 1 && extents[j].second >= lo) {
        const double e = frame_energy(j, lo, hi);
        if (e > best_e) {
          best_e = e;
          best_target = static_cast<int>(ti);
        }
      }
    }
    if (best_target == 0) {
      bundle.labels[t] = FrameLabel::target_1_active;
    } else if (best_target == 1) {
      bundle.labels[t] = FrameLabel::target_2_active;
    } else if (intf >= 0 && extents[intf].first <= hi - 1 && extents[intf].second >= lo &&
               frame_energy(intf, lo, hi) > 0.0) {
      bundle.labels[t] = FrameLabel::noise_plus_interferer;
    } else {
      bundle.labels[t] = FrameLabel::noise_only;
    }
  }

  // oracle RTFs from the early RIR parts
  bundle.oracle_rtfs.resize(n_src);
  for (int j = 0; j < n_src; ++j) {
    std::vector<std::vector<double>> early(spec.n_mics);
    for (int m = 0; m < spec.n_mics; ++m)
      early[m].assign(bundle.rirs[j][m].begin(),
                      bundle.rirs[j][m].begin() + std::min(early_len, bundle.rirs[j][m].size()));
    bundle.oracle_rtfs[j] = oracle_rtf(early, cfg, spec.ref_mic);
  }
  return bundle;
}

ScenarioSpec paper_switching_target_spec(std::uint64_t seed, double duration) {
  ScenarioSpec spec;
  spec.n_mics = 4;
  // two behind-the-ear pairs on a 16 cm wide head, 2 cm mic spacing
  spec.mic_positions = {
      {-0.08, 0.01, 0.0}, {-0.08, -0.01, 0.0}, {0.08, 0.01, 0.0}, {0.08, -0.01, 0.0}};
  spec.t60 = 0.5;
  spec.sample_rate = 16000.0;
  spec.duration = duration;
  spec.snr_db = 0.0;
  spec.sir_db = 0.0;
  spec.noise_only = {0.0, 1.0};
  spec.noise_plus_interferer = {1.0, 2.0};
  spec.ref_mic = 0;
  spec.seed = seed;

  // activity schedule scales linearly when a shorter variant is requested
  const double s = duration / 39.0;
  SourceSpec t1;
  t1.role = SourceRole::target;
  t1.position = {0.0, 2.0, 0.0};  // 0 deg, front
  t1.activity = {2.0 * s, 20.4 * s};
  SourceSpec t2;
  t2.role = SourceRole::target;
  t2.position = {2.0, 0.0, 0.0};  // 90 deg, right
  t2.activity = {20.4 * s, 39.0 * s};
  SourceSpec it;
  it.role = SourceRole::interferer;
  it.position = {2.0 * std::sin(-120.0 * M_PI / 180.0), 2.0 * std::cos(-120.0 * M_PI / 180.0),
                 0.0};  // -120 deg
  it.activity = {1.0 * s, 39.0 * s};
  if (duration < 39.0) {
    spec.noise_only = {0.0, 1.0 * s};
    spec.noise_plus_interferer = {1.0 * s, 2.0 * s};
  }
  spec.sources = {t1, t2, it};
  return spec;
}

// ---------------------------------------------------------------------------
// bundle serialization

namespace {

using nlohmann::ordered_json;

ordered_json interval_json(const TimeInterval& iv) {
  return ordered_json{{"begin", iv.begin}, {"end", iv.end}};
}

TimeInterval interval_from(const ordered_json& j) {
  return TimeInterval{j.at("begin").get<double>(), j.at("end").get<double>()};
}

ordered_json spec_json(const ScenarioSpec& spec) {
  ordered_json j;
  j["n_mics"] = spec.n_mics;
  j["mic_positions"] = spec.mic_positions;
  ordered_json srcs = ordered_json::array();
  for (const auto& s : spec.sources) {
    ordered_json js;
    js["role"] = s.role == SourceRole::target ? "target" : "interferer";
    js["position"] = s.position;
    js["activity"] = interval_json(s.activity);
    js["signal"] = s.signal;
    srcs.push_back(js);
  }
  j["sources"] = srcs;
  j["t60"] = spec.t60;
  j["sample_rate"] = spec.sample_rate;
  j["duration"] = spec.duration;
  j["snr_db"] = std::isinf(spec.snr_db) ? ordered_json("inf") : ordered_json(spec.snr_db);
  j["sir_db"] = std::isinf(spec.sir_db) ? ordered_json("inf") : ordered_json(spec.sir_db);
  j["noise_only"] = interval_json(spec.noise_only);
  j["noise_plus_interferer"] = interval_json(spec.noise_plus_interferer);
  j["ref_mic"] = spec.ref_mic;
  j["seed"] = spec.seed;
  return j;
}

ScenarioSpec spec_from_json(const ordered_json& j) {
  ScenarioSpec spec;
  spec.n_mics = j.at("n_mics").get<int>();
  spec.mic_positions = j.at("mic_positions").get<std::vector<Vec3>>();
  for (const auto& js : j.at("sources")) {
    SourceSpec s;
    s.role = js.at("role").get<std::string>() == "interferer" ? SourceRole::interferer
                                                              : SourceRole::target;
    s.position = js.at("position").get<Vec3>();
    s.activity = interval_from(js.at("activity"));
    s.signal = js.at("signal").get<std::string>();
    spec.sources.push_back(s);
  }
  spec.t60 = j.at("t60").get<double>();
  spec.sample_rate = j.at("sample_rate").get<double>();
  spec.duration = j.at("duration").get<double>();
  auto db = [](const ordered_json& v) {
    return v.is_string() ? std::numeric_limits<double>::infinity() : v.get<double>();
  };
  spec.snr_db = db(j.at("snr_db"));
  spec.sir_db = db(j.at("sir_db"));
  spec.noise_only = interval_from(j.at("noise_only"));
  spec.noise_plus_interferer = interval_from(j.at("noise_plus_interferer"));
  spec.ref_mic = j.at("ref_mic").get<int>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  return spec;
}

}  // namespace

void save_bundle(const ScenarioBundle& bundle, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const double sr = bundle.spec.sample_rate;
  write_wav(dir + "/mixture.wav", bundle.mixture, sr);
  write_wav(dir + "/reference_direct.wav", bundle.reference_direct, sr);
  if (!bundle.noise.empty()) write_wav(dir + "/component_noise.wav", bundle.noise, sr);
  for (size_t j = 0; j < bundle.source_images.size(); ++j) {
    write_wav(dir + "/component_source_" + std::to_string(j) + ".wav", bundle.source_images[j],
              sr);
    write_wav(dir + "/rir_source_" + std::to_string(j) + ".wav", bundle.rirs[j], sr);
  }

  ordered_json j;
  j["spec"] = spec_json(bundle.spec);
  j["stft"] = {{"frame_len", bundle.stft.frame_len},
               {"frame_shift", bundle.stft.frame_shift},
               {"sample_rate", bundle.stft.sample_rate}};
  ordered_json labels = ordered_json::array();
  for (const auto l : bundle.labels) labels.push_back(static_cast<int>(l));
  j["labels"] = labels;
  j["label_names"] = {"noise_only", "noise_plus_interferer", "target_1_active",
                      "target_2_active"};
  ordered_json rtfs = ordered_json::array();
  for (const auto& per_source : bundle.oracle_rtfs) {
    ordered_json bins = ordered_json::array();
    for (const auto& v : per_source) {
      ordered_json mics = ordered_json::array();
      for (Eigen::Index m = 0; m < v.size(); ++m)
        mics.push_back(ordered_json::array({v(m).real(), v(m).imag()}));
      bins.push_back(mics);
    }
    rtfs.push_back(bins);
  }
  j["oracle_rtfs"] = rtfs;

  std::ofstream f(dir + "/scenario.json");
  if (!f) throw IoError("cannot write sidecar: " + dir + "/scenario.json");
  f << j.dump(1) << "\n";
}

ScenarioBundle load_bundle(const std::string& dir) {
  namespace fs = std::filesystem;
  const std::string sidecar = dir + "/scenario.json";
  std::ifstream f(sidecar);
  if (!f) throw IoError("missing scenario sidecar: " + sidecar);
  ordered_json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw IoError("malformed scenario sidecar " + sidecar + ": " + e.what());
  }

  ScenarioBundle bundle;
  bundle.spec = spec_from_json(j.at("spec"));
  bundle.stft.frame_len = j.at("stft").at("frame_len").get<int>();
  bundle.stft.frame_shift = j.at("stft").at("frame_shift").get<int>();
  bundle.stft.sample_rate = j.at("stft").at("sample_rate").get<double>();
  for (const auto& l : j.at("labels"))
    bundle.labels.push_back(static_cast<FrameLabel>(l.get<int>()));
  for (const auto& bins : j.at("oracle_rtfs")) {
    std::vector<CVec> per_source;
    for (const auto& mics : bins) {
      CVec v(mics.size());
      for (size_t m = 0; m < mics.size(); ++m)
        v(static_cast<Eigen::Index>(m)) = cplx(mics[m][0].get<double>(), mics[m][1].get<double>());
      per_source.push_back(std::move(v));
    }
    bundle.oracle_rtfs.push_back(std::move(per_source));
  }

  bundle.mixture = read_wav(dir + "/mixture.wav").channels;
  bundle.reference_direct = read_wav(dir + "/reference_direct.wav").channels;
  if (fs::exists(dir + "/component_noise.wav"))
    bundle.noise = read_wav(dir + "/component_noise.wav").channels;
  for (size_t jx = 0;; ++jx) {
    const std::string p = dir + "/component_source_" + std::to_string(jx) + ".wav";
    if (!fs::exists(p)) break;
    bundle.source_images.push_back(read_wav(p).channels);
    const std::string rp = dir + "/rir_source_" + std::to_string(jx) + ".wav";
    if (fs::exists(rp)) bundle.rirs.push_back(read_wav(rp).channels);
  }
  return bundle;
}

}  // namespace wblcmp
