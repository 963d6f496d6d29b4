// stft.cpp

#include "wblcmp/stft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>

namespace wblcmp {

namespace {

// FFTW plan creation is not thread-safe; execution is.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

struct FftBuffers {
  int n;
  double* real;
  fftw_complex* spec;
  fftw_plan fwd;
  fftw_plan inv;

  explicit FftBuffers(int frame_len) : n(frame_len) {
    real = fftw_alloc_real(n);
    spec = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fwd = fftw_plan_dft_r2c_1d(n, real, spec, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(n, spec, real, FFTW_ESTIMATE);
  }
  ~FftBuffers() {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(real);
    fftw_free(spec);
  }
  FftBuffers(const FftBuffers&) = delete;
  FftBuffers& operator=(const FftBuffers&) = delete;
};

}  // namespace

void StftConfig::validate() const {
  if (frame_len <= 0 || frame_shift <= 0)
    throw ConfigInvalid("stft: frame_len and frame_shift must be positive");
  if (frame_len != 2 * frame_shift)
    throw ConfigInvalid("stft: 50% overlap required (frame_len = 2 * frame_shift)");
  if (sample_rate <= 0.0) throw ConfigInvalid("stft: sample_rate must be positive");
}

std::vector<double> sqrt_hann_window(int frame_len) {
  // sqrt of the periodic Hann equals sin(pi n / N)
  std::vector<double> w(frame_len);
  for (int i = 0; i < frame_len; ++i)
    w[i] = std::sin(M_PI * static_cast<double>(i) / frame_len);
  return w;
}

SpectralTensor analyze(const Audio& audio, const StftConfig& cfg) {
  cfg.validate();
  if (audio.empty()) throw ConfigInvalid("analyze: no channels");
  const size_t len = audio[0].size();
  if (len < static_cast<size_t>(cfg.frame_len))
    throw ConfigInvalid("analyze: signal shorter than one frame");
  for (const auto& ch : audio)
    if (ch.size() != len) throw LengthMismatch("analyze: channel lengths differ");

  const int n = cfg.frame_len;
  const int shift = cfg.frame_shift;
  const int pad = n - shift;
  const int n_frames = static_cast<int>((len + shift - 1) / shift);
  const int n_bins = cfg.n_bins();
  const auto window = sqrt_hann_window(n);

  SpectralTensor out(n_frames, n_bins, static_cast<int>(audio.size()));
  FftBuffers fft(n);
  for (int m = 0; m < out.n_mics; ++m) {
    const auto& x = audio[m];
    for (int t = 0; t < n_frames; ++t) {
      const long start = static_cast<long>(t) * shift - pad;
      for (int i = 0; i < n; ++i) {
        const long s = start + i;
        const double v = (s >= 0 && s < static_cast<long>(len)) ? x[s] : 0.0;
        fft.real[i] = v * window[i];
      }
      fftw_execute(fft.fwd);
      for (int f = 0; f < n_bins; ++f)
        out.at(t, f, m) = cplx(fft.spec[f][0], fft.spec[f][1]);
    }
  }
  return out;
}

Audio synthesize(const SpectralTensor& spec, const StftConfig& cfg, size_t out_len) {
  cfg.validate();
  if (spec.n_bins != cfg.n_bins())
    throw ConfigInvalid("synthesize: tensor bins inconsistent with config");
  const int n = cfg.frame_len;
  const int shift = cfg.frame_shift;
  const int pad = n - shift;
  const auto window = sqrt_hann_window(n);
  const size_t full_len = static_cast<size_t>(spec.n_frames) * shift;
  if (out_len == 0) out_len = full_len;

  Audio out(spec.n_mics, std::vector<double>(out_len, 0.0));
  FftBuffers fft(n);
  for (int m = 0; m < spec.n_mics; ++m) {
    auto& x = out[m];
    for (int t = 0; t < spec.n_frames; ++t) {
      for (int f = 0; f < spec.n_bins; ++f) {
        const cplx v = spec.at(t, f, m);
        fft.spec[f][0] = v.real();
        fft.spec[f][1] = v.imag();
      }
      // one-sided storage: DC and Nyquist are real by construction
      fft.spec[0][1] = 0.0;
      fft.spec[spec.n_bins - 1][1] = 0.0;
      fftw_execute(fft.inv);
      const long start = static_cast<long>(t) * shift - pad;
      for (int i = 0; i < n; ++i) {
        const long s = start + i;
        if (s >= 0 && s < static_cast<long>(out_len))
          x[s] += fft.real[i] * window[i] / n;
      }
    }
  }
  return out;
}

}  // namespace wblcmp
