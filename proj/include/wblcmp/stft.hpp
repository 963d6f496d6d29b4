// stft.hpp -- analysis/synthesis filterbank between multichannel audio and
// per-bin complex frame sequences.
#pragma once

#include <vector>

#include "wblcmp/linalg.hpp"

namespace wblcmp {

// Multichannel audio, one vector per channel, equal lengths.
using Audio = std::vector<std::vector<double>>;

struct StftConfig {
  int frame_len = 512;    // samples, 32 ms at 16 kHz
  int frame_shift = 256;  // 50% overlap required
  double sample_rate = 16000.0;

  int n_bins() const { return frame_len / 2 + 1; }
  double frame_shift_s() const { return frame_shift / sample_rate; }

  // Throws ConfigInvalid unless frame_len = 2 * frame_shift > 0.
  void validate() const;
};

// sqrt of the periodic Hann window; analysis == synthesis window and the
// squared-window overlap-add is exactly constant at 50% overlap.
std::vector<double> sqrt_hann_window(int frame_len);

// Complex STFT coefficients indexed (frame, bin, mic).
struct SpectralTensor {
  int n_frames = 0;
  int n_bins = 0;
  int n_mics = 0;
  std::vector<cplx> data;

  SpectralTensor() = default;
  SpectralTensor(int frames, int bins, int mics)
      : n_frames(frames), n_bins(bins), n_mics(mics),
        data(static_cast<size_t>(frames) * bins * mics) {}

  cplx& at(int t, int f, int m) {
    return data[(static_cast<size_t>(t) * n_bins + f) * n_mics + m];
  }
  const cplx& at(int t, int f, int m) const {
    return data[(static_cast<size_t>(t) * n_bins + f) * n_mics + m];
  }

  // y_t for one bin: the M-vector of mic coefficients at (t, f).
  CVec frame_vec(int t, int f) const {
    CVec y(n_mics);
    for (int m = 0; m < n_mics; ++m) y(m) = at(t, f, m);
    return y;
  }
};

// One-sided spectra per frame and channel. The signal start is zero-padded
// by frame_len - frame_shift so the first frame is centered near sample 0;
// frame count is ceil(len / shift).
SpectralTensor analyze(const Audio& audio, const StftConfig& cfg);

// Weighted overlap-add inverse of analyze. Returns n_frames * frame_shift
// samples unless out_len trims/extends the tail.
Audio synthesize(const SpectralTensor& spec, const StftConfig& cfg, size_t out_len = 0);

}  // namespace wblcmp
