// metrics.hpp -- objective evaluation: frequency-weighted segmental SNR,
// signal-to-reverberation ratio, and improvement reports against the
// unprocessed reference microphones.
#pragma once

#include "wblcmp/scenario.hpp"

namespace wblcmp {

// Frequency-weighted segmental SNR in dB. Band SNRs compare the reference
// band energy against the band energy of (test - reference), over 25
// mel-spaced bands, clamped to [-10, 35] dB per band, weighted by the
// reference band magnitude^0.2. Frames whose reference energy sits more
// than 40 dB below the peak frame are excluded.
double fwssnr(const std::vector<double>& reference, const std::vector<double>& test,
              double sample_rate);

// Segmental signal-to-reverberation ratio in dB: 32 ms segments at 50%
// overlap, per-segment least-squares projection of test onto the
// direct-plus-early reference, renormalized residual ratio clamped to
// [-20, 40] dB, averaged over reference-active segments.
double srr(const std::vector<double>& reference_direct, const std::vector<double>& test,
           double sample_rate);

struct ChannelScores {
  double fwssnr_in = 0.0, fwssnr_out = 0.0;
  double srr_in = 0.0, srr_out = 0.0;
};

struct MetricReport {
  ChannelScores left, right;
  // averaged across the left and right output signals
  double fwssnr_in = 0.0, fwssnr_out = 0.0, delta_fwssnr = 0.0;
  double srr_in = 0.0, srr_out = 0.0, delta_srr = 0.0;
  TimeInterval interval;
};

// Full in/out/delta report for an enhanced stereo pair against the bundle
// references over the given interval (defaults to the target-active span).
// The enhanced signals must share the mixture timeline; a length mismatch
// beyond one frame raises AlignmentError.
MetricReport evaluate(const ScenarioBundle& bundle, const std::vector<double>& enhanced_left,
                      const std::vector<double>& enhanced_right, int ref_left, int ref_right,
                      TimeInterval interval = {0.0, 0.0});

}  // namespace wblcmp
