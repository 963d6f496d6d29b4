// metrics.cpp

#include "wblcmp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wblcmp/errors.hpp"
#include "wblcmp/stft.hpp"

namespace wblcmp {

namespace {

constexpr int kNumMelBands = 25;
constexpr double kBandSnrLo = -10.0, kBandSnrHi = 35.0;
constexpr double kSegSrrLo = -20.0, kSegSrrHi = 40.0;
constexpr double kActivityGateDb = 40.0;
constexpr double kWeightExponent = 0.2;  // on the reference band magnitude

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

StftConfig metric_framing(double sample_rate) {
  StftConfig cfg;
  cfg.frame_shift = std::max(1, static_cast<int>(std::lround(0.016 * sample_rate)));
  cfg.frame_len = 2 * cfg.frame_shift;
  cfg.sample_rate = sample_rate;
  return cfg;
}

// triangular mel filterbank over the one-sided bins
std::vector<std::vector<double>> mel_filters(int n_bins, double sample_rate, int frame_len) {
  const double mel_max = hz_to_mel(sample_rate / 2.0);
  std::vector<double> edges(kNumMelBands + 2);
  for (int i = 0; i < kNumMelBands + 2; ++i)
    edges[i] = mel_to_hz(mel_max * i / (kNumMelBands + 1));
  std::vector<std::vector<double>> filt(kNumMelBands, std::vector<double>(n_bins, 0.0));
  for (int k = 0; k < kNumMelBands; ++k) {
    const double lo = edges[k], mid = edges[k + 1], hi = edges[k + 2];
    for (int f = 0; f < n_bins; ++f) {
      const double hz = f * sample_rate / frame_len;
      if (hz > lo && hz < mid)
        filt[k][f] = (hz - lo) / (mid - lo);
      else if (hz >= mid && hz < hi)
        filt[k][f] = (hi - hz) / (hi - mid);
    }
  }
  return filt;
}

double clamp_db(double num, double den, double lo, double hi) {
  if (den <= 0.0) return num > 0.0 ? hi : lo;
  if (num <= 0.0) return lo;
  return std::clamp(10.0 * std::log10(num / den), lo, hi);
}

}  // namespace

double fwssnr(const std::vector<double>& reference, const std::vector<double>& test,
              double sample_rate) {
  if (reference.size() != test.size())
    throw LengthMismatch("fwssnr: reference and test lengths differ");
  const StftConfig cfg = metric_framing(sample_rate);
  if (reference.size() < static_cast<size_t>(cfg.frame_len))
    throw LengthMismatch("fwssnr: signal shorter than one frame");

  std::vector<double> diff(test.size());
  for (size_t i = 0; i < test.size(); ++i) diff[i] = test[i] - reference[i];
  const SpectralTensor sr = analyze({reference}, cfg);
  const SpectralTensor sd = analyze({diff}, cfg);
  const auto filt = mel_filters(cfg.n_bins(), sample_rate, cfg.frame_len);

  // per-frame reference energies set the activity gate
  std::vector<double> frame_e(sr.n_frames, 0.0);
  double peak = 0.0;
  for (int t = 0; t < sr.n_frames; ++t) {
    for (int f = 0; f < sr.n_bins; ++f) frame_e[t] += std::norm(sr.at(t, f, 0));
    peak = std::max(peak, frame_e[t]);
  }
  const double gate = peak * std::pow(10.0, -kActivityGateDb / 10.0);

  double score_sum = 0.0;
  long n_scored = 0;
  for (int t = 0; t < sr.n_frames; ++t) {
    if (frame_e[t] <= gate || frame_e[t] == 0.0) continue;
    double num = 0.0, den = 0.0;
    for (int k = 0; k < kNumMelBands; ++k) {
      double e_ref = 0.0, e_diff = 0.0;
      for (int f = 0; f < sr.n_bins; ++f) {
        e_ref += filt[k][f] * std::norm(sr.at(t, f, 0));
        e_diff += filt[k][f] * std::norm(sd.at(t, f, 0));
      }
      if (e_ref <= 0.0) continue;
      const double w = std::pow(std::sqrt(e_ref), kWeightExponent);
      num += w * clamp_db(e_ref, e_diff, kBandSnrLo, kBandSnrHi);
      den += w;
    }
    if (den > 0.0) {
      score_sum += num / den;
      n_scored += 1;
    }
  }
  if (n_scored == 0) throw LengthMismatch("fwssnr: no active reference frames");
  return score_sum / n_scored;
}

double srr(const std::vector<double>& reference_direct, const std::vector<double>& test,
           double sample_rate) {
  if (reference_direct.size() != test.size())
    throw LengthMismatch("srr: reference and test lengths differ");
  const int seg = std::max(2, static_cast<int>(std::lround(0.032 * sample_rate)));
  const int hop = seg / 2;
  if (reference_direct.size() < static_cast<size_t>(seg))
    throw LengthMismatch("srr: signal shorter than one segment");

  const long n_segs = 1 + (static_cast<long>(reference_direct.size()) - seg) / hop;
  std::vector<double> seg_e(n_segs, 0.0);
  double peak = 0.0;
  for (long s = 0; s < n_segs; ++s) {
    const long o = s * hop;
    for (int i = 0; i < seg; ++i) seg_e[s] += reference_direct[o + i] * reference_direct[o + i];
    peak = std::max(peak, seg_e[s]);
  }
  const double gate = peak * std::pow(10.0, -kActivityGateDb / 10.0);

  double sum = 0.0;
  long n_scored = 0;
  for (long s = 0; s < n_segs; ++s) {
    if (seg_e[s] <= gate || seg_e[s] == 0.0) continue;
    const long o = s * hop;
    double cross = 0.0;
    for (int i = 0; i < seg; ++i) cross += test[o + i] * reference_direct[o + i];
    const double alpha = cross / seg_e[s];
    double resid = 0.0;
    for (int i = 0; i < seg; ++i) {
      const double r = test[o + i] - alpha * reference_direct[o + i];
      resid += r * r;
    }
    sum += clamp_db(alpha * alpha * seg_e[s], resid, kSegSrrLo, kSegSrrHi);
    n_scored += 1;
  }
  if (n_scored == 0) throw LengthMismatch("srr: no active reference segments");
  return sum / n_scored;
}

namespace {

std::vector<double> slice(const std::vector<double>& x, size_t a, size_t b) {
  a = std::min(a, x.size());
  b = std::min(b, x.size());
  return std::vector<double>(x.begin() + a, x.begin() + b);
}

}  // namespace

MetricReport evaluate(const ScenarioBundle& bundle, const std::vector<double>& enhanced_left,
                      const std::vector<double>& enhanced_right, int ref_left, int ref_right,
                      TimeInterval interval) {
  const double fs = bundle.spec.sample_rate;
  const size_t n = static_cast<size_t>(bundle.n_samples());
  if (n == 0) throw AlignmentError("evaluate: empty bundle");

  auto aligned = [&](const std::vector<double>& x) {
    const long d = static_cast<long>(x.size()) - static_cast<long>(n);
    if (std::labs(d) > bundle.stft.frame_len)
      throw AlignmentError("evaluate: enhanced signal length offset exceeds one frame");
    std::vector<double> y = x;
    y.resize(n, 0.0);
    return y;
  };
  const auto out_l = aligned(enhanced_left);
  const auto out_r = aligned(enhanced_right);

  if (interval.empty()) {
    // default: the union of target activity
    interval = {std::numeric_limits<double>::max(), 0.0};
    for (const int j : bundle.spec.target_indices()) {
      interval.begin = std::min(interval.begin, bundle.spec.sources[j].activity.begin);
      interval.end = std::max(interval.end, bundle.spec.sources[j].activity.end);
    }
  }
  const size_t a = static_cast<size_t>(std::max(0.0, interval.begin) * fs);
  const size_t b = static_cast<size_t>(std::max(0.0, interval.end) * fs);

  MetricReport rep;
  rep.interval = interval;
  const auto ref_l = slice(bundle.reference_direct[ref_left], a, b);
  const auto ref_r = slice(bundle.reference_direct[ref_right], a, b);
  const auto in_l = slice(bundle.mixture[ref_left], a, b);
  const auto in_r = slice(bundle.mixture[ref_right], a, b);

  rep.left.fwssnr_in = fwssnr(ref_l, in_l, fs);
  rep.left.fwssnr_out = fwssnr(ref_l, slice(out_l, a, b), fs);
  rep.left.srr_in = srr(ref_l, in_l, fs);
  rep.left.srr_out = srr(ref_l, slice(out_l, a, b), fs);
  rep.right.fwssnr_in = fwssnr(ref_r, in_r, fs);
  rep.right.fwssnr_out = fwssnr(ref_r, slice(out_r, a, b), fs);
  rep.right.srr_in = srr(ref_r, in_r, fs);
  rep.right.srr_out = srr(ref_r, slice(out_r, a, b), fs);

  rep.fwssnr_in = 0.5 * (rep.left.fwssnr_in + rep.right.fwssnr_in);
  rep.fwssnr_out = 0.5 * (rep.left.fwssnr_out + rep.right.fwssnr_out);
  rep.delta_fwssnr = rep.fwssnr_out - rep.fwssnr_in;
  rep.srr_in = 0.5 * (rep.left.srr_in + rep.right.srr_in);
  rep.srr_out = 0.5 * (rep.left.srr_out + rep.right.srr_out);
  rep.delta_srr = rep.srr_out - rep.srr_in;
  return rep;
}

}  // namespace wblcmp
