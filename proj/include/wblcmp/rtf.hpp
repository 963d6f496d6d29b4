// rtf.hpp -- per-bin source covariance tracking and RTF estimation by
// covariance whitening, plus the Hermitian-angle error measure.
#pragma once

#include "wblcmp/linalg.hpp"
#include "wblcmp/scenario.hpp"

namespace wblcmp {

struct RtfConfig {
  int n_mics = 4;
  int ref_mic = 0;
  double gamma_cov = 0.9608;    // target covariance tracking constant
  double reg_eps = 1e-6;        // relative regularization of R_v before the GEVD
  double ref_floor = 1e-8;      // reference-entry floor (relative), DegenerateRtf below
  double accept_margin = 1e-3;  // eigenvalue excess over 1 required to accept a target RTF

  void validate() const;
};

struct RtfEstimate {
  CVec rtf;            // reference entry exactly 1
  double eigval = 0.0; // principal generalized eigenvalue; ~1 means no source
};

// Covariance whitening: v = R_v * u with u the principal generalized
// eigenvector of (R_source_plus_v, R_v), normalized to the reference mic.
// R_v is regularized by reg_eps * trace/M * I (identity if trace is zero).
RtfEstimate estimate_rtf(const CMat& r_source_plus_v, const CMat& r_v, int ref_mic,
                         double reg_eps = 1e-6, double ref_floor = 1e-8);

// acos(|a^H b| / (|a| |b|)), clamped to [0, pi/2]. Invariant to nonzero
// complex scaling of either argument.
double hermitian_angle(const CVec& a, const CVec& b);

// Per-bin tracker. Noise-only and noise-plus-interferer periods accumulate
// fixed covariances (arithmetic means); the interferer RTF is computed once
// when its period ends and then frozen. The target covariance is tracked
// with exponential smoothing over target-active frames and its RTF is
// re-estimated every frame.
class RtfBinEstimator {
 public:
  RtfBinEstimator() = default;
  explicit RtfBinEstimator(const RtfConfig& cfg);

  void update(const CVec& z_t, FrameLabel label);

  bool has_target_rtf() const { return has_target_; }
  bool has_interferer_rtf() const { return has_interferer_; }
  const CVec& target_rtf() const { return target_rtf_; }
  const CVec& interferer_rtf() const { return interferer_rtf_; }

  const CMat& noise_cov() const { return r_noise_; }
  const CMat& noise_plus_interferer_cov() const { return r_npi_; }
  const CMat& target_cov() const { return r_target_; }
  long noise_frames() const { return n_noise_; }
  long npi_frames() const { return n_npi_; }

  // Single whole-signal estimate for the non-adaptive pipeline: arithmetic
  // mean target covariance whitened against the frozen periods.
  void accumulate_batch_target(const CVec& z_t);
  RtfEstimate batch_target_rtf() const;

 private:
  const CMat& whitening_reference() const;

  RtfConfig cfg_;
  CMat r_noise_, r_npi_, r_target_, r_target_batch_;
  long n_noise_ = 0, n_npi_ = 0, n_target_batch_ = 0;
  CVec target_rtf_, interferer_rtf_;
  bool has_target_ = false, has_interferer_ = false;
  bool interferer_frozen_ = false;
};

}  // namespace wblcmp
