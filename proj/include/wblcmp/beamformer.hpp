// beamformer.hpp -- the convolutional wBLCMP beamformer: stacked
// observations, recursive weighted STCM inverse, IRLS weights, constrained
// filter solves, online and batch modes.
#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "wblcmp/linalg.hpp"

namespace wblcmp {

struct BeamformerConfig {
  int n_mics = 4;
  int filter_len = 16;  // L_h, frames
  int delay = 3;        // tau, frames
  double shape_p = 0.5;
  double t_gamma_s = 0.4;       // time constant; +inf means gamma = 1
  double frame_shift_s = 0.016;  // t_s
  std::vector<double> betas_db = {0.0, -20.0};  // per-source scaling, dB
  int ref_left = 0;
  int ref_right = 2;
  double init_reg_rel = 1e-3;   // delta = rel * mean startup power
  double init_reg_abs = 1e-6;   // fallback when the startup power is zero
  int n_irls_iters = 1;         // batch mode
  bool force_unit_weights = false;  // diagnostic: pins every weight to 1

  double gamma() const { return std::exp(-frame_shift_s / t_gamma_s); }
  int stacked_dim() const { return n_mics * (filter_len - delay + 1); }
  std::vector<double> betas_linear() const;
  void validate() const;
};

// [y_t; y_{t-tau}; ...; y_{t-L_h+1}]: the current frame plus the
// tau-delayed history; frames t-1 .. t-tau+1 are excluded. The ring holds
// past frames most recent first and is zero-filled at signal start.
CVec stack_observation(const std::deque<CVec>& frame_ring, const CVec& y_t, int filter_len,
                       int delay);

// w = max(|d_L|^2 + |d_R|^2, floor)^(p/2 - 1)
double estimate_weight(cplx d_left, cplx d_right, double p, double floor);

// h = Rinv C (C^H Rinv C)^{-1} B C^H e_nu. Throws SingularConstraintGram
// when the constraint Gram matrix has condition estimate > 1e12.
CVec solve_filter(const CMat& rinv, const CMat& c, const CMat& b, const CVec& e_nu);

// Stacked constraint matrix for output nu: RTF columns renormalized at that
// mic and zero-padded below the first M entries. A missing target RTF (or a
// degenerate renormalization) falls back to a reference-mic selection
// column; a missing interferer drops its constraint (J = 1). Fills the
// matching beta values.
CMat build_constraints(const BeamformerConfig& cfg, int nu, const CVec* rtf_target,
                       const CVec* rtf_interferer, std::vector<double>* betas);

struct StepOutput {
  cplx left;
  cplx right;
  double weight = 1.0;
  double constraint_residual = 0.0;  // max_j |h_nu^H c_j - beta_j| over both nu
  bool held = false;                 // filters kept from the previous frame
};

class BinBeamformerState {
 public:
  BinBeamformerState() = default;
  // init_power sets the initial regularization delta (mean per-bin input
  // power over the first frames; see BeamformerConfig::init_reg_rel).
  BinBeamformerState(const BeamformerConfig& cfg, double init_power);

  // One adaptive frame: provisional outputs from the previous filters give
  // the IRLS weight, the STCM inverse is updated by the Woodbury recursion,
  // constraints are refreshed from the current RTFs, and the new filters
  // produce the outputs. RTF vectors are normalized at the left reference
  // mic; missing RTFs fall back to reference-mic selection constraints.
  StepOutput step(const CVec& y_t, const CVec* rtf_target, const CVec* rtf_interferer);

  const CMat& rinv() const { return rinv_; }
  const CVec& h_left() const { return h_left_; }
  const CVec& h_right() const { return h_right_; }
  double delta() const { return delta_; }

 private:
  BeamformerConfig cfg_;
  CMat rinv_;
  CVec h_left_, h_right_;
  std::deque<CVec> ring_;
  double delta_ = 0.0;
  double power_mean_ = 0.0;
  long n_frames_ = 0;
};

struct BatchResult {
  std::vector<cplx> left;   // per frame
  std::vector<cplx> right;
  CVec h_left, h_right;     // final filters
  std::vector<double> objective;  // sum_n sum_nu |d|^p after each IRLS iteration
};

// Time-invariant solve over a whole per-bin frame sequence (gamma = 1
// accumulation plus the same initial regularization as the online path),
// iterated IRLS with fixed RTFs.
BatchResult batch_solve_bin(const std::vector<CVec>& frames, const CVec* rtf_target,
                            const CVec* rtf_interferer, const BeamformerConfig& cfg,
                            double init_power);

}  // namespace wblcmp
