// wpe.hpp -- adaptive MIMO prediction-error dereverberation. One state per
// frequency bin; the dereverberated output feeds RTF estimation only.
#pragma once

#include <deque>

#include "wblcmp/linalg.hpp"

namespace wblcmp {

struct WpeConfig {
  int n_mics = 4;
  int filter_len = 16;  // L_w, frames
  int delay = 3;        // tau, frames
  double gamma = 0.9608;
  double shape_p = 0.5;
  double init_reg = 1e-2;  // delta_w: inv_corr starts at (1/delta_w) I

  int stack_dim() const { return n_mics * (filter_len - delay); }
  void validate() const;
};

class WpeBinState {
 public:
  WpeBinState() = default;
  WpeBinState(const WpeConfig& cfg);

  // Predicts the late reverberation of y_t from frames t-tau .. t-L_w+1,
  // subtracts it, then updates the shared inverse correlation and the
  // per-channel prediction filters (RLS with exponential forgetting).
  CVec step(const CVec& y_t);

  const CMat& inv_corr() const { return inv_corr_; }
  const CMat& pred_filters() const { return pred_filters_; }

  // Test hook: freezes adaptation so the passthrough invariant (zero
  // filters => z == y) can be observed directly.
  void freeze() { frozen_ = true; }

 private:
  CVec delayed_stack() const;

  WpeConfig cfg_;
  CMat inv_corr_;      // D x D, D = M (L_w - tau)
  CMat pred_filters_;  // D x M
  std::deque<CVec> buffer_;  // frames t-1 .. t-L_w+1, most recent first
  double power_mean_ = 0.0;
  long n_frames_ = 0;
  bool frozen_ = false;
};

}  // namespace wblcmp
