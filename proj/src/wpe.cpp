// wpe.cpp

#include "wblcmp/wpe.hpp"

#include <cmath>

namespace wblcmp {

void WpeConfig::validate() const {
  if (n_mics < 1) throw ConfigInvalid("wpe: need at least one mic");
  if (delay < 1) throw ConfigInvalid("wpe: delay must be >= 1");
  if (filter_len < delay) throw ConfigInvalid("wpe: filter_len must be >= delay");
  if (gamma <= 0.0 || gamma > 1.0) throw ConfigInvalid("wpe: gamma must be in (0, 1]");
  if (shape_p < 0.0 || shape_p > 2.0) throw ConfigInvalid("wpe: shape p must be in [0, 2]");
  if (init_reg <= 0.0) throw ConfigInvalid("wpe: init_reg must be positive");
}

WpeBinState::WpeBinState(const WpeConfig& cfg) : cfg_(cfg) {
  cfg.validate();
  const int d = cfg.stack_dim();
  inv_corr_ = CMat::Identity(d, d) * (1.0 / cfg.init_reg);
  pred_filters_ = CMat::Zero(d, cfg.n_mics);
}

CVec WpeBinState::delayed_stack() const {
  // frames t-tau .. t-L_w+1; buffer_ holds t-1 first, so the block for
  // lag l sits at buffer_[l-1]
  const int d = cfg_.stack_dim();
  CVec s = CVec::Zero(d);
  int row = 0;
  for (int lag = cfg_.delay; lag <= cfg_.filter_len - 1; ++lag) {
    const int idx = lag - 1;
    if (idx < static_cast<int>(buffer_.size())) s.segment(row, cfg_.n_mics) = buffer_[idx];
    row += cfg_.n_mics;
  }
  return s;
}

CVec WpeBinState::step(const CVec& y_t) {
  if (y_t.size() != cfg_.n_mics) throw LengthMismatch("wpe: frame size != n_mics");
  const int d = cfg_.stack_dim();

  CVec z = y_t;
  if (d > 0) {
    const CVec ybar = delayed_stack();
    z.noalias() -= pred_filters_.adjoint() * ybar;

    // digital silence carries no information; leave the state untouched
    const bool all_zero = y_t.squaredNorm() == 0.0 && ybar.squaredNorm() == 0.0;
    if (!frozen_ && !all_zero) {
      // running mean input power sets the weight floor scale
      n_frames_ += 1;
      power_mean_ += (y_t.squaredNorm() / cfg_.n_mics - power_mean_) / n_frames_;
      const double floor = 1e-10 * std::max(power_mean_, 1e-300);
      const double out_power = std::max(z.squaredNorm() / cfg_.n_mics, floor);
      const double w = std::pow(out_power, 0.5 * cfg_.shape_p - 1.0);

      inv_corr_ = rank_one_inverse_update(inv_corr_, ybar, w, cfg_.gamma);
      // shared RLS gain, a-priori error z
      const CVec gain = w * (inv_corr_ * ybar);
      pred_filters_.noalias() += gain * z.adjoint();
    }
  }

  buffer_.push_front(y_t);
  while (static_cast<int>(buffer_.size()) > cfg_.filter_len - 1) buffer_.pop_back();
  return z;
}

}  // namespace wblcmp
