// rtf.cpp

#include "wblcmp/rtf.hpp"

#include <cmath>

namespace wblcmp {

void RtfConfig::validate() const {
  if (n_mics < 2) throw ConfigInvalid("rtf: need at least 2 mics");
  if (ref_mic < 0 || ref_mic >= n_mics) throw ConfigInvalid("rtf: ref_mic out of range");
  if (gamma_cov <= 0.0 || gamma_cov > 1.0) throw ConfigInvalid("rtf: gamma_cov must be in (0, 1]");
  if (reg_eps < 0.0) throw ConfigInvalid("rtf: reg_eps must be nonnegative");
}

RtfEstimate estimate_rtf(const CMat& r_source_plus_v, const CMat& r_v, int ref_mic,
                         double reg_eps, double ref_floor) {
  const Eigen::Index m = r_source_plus_v.rows();
  if (ref_mic < 0 || ref_mic >= m) throw ConfigInvalid("estimate_rtf: ref_mic out of range");

  CMat rv = hermitianized(r_v);
  const double tr = rv.real().trace();
  if (tr <= 0.0) {
    rv = CMat::Identity(m, m);
  } else {
    rv += CMat::Identity(m, m) * (reg_eps * tr / static_cast<double>(m));
  }
  const EigPair pair = gevd_principal(hermitianized(r_source_plus_v), rv);

  CVec v = rv * pair.vector;  // de-whiten
  const double vmax = v.cwiseAbs().maxCoeff();
  const cplx ref = v(ref_mic);
  if (vmax <= 0.0 || std::abs(ref) < ref_floor * vmax)
    throw DegenerateRtf("estimate_rtf: reference-mic entry below floor");
  v /= ref;
  v(ref_mic) = cplx(1.0, 0.0);
  return RtfEstimate{std::move(v), pair.value};
}

double hermitian_angle(const CVec& a, const CVec& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw ZeroVector("hermitian_angle: zero-length vector");
  double c = std::abs(a.dot(b)) / (na * nb);
  c = std::min(1.0, std::max(0.0, c));
  return std::acos(c);
}

RtfBinEstimator::RtfBinEstimator(const RtfConfig& cfg) : cfg_(cfg) {
  cfg.validate();
  const int m = cfg.n_mics;
  r_noise_ = CMat::Zero(m, m);
  r_npi_ = CMat::Zero(m, m);
  r_target_ = CMat::Zero(m, m);
  r_target_batch_ = CMat::Zero(m, m);
}

const CMat& RtfBinEstimator::whitening_reference() const {
  // "all other sources and the background noise": prefer the
  // noise-plus-interferer period, fall back to noise only
  return n_npi_ > 0 ? r_npi_ : r_noise_;
}

void RtfBinEstimator::update(const CVec& z_t, FrameLabel label) {
  if (z_t.size() != cfg_.n_mics) throw LengthMismatch("rtf: frame size != n_mics");
  const CMat outer = hermitianized(z_t * z_t.adjoint());

  switch (label) {
    case FrameLabel::noise_only:
      n_noise_ += 1;
      r_noise_ += (outer - r_noise_) / static_cast<double>(n_noise_);
      break;
    case FrameLabel::noise_plus_interferer:
      n_npi_ += 1;
      r_npi_ += (outer - r_npi_) / static_cast<double>(n_npi_);
      break;
    case FrameLabel::target_1_active:
    case FrameLabel::target_2_active: {
      if (!interferer_frozen_) {
        // the oracle period just ended; fix the interferer RTF once
        interferer_frozen_ = true;
        if (n_npi_ > 0 && n_noise_ > 0) {
          try {
            RtfEstimate est = estimate_rtf(r_npi_, r_noise_, cfg_.ref_mic, cfg_.reg_eps,
                                           cfg_.ref_floor);
            if (est.eigval > 1.0 + cfg_.accept_margin) {
              interferer_rtf_ = std::move(est.rtf);
              has_interferer_ = true;
            }
          } catch (const Error&) {
            // leave unset; the beamformer keeps J = 1
          }
        }
      }
      r_target_ = hermitianized(cfg_.gamma_cov * r_target_ + (1.0 - cfg_.gamma_cov) * outer);
      try {
        RtfEstimate est = estimate_rtf(r_target_, whitening_reference(), cfg_.ref_mic,
                                       cfg_.reg_eps, cfg_.ref_floor);
        if (est.eigval > 1.0 + cfg_.accept_margin) {
          target_rtf_ = std::move(est.rtf);
          has_target_ = true;
        }
      } catch (const Error&) {
        // hold the previous estimate
      }
      break;
    }
  }
}

void RtfBinEstimator::accumulate_batch_target(const CVec& z_t) {
  n_target_batch_ += 1;
  r_target_batch_ += (hermitianized(z_t * z_t.adjoint()) - r_target_batch_) /
                     static_cast<double>(n_target_batch_);
}

RtfEstimate RtfBinEstimator::batch_target_rtf() const {
  if (n_target_batch_ == 0) throw DegenerateRtf("rtf: no target frames accumulated");
  return estimate_rtf(r_target_batch_, whitening_reference(), cfg_.ref_mic, cfg_.reg_eps,
                      cfg_.ref_floor);
}

}  // namespace wblcmp
