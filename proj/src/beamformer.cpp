// beamformer.cpp

#include "wblcmp/beamformer.hpp"

#include <cmath>

namespace wblcmp {

std::vector<double> BeamformerConfig::betas_linear() const {
  std::vector<double> out;
  out.reserve(betas_db.size());
  for (const double db : betas_db) out.push_back(std::pow(10.0, db / 20.0));
  return out;
}

void BeamformerConfig::validate() const {
  if (n_mics < 2) throw ConfigInvalid("beamformer: need at least 2 mics");
  if (delay < 1) throw ConfigInvalid("beamformer: delay must be >= 1");
  if (filter_len < delay) throw ConfigInvalid("beamformer: filter_len must be >= delay");
  if (shape_p < 0.0 || shape_p > 2.0) throw ConfigInvalid("beamformer: p must be in [0, 2]");
  if (!(t_gamma_s > 0.0)) throw ConfigInvalid("beamformer: t_gamma must be positive");
  if (frame_shift_s <= 0.0) throw ConfigInvalid("beamformer: frame shift must be positive");
  const double g = gamma();
  if (!(g > 0.0 && g <= 1.0)) throw ConfigInvalid("beamformer: gamma outside (0, 1]");
  if (ref_left < 0 || ref_left >= n_mics || ref_right < 0 || ref_right >= n_mics)
    throw ConfigInvalid("beamformer: reference mics out of range");
  if (betas_db.empty()) throw ConfigInvalid("beamformer: need at least beta_1");
  if (n_irls_iters < 1) throw ConfigInvalid("beamformer: n_irls_iters must be >= 1");
}

CVec stack_observation(const std::deque<CVec>& frame_ring, const CVec& y_t, int filter_len,
                       int delay) {
  const int m = static_cast<int>(y_t.size());
  const int n_blocks = filter_len - delay + 1;
  CVec out = CVec::Zero(static_cast<Eigen::Index>(m) * n_blocks);
  out.head(m) = y_t;
  int row = m;
  for (int lag = delay; lag <= filter_len - 1; ++lag) {
    const int idx = lag - 1;  // ring holds t-1 first
    if (idx < static_cast<int>(frame_ring.size())) out.segment(row, m) = frame_ring[idx];
    row += m;
  }
  return out;
}

double estimate_weight(cplx d_left, cplx d_right, double p, double floor) {
  const double power = std::max(std::norm(d_left) + std::norm(d_right), floor);
  return std::pow(power, 0.5 * p - 1.0);
}

CVec solve_filter(const CMat& rinv, const CMat& c, const CMat& b, const CVec& e_nu) {
  const Eigen::Index k = rinv.rows();
  const Eigen::Index j = c.cols();
  if (c.rows() != k || e_nu.size() != k || b.rows() != j || b.cols() != j)
    throw LengthMismatch("solve_filter: dimension mismatch");

  const CMat rinv_c = rinv * c;
  const CMat gram = hermitianized(c.adjoint() * rinv_c);
  Eigen::SelfAdjointEigenSolver<CMat> es(gram);
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(j - 1);
  if (!(lo > 0.0) || hi / lo > 1e12)
    throw SingularConstraintGram("solve_filter: constraint Gram matrix is singular");

  const CVec rhs = b * (c.adjoint() * e_nu);
  const CVec g = hpd_solve(gram, rhs);
  return rinv_c * g;
}

BinBeamformerState::BinBeamformerState(const BeamformerConfig& cfg, double init_power)
    : cfg_(cfg) {
  cfg.validate();
  delta_ = init_power > 0.0 ? cfg.init_reg_rel * init_power : cfg.init_reg_abs;
  const int k = cfg.stacked_dim();
  rinv_ = CMat::Identity(k, k) * (1.0 / delta_);
  // reference-selection filters match the first fallback solve
  h_left_ = CVec::Zero(k);
  h_left_(cfg.ref_left) = 1.0;
  h_right_ = CVec::Zero(k);
  h_right_(cfg.ref_right) = 1.0;
}

CMat build_constraints(const BeamformerConfig& cfg, int nu, const CVec* rtf_target,
                       const CVec* rtf_interferer, std::vector<double>* betas) {
  const int k = cfg.stacked_dim();
  const int m = cfg.n_mics;
  const auto beta_lin = cfg.betas_linear();

  std::vector<CVec> cols;
  std::vector<double> bvals;
  // target constraint; reference-mic selection until an RTF is available
  CVec tcol = CVec::Zero(k);
  if (rtf_target != nullptr) {
    const cplx at_nu = (*rtf_target)(nu);
    if (std::abs(at_nu) > 1e-9 * rtf_target->cwiseAbs().maxCoeff()) {
      tcol.head(m) = *rtf_target / at_nu;
      tcol(nu) = 1.0;
    } else {
      tcol(nu) = 1.0;  // degenerate renormalization, fall back
    }
  } else {
    tcol(nu) = 1.0;
  }
  cols.push_back(std::move(tcol));
  bvals.push_back(beta_lin[0]);

  if (rtf_interferer != nullptr && beta_lin.size() > 1) {
    const cplx at_nu = (*rtf_interferer)(nu);
    if (std::abs(at_nu) > 1e-9 * rtf_interferer->cwiseAbs().maxCoeff()) {
      CVec icol = CVec::Zero(k);
      icol.head(m) = *rtf_interferer / at_nu;
      icol(nu) = 1.0;
      cols.push_back(std::move(icol));
      bvals.push_back(beta_lin[1]);
    }
  }

  CMat c(k, static_cast<Eigen::Index>(cols.size()));
  for (size_t i = 0; i < cols.size(); ++i) c.col(static_cast<Eigen::Index>(i)) = cols[i];
  if (betas != nullptr) *betas = bvals;
  return c;
}

StepOutput BinBeamformerState::step(const CVec& y_t, const CVec* rtf_target,
                                    const CVec* rtf_interferer) {
  if (y_t.size() != cfg_.n_mics) throw LengthMismatch("beamformer: frame size != n_mics");
  const CVec ybar = stack_observation(ring_, y_t, cfg_.filter_len, cfg_.delay);

  // running mean stacked power anchors the weight floor
  n_frames_ += 1;
  power_mean_ += (ybar.squaredNorm() - power_mean_) / n_frames_;
  const double floor = 1e-10 * std::max(power_mean_, 1e-300);

  StepOutput out;
  const cplx prov_left = h_left_.dot(ybar);
  const cplx prov_right = h_right_.dot(ybar);
  out.weight = cfg_.force_unit_weights
                   ? 1.0
                   : estimate_weight(prov_left, prov_right, cfg_.shape_p, floor);

  rinv_ = rank_one_inverse_update(rinv_, ybar, out.weight, cfg_.gamma());

  for (const int nu : {cfg_.ref_left, cfg_.ref_right}) {
    std::vector<double> betas;
    const CMat c = build_constraints(cfg_, nu, rtf_target, rtf_interferer, &betas);
    CMat b = CMat::Zero(c.cols(), c.cols());
    for (Eigen::Index i = 0; i < c.cols(); ++i) b(i, i) = betas[i];
    CVec e = CVec::Zero(cfg_.stacked_dim());
    e(nu) = 1.0;
    CVec& h = (nu == cfg_.ref_left) ? h_left_ : h_right_;
    try {
      h = solve_filter(rinv_, c, b, e);
    } catch (const SingularConstraintGram&) {
      out.held = true;  // keep the previous filter for this frame
    }
    for (Eigen::Index i = 0; i < c.cols(); ++i)
      out.constraint_residual =
          std::max(out.constraint_residual, std::abs(h.dot(c.col(i)) - cplx(betas[i], 0.0)));
  }

  out.left = h_left_.dot(ybar);
  out.right = h_right_.dot(ybar);

  ring_.push_front(y_t);
  while (static_cast<int>(ring_.size()) > cfg_.filter_len - 1) ring_.pop_back();
  return out;
}

BatchResult batch_solve_bin(const std::vector<CVec>& frames, const CVec* rtf_target,
                            const CVec* rtf_interferer, const BeamformerConfig& cfg,
                            double init_power) {
  cfg.validate();
  const int k = cfg.stacked_dim();
  const size_t t_total = frames.size();
  const double delta = init_power > 0.0 ? cfg.init_reg_rel * init_power : cfg.init_reg_abs;

  // stacked observations for the whole bin
  std::vector<CVec> stacks;
  stacks.reserve(t_total);
  std::deque<CVec> ring;
  double power_sum = 0.0;
  for (const CVec& y : frames) {
    stacks.push_back(stack_observation(ring, y, cfg.filter_len, cfg.delay));
    power_sum += stacks.back().squaredNorm();
    ring.push_front(y);
    while (static_cast<int>(ring.size()) > cfg.filter_len - 1) ring.pop_back();
  }
  const double floor = 1e-10 * std::max(power_sum / std::max<size_t>(t_total, 1), 1e-300);

  BatchResult res;
  res.left.assign(t_total, cplx(0.0, 0.0));
  res.right.assign(t_total, cplx(0.0, 0.0));
  std::vector<double> w(t_total, 1.0);

  for (int iter = 0; iter < cfg.n_irls_iters; ++iter) {
    CMat r = CMat::Identity(k, k) * delta;
    for (size_t n = 0; n < t_total; ++n) r.noalias() += w[n] * (stacks[n] * stacks[n].adjoint());
    r = hermitianized(r);
    const CMat rinv = hpd_solve(r, CMat(CMat::Identity(k, k)));

    for (const int nu : {cfg.ref_left, cfg.ref_right}) {
      std::vector<double> betas;
      const CMat c = build_constraints(cfg, nu, rtf_target, rtf_interferer, &betas);
      CMat b = CMat::Zero(c.cols(), c.cols());
      for (Eigen::Index i = 0; i < c.cols(); ++i) b(i, i) = betas[i];
      CVec e = CVec::Zero(k);
      e(nu) = 1.0;
      CVec h = solve_filter(rinv, c, b, e);
      if (nu == cfg.ref_left)
        res.h_left = h;
      else
        res.h_right = h;
    }

    double objective = 0.0;
    for (size_t n = 0; n < t_total; ++n) {
      res.left[n] = res.h_left.dot(stacks[n]);
      res.right[n] = res.h_right.dot(stacks[n]);
      objective += std::pow(std::abs(res.left[n]), cfg.shape_p) +
                   std::pow(std::abs(res.right[n]), cfg.shape_p);
      if (!cfg.force_unit_weights)
        w[n] = estimate_weight(res.left[n], res.right[n], cfg.shape_p, floor);
    }
    res.objective.push_back(objective);
  }
  return res;
}

}  // namespace wblcmp
