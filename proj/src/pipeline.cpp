// pipeline.cpp

#include "wblcmp/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

namespace wblcmp {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void parallel_for(int n, int n_threads, const std::function<void(int)>& fn) {
  if (n_threads <= 0) n_threads = static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, n));
  if (n_threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (int w = 0; w < n_threads; ++w) {
    pool.emplace_back([&, w]() {
      try {
        for (int i = w; i < n; i += n_threads) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string fmt_cell(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

EnhanceResult run_enhance(const ScenarioBundle& bundle, const RunConfig& cfg_in) {
  const auto t_start = std::chrono::steady_clock::now();
  RunConfig cfg = cfg_in;
  cfg.finalize();

  const int m = cfg.beamformer.n_mics;
  if (static_cast<int>(bundle.mixture.size()) != m)
    throw ChannelMismatch("enhance: mixture has " + std::to_string(bundle.mixture.size()) +
                          " channels, config expects " + std::to_string(m));
  if (bundle.stft.frame_len != cfg.stft.frame_len ||
      bundle.stft.frame_shift != cfg.stft.frame_shift)
    throw ConfigInvalid("enhance: bundle framing differs from the configured STFT");

  const SpectralTensor spec = analyze(bundle.mixture, cfg.stft);
  const int n_frames = spec.n_frames;
  const int n_bins = spec.n_bins;
  if (static_cast<int>(bundle.labels.size()) != n_frames)
    throw ConfigInvalid("enhance: bundle label count differs from the frame count");

  const std::vector<int> targets = bundle.spec.target_indices();
  auto active_oracle = [&](FrameLabel l) -> int {
    if (l == FrameLabel::target_1_active && !targets.empty()) return targets[0];
    if (l == FrameLabel::target_2_active && targets.size() > 1) return targets[1];
    return -1;
  };
  const bool have_oracles = !bundle.oracle_rtfs.empty();

  // per-bin startup power sets the initial regularization scale
  std::vector<double> init_power(n_bins, 0.0);
  const int n_init = std::min(10, n_frames);
  for (int f = 0; f < n_bins; ++f) {
    double p = 0.0;
    for (int t = 0; t < n_init; ++t)
      for (int mc = 0; mc < m; ++mc) p += std::norm(spec.at(t, f, mc));
    init_power[f] = p / (static_cast<double>(n_init) * m);
  }

  const size_t cells = static_cast<size_t>(n_frames) * n_bins;
  std::vector<cplx> out_left(cells, cplx(0.0, 0.0)), out_right(cells, cplx(0.0, 0.0));
  std::vector<double> weights(cells, 1.0), angles(cells, kNan);
  std::vector<double> bin_residual(n_bins, 0.0);
  std::vector<long> bin_held(n_bins, 0);

  auto process_bin = [&](int f) {
    WpeConfig wcfg = cfg.wpe;
    wcfg.init_reg = std::max(cfg.beamformer.init_reg_rel * init_power[f],
                             cfg.beamformer.init_reg_abs);
    WpeBinState wpe(wcfg);
    RtfBinEstimator rtf(cfg.rtf);

    if (cfg.mode == RunMode::adaptive) {
      BinBeamformerState bf(cfg.beamformer, init_power[f]);
      for (int t = 0; t < n_frames; ++t) {
        const CVec y = spec.frame_vec(t, f);
        const CVec z = wpe.step(y);
        rtf.update(z, bundle.labels[t]);
        const CVec* tp = rtf.has_target_rtf() ? &rtf.target_rtf() : nullptr;
        const CVec* ip = rtf.has_interferer_rtf() ? &rtf.interferer_rtf() : nullptr;
        const StepOutput out = bf.step(y, tp, ip);
        const size_t cell = static_cast<size_t>(t) * n_bins + f;
        out_left[cell] = out.left;
        out_right[cell] = out.right;
        weights[cell] = out.weight;
        if (out.held) bin_held[f] += 1;
        if (tp != nullptr && !out.held)
          bin_residual[f] = std::max(bin_residual[f], out.constraint_residual);
        const int oi = active_oracle(bundle.labels[t]);
        if (oi >= 0 && tp != nullptr && have_oracles)
          angles[cell] = hermitian_angle(*tp, bundle.oracle_rtfs[oi][f]);
      }
    } else {
      // pass 1: dereverberate, accumulate period covariances and the
      // whole-signal target covariance
      std::vector<CVec> frames;
      frames.reserve(n_frames);
      for (int t = 0; t < n_frames; ++t) {
        const CVec y = spec.frame_vec(t, f);
        const CVec z = wpe.step(y);
        rtf.update(z, bundle.labels[t]);
        if (bundle.labels[t] == FrameLabel::target_1_active ||
            bundle.labels[t] == FrameLabel::target_2_active)
          rtf.accumulate_batch_target(z);
        frames.push_back(y);
      }
      CVec target_fixed;
      const CVec* tp = nullptr;
      try {
        target_fixed = rtf.batch_target_rtf().rtf;
        tp = &target_fixed;
      } catch (const Error&) {
        // no usable target estimate; keep the fallback constraint
      }
      const CVec* ip = rtf.has_interferer_rtf() ? &rtf.interferer_rtf() : nullptr;

      BeamformerConfig bcfg = cfg.beamformer;
      bcfg.t_gamma_s = std::numeric_limits<double>::infinity();  // gamma = 1
      const BatchResult batch = batch_solve_bin(frames, tp, ip, bcfg, init_power[f]);

      // constraint residual of the final time-invariant filters
      for (const int nu : {bcfg.ref_left, bcfg.ref_right}) {
        std::vector<double> betas;
        const CMat c = build_constraints(bcfg, nu, tp, ip, &betas);
        const CVec& h = (nu == bcfg.ref_left) ? batch.h_left : batch.h_right;
        for (Eigen::Index i = 0; i < c.cols(); ++i)
          bin_residual[f] = std::max(bin_residual[f],
                                     std::abs(h.dot(c.col(i)) - cplx(betas[i], 0.0)));
      }
      for (int t = 0; t < n_frames; ++t) {
        const size_t cell = static_cast<size_t>(t) * n_bins + f;
        out_left[cell] = batch.left[t];
        out_right[cell] = batch.right[t];
        weights[cell] = estimate_weight(batch.left[t], batch.right[t], bcfg.shape_p, 1e-300);
        const int oi = active_oracle(bundle.labels[t]);
        if (oi >= 0 && tp != nullptr && have_oracles)
          angles[cell] = hermitian_angle(*tp, bundle.oracle_rtfs[oi][f]);
      }
    }
  };
  parallel_for(n_bins, cfg.n_threads, process_bin);

  // synthesize the stereo output on the mixture timeline
  SpectralTensor out_spec(n_frames, n_bins, 2);
  for (int t = 0; t < n_frames; ++t)
    for (int f = 0; f < n_bins; ++f) {
      const size_t cell = static_cast<size_t>(t) * n_bins + f;
      out_spec.at(t, f, 0) = out_left[cell];
      out_spec.at(t, f, 1) = out_right[cell];
    }

  EnhanceResult res;
  res.enhanced = synthesize(out_spec, cfg.stft, bundle.mixture[0].size());
  res.trace.resize(n_frames);
  for (int t = 0; t < n_frames; ++t) {
    TraceRow& row = res.trace[t];
    row.frame = t;
    row.time_s = t * cfg.stft.frame_shift_s();
    double asum = 0.0;
    long acnt = 0;
    double wmin = std::numeric_limits<double>::max(), wmax = 0.0, wsum = 0.0;
    for (int f = 0; f < n_bins; ++f) {
      const size_t cell = static_cast<size_t>(t) * n_bins + f;
      if (!std::isnan(angles[cell])) {
        asum += angles[cell];
        acnt += 1;
      }
      wsum += weights[cell];
      wmin = std::min(wmin, weights[cell]);
      wmax = std::max(wmax, weights[cell]);
    }
    row.herm_angle_rad = acnt > 0 ? asum / acnt : kNan;
    row.w_mean = wsum / n_bins;
    row.w_min = wmin;
    row.w_max = wmax;
  }
  for (int f = 0; f < n_bins; ++f) {
    res.max_constraint_residual = std::max(res.max_constraint_residual, bin_residual[f]);
    res.held_frames += bin_held[f];
  }
  res.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return res;
}

std::vector<SweepRow> run_sweep(const ScenarioBundle& bundle, const RunConfig& base,
                                const std::function<void(const std::string&)>& on_error) {
  if (base.sweep_t_gamma_s.empty() || base.sweep_p.empty())
    throw ConfigInvalid("sweep: empty sweep lists");
  std::vector<double> ps = base.sweep_p;
  std::vector<double> ts = base.sweep_t_gamma_s;
  std::sort(ps.begin(), ps.end());
  std::sort(ts.begin(), ts.end());

  std::vector<SweepRow> rows;
  auto run_cell = [&](double p, double t_gamma, RunMode mode) {
    RunConfig cfg = base;
    cfg.mode = mode;
    cfg.beamformer.shape_p = p;
    cfg.beamformer.t_gamma_s =
        mode == RunMode::adaptive ? t_gamma : std::numeric_limits<double>::infinity();
    // tracking constants follow the cell's time constant unless pinned
    cfg.wpe = base.wpe;
    cfg.rtf = base.rtf;
    try {
      const EnhanceResult er = run_enhance(bundle, cfg);
      const MetricReport rep = evaluate(bundle, er.enhanced[0], er.enhanced[1],
                                        cfg.beamformer.ref_left, cfg.beamformer.ref_right);
      double asum = 0.0;
      long acnt = 0;
      for (const auto& r : er.trace)
        if (!std::isnan(r.herm_angle_rad)) {
          asum += r.herm_angle_rad;
          acnt += 1;
        }
      SweepRow row;
      row.t_gamma_s = mode == RunMode::adaptive ? t_gamma : 0.0;
      row.p = p;
      row.mode = mode == RunMode::adaptive ? "adaptive" : "non-adaptive";
      row.delta_fwssnr = rep.delta_fwssnr;
      row.delta_srr = rep.delta_srr;
      row.mean_herm_angle = acnt > 0 ? asum / acnt : kNan;
      row.runtime_s = er.runtime_s;
      rows.push_back(row);
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "sweep cell failed (p=" << p << ", t_gamma=" << t_gamma
          << ", mode=" << (mode == RunMode::adaptive ? "adaptive" : "non-adaptive")
          << "): " << e.what();
      if (on_error) on_error(msg.str());
    }
  };

  for (const double p : ps) {
    run_cell(p, 0.0, RunMode::non_adaptive);
    for (const double t : ts) run_cell(p, t, RunMode::adaptive);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream o;
  o << "# t_gamma in seconds (0 for non-adaptive rows); deltas in dB;\n";
  o << "# mean_herm_angle in radians over target-active frames; runtime in seconds\n";
  o << "t_gamma,p,mode,delta_fwssnr,delta_srr,mean_herm_angle,runtime\n";
  for (const auto& r : rows) {
    o << fmt_cell(r.t_gamma_s) << "," << fmt_cell(r.p) << "," << r.mode << ","
      << fmt_cell(r.delta_fwssnr) << "," << fmt_cell(r.delta_srr) << ","
      << fmt_cell(r.mean_herm_angle) << "," << fmt_cell(r.runtime_s) << "\n";
  }
  return o.str();
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::ostringstream o;
  o << "# herm_angle_rad: mean over bins vs the active target oracle RTF (nan outside\n";
  o << "# target activity); w_*: IRLS weight statistics over bins\n";
  o << "frame,time_s,herm_angle_rad,w_mean,w_min,w_max\n";
  for (const auto& r : rows) {
    o << r.frame << "," << fmt_cell(r.time_s) << "," << fmt_cell(r.herm_angle_rad) << ","
      << fmt_cell(r.w_mean) << "," << fmt_cell(r.w_min) << "," << fmt_cell(r.w_max) << "\n";
  }
  return o.str();
}

}  // namespace wblcmp
