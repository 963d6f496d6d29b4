// pipeline.hpp -- end-to-end enhancement runs: WPE preprocessing, RTF
// tracking, and the wBLCMP beamformer per bin and frame, plus the
// time-constant sweep protocol.
#pragma once

#include <functional>
#include <string>

#include "wblcmp/config.hpp"
#include "wblcmp/metrics.hpp"
#include "wblcmp/scenario.hpp"

namespace wblcmp {

struct TraceRow {
  int frame = 0;
  double time_s = 0.0;
  double herm_angle_rad = 0.0;  // mean over bins vs the active target oracle; NaN outside
  double w_mean = 0.0, w_min = 0.0, w_max = 0.0;
};

struct EnhanceResult {
  Audio enhanced;  // left, right
  std::vector<TraceRow> trace;
  double max_constraint_residual = 0.0;  // over frames/bins after target RTF availability
  long held_frames = 0;                  // frames where a singular Gram froze the filters
  double runtime_s = 0.0;
};

// Runs the configured pipeline over the bundle mixture. Oracle labels and
// oracle RTFs come from the bundle; enhanced output shares the mixture
// timeline. Throws ChannelMismatch when the mixture channel count differs
// from the configured mic count.
EnhanceResult run_enhance(const ScenarioBundle& bundle, const RunConfig& cfg);

struct SweepRow {
  double t_gamma_s = 0.0;  // 0 for the non-adaptive baselines
  double p = 0.0;
  std::string mode;  // "adaptive" | "non-adaptive"
  double delta_fwssnr = 0.0;
  double delta_srr = 0.0;
  double mean_herm_angle = 0.0;  // rad, over target-active frames
  double runtime_s = 0.0;
};

// Fig.-2-style protocol: for each p, one non-adaptive baseline plus one
// adaptive run per time constant; every cell is enhance + evaluate on the
// same bundle. Rows come back sorted by (p, t_gamma). Per-cell failures are
// reported through on_error and the sweep continues.
std::vector<SweepRow> run_sweep(
    const ScenarioBundle& bundle, const RunConfig& base,
    const std::function<void(const std::string&)>& on_error = nullptr);

// Serialize rows with the pinned CSV schema
// (t_gamma,p,mode,delta_fwssnr,delta_srr,mean_herm_angle,runtime).
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string trace_csv(const std::vector<TraceRow>& rows);

}  // namespace wblcmp
