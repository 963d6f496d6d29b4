// config.hpp -- resolved run configuration and the flat key-value config
// file format used by the CLI.
#pragma once

#include <string>
#include <vector>

#include "wblcmp/beamformer.hpp"
#include "wblcmp/rtf.hpp"
#include "wblcmp/stft.hpp"
#include "wblcmp/wpe.hpp"

namespace wblcmp {

enum class RunMode { adaptive, non_adaptive };

struct RunConfig {
  StftConfig stft;
  BeamformerConfig beamformer;
  WpeConfig wpe;
  RtfConfig rtf;
  RunMode mode = RunMode::adaptive;
  std::string scenario;  // bundle directory or inline spec file
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  std::vector<double> sweep_t_gamma_s = {0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.75, 1.0, 1.5};
  std::vector<double> sweep_p = {0.0, 0.5};
  int n_threads = 0;  // 0 = hardware concurrency

  // Propagates shared settings (mic count, framing, forgetting, shape) into
  // the WPE and RTF blocks unless they were overridden, then validates.
  void finalize();
  void validate() const;
};

// wpe/rtf fields left at these sentinels inherit the beamformer values
inline constexpr double kTrackBeamformer = -1.0;

RunConfig default_run_config();

// Flat INI-style text: [section] headers, key = value lines, '#' comments.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Fully resolved echo of a configuration, parseable by parse_config_text.
std::string config_echo(const RunConfig& cfg);

}  // namespace wblcmp
