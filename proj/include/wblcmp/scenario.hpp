// scenario.hpp -- synthetic acoustic scenes: seeded RIRs, source activity
// schedules, diffuse noise, calibrated mixtures, and oracle references.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "wblcmp/stft.hpp"

namespace wblcmp {

inline constexpr double kSpeedOfSound = 343.0;  // m/s
inline constexpr double kEarlyRirSeconds = 0.05;

using Vec3 = std::array<double, 3>;

struct TimeInterval {
  double begin = 0.0;  // seconds
  double end = 0.0;
  double length() const { return end - begin; }
  bool empty() const { return end <= begin; }
};

enum class SourceRole { target, interferer };

struct SourceSpec {
  SourceRole role = SourceRole::target;
  Vec3 position{0.0, 0.0, 0.0};
  TimeInterval activity;
  std::string signal = "synthetic";  // "synthetic" or a path to a mono WAV
};

struct ScenarioSpec {
  int n_mics = 4;
  std::vector<Vec3> mic_positions;
  std::vector<SourceSpec> sources;
  double t60 = 0.5;  // seconds
  double sample_rate = 16000.0;
  double duration = 39.0;  // seconds
  double snr_db = 0.0;     // broadband vs diffuse noise; +inf disables noise
  double sir_db = 0.0;     // broadband vs interferer; +inf disables scaling
  TimeInterval noise_only{0.0, 1.0};
  TimeInterval noise_plus_interferer{1.0, 2.0};
  int ref_mic = 0;
  std::uint64_t seed = 1;

  void validate() const;  // throws SpecInvalid
  std::vector<int> target_indices() const;
  int interferer_index() const;  // -1 when absent
};

enum class FrameLabel : int {
  noise_only = 0,
  noise_plus_interferer = 1,
  target_1_active = 2,
  target_2_active = 3,
};

const char* frame_label_name(FrameLabel l);

struct ScenarioBundle {
  ScenarioSpec spec;
  StftConfig stft;          // framing used for labels and oracle RTFs
  Audio mixture;            // n_mics x n_samples
  Audio reference_direct;   // early-RIR target component, n_mics x n_samples
  std::vector<Audio> source_images;  // per source, scaled as mixed
  Audio noise;                       // scaled as mixed; empty when disabled
  std::vector<FrameLabel> labels;    // per STFT frame
  std::vector<std::vector<CVec>> oracle_rtfs;  // [source][bin], ref entry = 1
  std::vector<Audio> rirs;                     // per source: n_mics impulse responses

  int n_samples() const { return mixture.empty() ? 0 : static_cast<int>(mixture[0].size()); }
};

// Stochastic Polack-style room impulse response: fractional-delay direct
// path with 1/d amplitude, seeded early-reflection taps inside the first
// 50 ms, and an exponentially decaying Gaussian tail whose Schroeder decay
// fits the requested T60.
std::vector<double> generate_rir(const Vec3& src_pos, const Vec3& mic_pos, double t60,
                                 double sample_rate, std::uint64_t seed);

// Principal-eigenvector RTF of white noise convolved with the early RIR
// parts, normalized so the reference-mic entry is exactly 1.
std::vector<CVec> oracle_rtf(const std::vector<std::vector<double>>& rir_early,
                             const StftConfig& cfg, int ref_mic);

ScenarioBundle build_scenario(const ScenarioSpec& spec, const StftConfig& cfg = StftConfig{});

// The paper-style switching-target layout: two target positions taking
// turns, a fixed interferer, diffuse noise, oracle periods in the first
// two seconds.
ScenarioSpec paper_switching_target_spec(std::uint64_t seed = 1, double duration = 39.0);

// Bundle directory I/O: WAVs plus a structured JSON sidecar (labels,
// oracle RTFs, spec echo).
void save_bundle(const ScenarioBundle& bundle, const std::string& dir);
ScenarioBundle load_bundle(const std::string& dir);

// FFT convolution, output truncated to out_len (0 keeps full length).
std::vector<double> fft_convolve(const std::vector<double>& x, const std::vector<double>& h,
                                 size_t out_len = 0);

// Seeded speech-shaped noise with slow log-normal envelope modulation.
std::vector<double> synthetic_speech(size_t n_samples, double sample_rate, std::uint64_t seed,
                                     bool modulated = true);

}  // namespace wblcmp
