// config.cpp

#include "wblcmp/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "wblcmp/errors.hpp"

namespace wblcmp {

RunConfig default_run_config() {
  RunConfig cfg;
  cfg.stft = StftConfig{};
  cfg.beamformer = BeamformerConfig{};
  // wpe and rtf track the beamformer unless overridden
  cfg.wpe.filter_len = -1;
  cfg.wpe.delay = -1;
  cfg.wpe.gamma = kTrackBeamformer;
  cfg.wpe.shape_p = kTrackBeamformer;
  cfg.rtf.gamma_cov = kTrackBeamformer;
  return cfg;
}

void RunConfig::finalize() {
  beamformer.frame_shift_s = stft.frame_shift_s();
  wpe.n_mics = beamformer.n_mics;
  if (wpe.filter_len < 0) wpe.filter_len = beamformer.filter_len;
  if (wpe.delay < 0) wpe.delay = beamformer.delay;
  if (wpe.gamma == kTrackBeamformer) wpe.gamma = beamformer.gamma();
  if (wpe.shape_p == kTrackBeamformer) wpe.shape_p = beamformer.shape_p;
  rtf.n_mics = beamformer.n_mics;
  rtf.ref_mic = beamformer.ref_left;
  if (rtf.gamma_cov == kTrackBeamformer) rtf.gamma_cov = beamformer.gamma();
  validate();
}

void RunConfig::validate() const {
  stft.validate();
  beamformer.validate();
  wpe.validate();
  rtf.validate();
  if (n_threads < 0) throw ConfigInvalid("run: n_threads must be >= 0");
  for (const double t : sweep_t_gamma_s)
    if (!(t > 0.0)) throw ConfigInvalid("sweep: time constants must be positive");
  for (const double p : sweep_p)
    if (p < 0.0 || p > 2.0) throw ConfigInvalid("sweep: p values must be in [0, 2]");
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigInvalid("config: bad number for " + key + ": '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long d = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return static_cast<int>(d);
  } catch (const std::exception&) {
    throw ConfigInvalid("config: bad integer for " + key + ": '" + v + "'");
  }
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg = default_run_config();
  std::string section;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigInvalid("config: malformed section: " + line);
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigInvalid("config: expected key = value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const std::string full = section + "." + key;

    if (full == "stft.frame_len") cfg.stft.frame_len = parse_int(full, val);
    else if (full == "stft.frame_shift") cfg.stft.frame_shift = parse_int(full, val);
    else if (full == "stft.sample_rate") cfg.stft.sample_rate = parse_double(full, val);
    else if (full == "beamformer.n_mics") cfg.beamformer.n_mics = parse_int(full, val);
    else if (full == "beamformer.filter_len") cfg.beamformer.filter_len = parse_int(full, val);
    else if (full == "beamformer.delay") cfg.beamformer.delay = parse_int(full, val);
    else if (full == "beamformer.p") cfg.beamformer.shape_p = parse_double(full, val);
    else if (full == "beamformer.t_gamma_ms")
      cfg.beamformer.t_gamma_s = parse_double(full, val) / 1000.0;
    else if (full == "beamformer.beta_db") cfg.beamformer.betas_db = parse_list(full, val);
    else if (full == "beamformer.ref_left") cfg.beamformer.ref_left = parse_int(full, val);
    else if (full == "beamformer.ref_right") cfg.beamformer.ref_right = parse_int(full, val);
    else if (full == "beamformer.init_reg_rel")
      cfg.beamformer.init_reg_rel = parse_double(full, val);
    else if (full == "beamformer.init_reg_abs")
      cfg.beamformer.init_reg_abs = parse_double(full, val);
    else if (full == "beamformer.n_irls_iters")
      cfg.beamformer.n_irls_iters = parse_int(full, val);
    else if (full == "wpe.filter_len") cfg.wpe.filter_len = parse_int(full, val);
    else if (full == "wpe.delay") cfg.wpe.delay = parse_int(full, val);
    else if (full == "wpe.gamma") cfg.wpe.gamma = parse_double(full, val);
    else if (full == "wpe.p") cfg.wpe.shape_p = parse_double(full, val);
    else if (full == "wpe.init_reg") cfg.wpe.init_reg = parse_double(full, val);
    else if (full == "rtf.gamma_cov") cfg.rtf.gamma_cov = parse_double(full, val);
    else if (full == "rtf.reg_eps") cfg.rtf.reg_eps = parse_double(full, val);
    else if (full == "rtf.accept_margin") cfg.rtf.accept_margin = parse_double(full, val);
    else if (full == "run.mode") {
      if (val == "adaptive") cfg.mode = RunMode::adaptive;
      else if (val == "non-adaptive") cfg.mode = RunMode::non_adaptive;
      else throw ConfigInvalid("config: run.mode must be adaptive or non-adaptive");
    } else if (full == "run.scenario") cfg.scenario = val;
    else if (full == "run.out_dir") cfg.out_dir = val;
    else if (full == "run.seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(val));
    else if (full == "run.n_threads") cfg.n_threads = parse_int(full, val);
    else if (full == "sweep.t_gamma_ms") {
      cfg.sweep_t_gamma_s = parse_list(full, val);
      for (auto& t : cfg.sweep_t_gamma_s) t /= 1000.0;
    } else if (full == "sweep.p") cfg.sweep_p = parse_list(full, val);
    else throw ConfigInvalid("config: unknown key '" + full + "'");
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_echo(const RunConfig& cfg) {
  std::ostringstream o;
  o << "# resolved configuration echo\n";
  o << "[stft]\n";
  o << "frame_len = " << cfg.stft.frame_len << "\n";
  o << "frame_shift = " << cfg.stft.frame_shift << "\n";
  o << "sample_rate = " << fmt(cfg.stft.sample_rate) << "\n";
  o << "\n[beamformer]\n";
  o << "n_mics = " << cfg.beamformer.n_mics << "\n";
  o << "filter_len = " << cfg.beamformer.filter_len << "\n";
  o << "delay = " << cfg.beamformer.delay << "\n";
  o << "p = " << fmt(cfg.beamformer.shape_p) << "\n";
  o << "t_gamma_ms = " << fmt(cfg.beamformer.t_gamma_s * 1000.0) << "\n";
  o << "# gamma = exp(-t_s / t_gamma) = " << fmt(cfg.beamformer.gamma()) << "\n";
  std::string betas;
  for (size_t i = 0; i < cfg.beamformer.betas_db.size(); ++i)
    betas += (i ? "," : "") + fmt(cfg.beamformer.betas_db[i]);
  o << "beta_db = " << betas << "\n";
  o << "ref_left = " << cfg.beamformer.ref_left << "\n";
  o << "ref_right = " << cfg.beamformer.ref_right << "\n";
  o << "init_reg_rel = " << fmt(cfg.beamformer.init_reg_rel) << "\n";
  o << "init_reg_abs = " << fmt(cfg.beamformer.init_reg_abs) << "\n";
  o << "n_irls_iters = " << cfg.beamformer.n_irls_iters << "\n";
  o << "\n[wpe]\n";
  o << "filter_len = " << cfg.wpe.filter_len << "\n";
  o << "delay = " << cfg.wpe.delay << "\n";
  o << "gamma = " << fmt(cfg.wpe.gamma) << "\n";
  o << "p = " << fmt(cfg.wpe.shape_p) << "\n";
  o << "init_reg = " << fmt(cfg.wpe.init_reg) << "\n";
  o << "\n[rtf]\n";
  o << "gamma_cov = " << fmt(cfg.rtf.gamma_cov) << "\n";
  o << "reg_eps = " << fmt(cfg.rtf.reg_eps) << "\n";
  o << "accept_margin = " << fmt(cfg.rtf.accept_margin) << "\n";
  o << "\n[run]\n";
  o << "mode = " << (cfg.mode == RunMode::adaptive ? "adaptive" : "non-adaptive") << "\n";
  if (!cfg.scenario.empty()) o << "scenario = " << cfg.scenario << "\n";
  o << "out_dir = " << cfg.out_dir << "\n";
  o << "seed = " << cfg.seed << "\n";
  o << "n_threads = " << cfg.n_threads << "\n";
  o << "\n[sweep]\n";
  std::string ts, ps;
  for (size_t i = 0; i < cfg.sweep_t_gamma_s.size(); ++i)
    ts += (i ? "," : "") + fmt(cfg.sweep_t_gamma_s[i] * 1000.0);
  for (size_t i = 0; i < cfg.sweep_p.size(); ++i) ps += (i ? "," : "") + fmt(cfg.sweep_p[i]);
  o << "t_gamma_ms = " << ts << "\n";
  o << "p = " << ps << "\n";
  return o.str();
}

}  // namespace wblcmp
