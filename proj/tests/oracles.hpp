// oracles.hpp -- independent reference computations used only by tests.
// Nothing here may call into the implementation paths it checks.
#pragma once

#include <cmath>
#include <complex>
#include <deque>
#include <vector>

#include <Eigen/Dense>

#include "wblcmp/linalg.hpp"
#include "wblcmp/rng.hpp"

namespace oracle {

using wblcmp::CMat;
using wblcmp::CVec;
using wblcmp::cplx;

inline CVec random_cvec(wblcmp::Rng& rng, int n) {
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(rng.gaussian(), rng.gaussian());
  return v;
}

// random Hermitian positive-definite G G^H + I
inline CMat random_hpd(wblcmp::Rng& rng, int n) {
  CMat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = cplx(rng.gaussian(), rng.gaussian());
  CMat a = g * g.adjoint() + CMat::Identity(n, n);
  return 0.5 * (a + CMat(a.adjoint()));
}

// direct inverse through Eigen's pivoted LU, independent of the library's
// Cholesky machinery
inline CMat direct_inverse(const CMat& a) {
  Eigen::MatrixXcd m = a;
  return CMat(m.fullPivLu().inverse());
}

// naive O(N^2) one-sided DFT of a real frame
inline std::vector<cplx> naive_rdft(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<cplx> out(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) {
    cplx acc(0.0, 0.0);
    for (int i = 0; i < n; ++i) {
      const double ph = -2.0 * M_PI * k * i / n;
      acc += x[i] * cplx(std::cos(ph), std::sin(ph));
    }
    out[k] = acc;
  }
  return out;
}

// Schroeder backward-integration T60 fit over the [-5, -25] dB decay region
inline double schroeder_t60(const std::vector<double>& rir, double sample_rate) {
  const int n = static_cast<int>(rir.size());
  std::vector<double> edc(n);
  double acc = 0.0;
  for (int i = n - 1; i >= 0; --i) {
    acc += rir[i] * rir[i];
    edc[i] = acc;
  }
  const double total = edc[0];
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long cnt = 0;
  for (int i = 0; i < n; ++i) {
    if (edc[i] <= 0.0) break;
    const double db = 10.0 * std::log10(edc[i] / total);
    if (db > -5.0) continue;
    if (db < -25.0) break;
    const double t = i / sample_rate;
    sx += t;
    sy += db;
    sxx += t * t;
    sxy += t * db;
    ++cnt;
  }
  const double denom = cnt * sxx - sx * sx;
  if (cnt < 10 || std::abs(denom) < 1e-30) return -1.0;
  const double slope = (cnt * sxy - sx * sy) / denom;  // dB per second
  if (slope >= 0.0) return -1.0;
  return -60.0 / slope;
}

// Exponentially weighted MPDR beamformer: the degenerate wBLCMP reduction
// (L_h = tau, J = 1, beta = 1). Accumulates the weighted covariance
// directly and solves through pivoted LU each frame, so it shares no
// recursion with the library implementation.
struct MpdrOracle {
  Eigen::MatrixXcd r;
  CVec h;
  MpdrOracle(int m, double delta) : r(delta * Eigen::MatrixXcd::Identity(m, m)), h(m) {}
  cplx step(const CVec& y, const CVec& steer, double w, double gamma) {
    r = gamma * r + w * (Eigen::VectorXcd(y) * Eigen::VectorXcd(y).adjoint());
    const Eigen::VectorXcd rs = r.fullPivLu().solve(Eigen::VectorXcd(steer));
    h = CVec(rs) / Eigen::VectorXcd(steer).dot(rs).real();
    return h.dot(y);
  }
};

}  // namespace oracle
