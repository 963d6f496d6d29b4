// linalg.cpp

#include "wblcmp/linalg.hpp"

#include <cmath>
#include <string>

namespace wblcmp {

double hermitian_deviation(const CMat& a) {
  double dev = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      dev = std::max(dev, std::abs(a(i, j) - std::conj(a(j, i))));
  return dev;
}

void require_hermitian(const CMat& a, const char* what) {
  if (a.rows() != a.cols())
    throw NotHermitian(std::string(what) + ": matrix is not square");
  double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return;
  if (hermitian_deviation(a) > kHermitianTol * scale)
    throw NotHermitian(std::string(what) + ": matrix deviates from Hermitian");
}

CMat hermitianized(const CMat& a) {
  CMat h = 0.5 * (a + a.adjoint());
  // force exactly real diagonal; additions above already give h == h^H
  for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, i) = cplx(h(i, i).real(), 0.0);
  return h;
}

CMat cholesky_lower(const CMat& a) {
  const Eigen::Index n = a.rows();
  CMat l = CMat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (Eigen::Index k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0))
      throw NotPositiveDefinite("cholesky: pivot <= 0 at index " + std::to_string(j));
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      cplx s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return l;
}

namespace {

// L Y = B, L lower triangular
CMat solve_lower(const CMat& l, const CMat& b) {
  const Eigen::Index n = l.rows();
  CMat y = b;
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    for (Eigen::Index i = 0; i < n; ++i) {
      cplx s = y(i, c);
      for (Eigen::Index k = 0; k < i; ++k) s -= l(i, k) * y(k, c);
      y(i, c) = s / l(i, i);
    }
  }
  return y;
}

// L^H X = Y
CMat solve_lower_adjoint(const CMat& l, const CMat& y) {
  const Eigen::Index n = l.rows();
  CMat x = y;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      cplx s = x(i, c);
      for (Eigen::Index k = i + 1; k < n; ++k) s -= std::conj(l(k, i)) * x(k, c);
      x(i, c) = s / l(i, i);
    }
  }
  return x;
}

// rotate so the first entry above a relative floor is real nonnegative
CVec phase_fixed(CVec v) {
  const double floor = 1e-12 * v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v(i));
    if (m > floor) {
      v *= std::conj(v(i)) / m;
      break;
    }
  }
  return v;
}

}  // namespace

CMat hpd_solve(const CMat& a, const CMat& b) {
  if (a.rows() != a.cols()) throw NotHermitian("hpd_solve: A is not square");
  if (a.rows() != b.rows())
    throw LengthMismatch("hpd_solve: row count of B does not match A");
  require_hermitian(a, "hpd_solve");
  const CMat l = cholesky_lower(a);
  return solve_lower_adjoint(l, solve_lower(l, b));
}

CVec hpd_solve(const CMat& a, const CVec& b) {
  CMat bm = b;
  return hpd_solve(a, bm).col(0);
}

CMat rank_one_inverse_update(const CMat& ainv, const CVec& x, double w, double gamma) {
  if (ainv.rows() != x.size())
    throw LengthMismatch("rank_one_inverse_update: dimension mismatch");
  const CVec ax = ainv * x;
  const cplx quad = x.dot(ax);  // x^H Ainv x, real up to rounding
  const cplx denom_c = gamma + w * quad;
  if (std::abs(denom_c) < kDenomFloor)
    throw DegenerateDenominator("rank_one_inverse_update: denominator magnitude below floor");
  const double denom = gamma + w * quad.real();
  CMat r = ainv;
  if (w != 0.0) r.noalias() -= (w / denom) * (ax * ax.adjoint());
  r *= 1.0 / gamma;
  return hermitianized(r);
}

EigPair gevd_principal(const CMat& a, const CMat& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw NotHermitian("gevd_principal: size mismatch");
  require_hermitian(a, "gevd_principal A");
  require_hermitian(b, "gevd_principal B");
  const CMat l = cholesky_lower(b);
  // W = L^{-1} A L^{-H}
  const CMat y = solve_lower(l, a);
  const CMat w = hermitianized(solve_lower(l, y.adjoint()).adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(w);
  if (es.info() != Eigen::Success)
    throw Error("gevd_principal: eigendecomposition failed");
  const Eigen::Index last = w.rows() - 1;
  EigPair out;
  out.value = es.eigenvalues()(last);
  CVec u = es.eigenvectors().col(last);
  CVec v = solve_lower_adjoint(l, CMat(u)).col(0);
  v.normalize();
  out.vector = phase_fixed(std::move(v));
  return out;
}

CVec principal_eigvec(const CMat& a) {
  require_hermitian(a, "principal_eigvec");
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitianized(a));
  if (es.info() != Eigen::Success)
    throw Error("principal_eigvec: eigendecomposition failed");
  CVec v = es.eigenvectors().col(a.rows() - 1);
  v.normalize();
  return phase_fixed(std::move(v));
}

}  // namespace wblcmp
