// linalg.hpp -- small dense complex-matrix kernels used per frequency bin.
//
// Everything here operates on matrices no larger than the stacked filter
// dimension (<= 64), so all factorizations are direct.
#pragma once

#include <complex>

#include <Eigen/Dense>

#include "wblcmp/errors.hpp"

namespace wblcmp {

using cplx = std::complex<double>;
using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVec = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

inline constexpr double kHermitianTol = 1e-6;
inline constexpr double kSolveTol = 1e-9;
inline constexpr double kGevdTol = 1e-8;
inline constexpr double kDenomFloor = 1e-30;

// max |A(i,j) - conj(A(j,i))|
double hermitian_deviation(const CMat& a);

// Throws NotHermitian if the deviation exceeds kHermitianTol * max|A|.
void require_hermitian(const CMat& a, const char* what);

// (A + A^H)/2, exact Hermitian output.
CMat hermitianized(const CMat& a);

// Lower Cholesky factor of a Hermitian positive-definite matrix.
// Throws NotPositiveDefinite on a pivot <= 0.
CMat cholesky_lower(const CMat& a);

// Solves A X = B for Hermitian positive-definite A via Cholesky.
CMat hpd_solve(const CMat& a, const CMat& b);
CVec hpd_solve(const CMat& a, const CVec& b);

// Inverse of gamma*A + w*x*x^H given Ainv, via the Woodbury identity:
//   (1/gamma) * (Ainv - w*Ainv*x*x^H*Ainv / (gamma + w*x^H*Ainv*x)).
// Output is re-hermitianized; floating-point drift would otherwise
// accumulate over thousands of recursive updates.
CMat rank_one_inverse_update(const CMat& ainv, const CVec& x, double w, double gamma);

struct EigPair {
  double value = 0.0;
  CVec vector;
};

// Largest generalized eigenpair of A v = lambda B v for Hermitian A and
// Hermitian positive-definite B. Cholesky whitening, then a standard
// Hermitian eigendecomposition, then back-transform. The eigenvector is
// unit-norm with its first nonzero entry rotated to be real nonnegative.
EigPair gevd_principal(const CMat& a, const CMat& b);

// Unit-norm eigenvector of the largest eigenvalue of Hermitian PSD A,
// same phase convention as gevd_principal.
CVec principal_eigvec(const CMat& a);

}  // namespace wblcmp
