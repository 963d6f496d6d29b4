#include <doctest.h>

#include "oracles.hpp"
#include "wblcmp/linalg.hpp"
#include "wblcmp/rng.hpp"

using namespace wblcmp;

TEST_CASE("hpd_solve identity and scalar cases") {
  Rng rng(11);
  CMat b(3, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) b(i, j) = cplx(rng.gaussian(), rng.gaussian());

  CMat x = hpd_solve(CMat(CMat::Identity(3, 3)), b);
  CHECK((x - b).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-14));

  CMat a2 = 2.0 * CMat::Identity(3, 3);
  CMat x2 = hpd_solve(a2, CMat(CMat::Identity(3, 3)));
  CHECK((x2 - 0.5 * CMat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("hpd_solve residual on random HPD") {
  Rng rng(12);
  const CMat a = oracle::random_hpd(rng, 5);
  const CMat x = hpd_solve(a, CMat(CMat::Identity(5, 5)));
  const double resid = (a * x - CMat::Identity(5, 5)).norm();
  CHECK(resid < 1e-10);
}

TEST_CASE("hpd_solve recovers a known solution for conditioned systems") {
  Rng rng(13);
  for (int n : {4, 16, 64}) {
    const CMat a = oracle::random_hpd(rng, n);
    CMat x0(n, 3);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 3; ++j) x0(i, j) = cplx(rng.gaussian(), rng.gaussian());
    const CMat x = hpd_solve(a, CMat(a * x0));
    CHECK((x - x0).norm() / x0.norm() < 1e-9);
  }
}

TEST_CASE("hpd_solve errors") {
  CMat bad(2, 2);
  bad << cplx(1, 0), cplx(2, 0), cplx(0, 0), cplx(1, 0);
  CHECK_THROWS_AS(hpd_solve(bad, CMat(CMat::Identity(2, 2))), NotHermitian);

  CMat indef = CMat::Identity(2, 2);
  indef(1, 1) = -1.0;
  CHECK_THROWS_AS(hpd_solve(indef, CMat(CMat::Identity(2, 2))), NotPositiveDefinite);
}

TEST_CASE("rank_one_inverse_update no-update and single-axis cases") {
  Rng rng(14);
  const CMat ainv = oracle::random_hpd(rng, 4);
  const CVec x = oracle::random_cvec(rng, 4);

  // w = 0: pure forgetting
  const CMat r0 = rank_one_inverse_update(ainv, x, 0.0, 0.5);
  CHECK((r0 - ainv / 0.5).cwiseAbs().maxCoeff() < 1e-12);

  // gamma = 1, Ainv = I, x = e1, w = 1: inverse of I + e1 e1^H
  CVec e1 = CVec::Zero(3);
  e1(0) = 1.0;
  const CMat r1 = rank_one_inverse_update(CMat(CMat::Identity(3, 3)), e1, 1.0, 1.0);
  CMat expect = CMat::Identity(3, 3);
  expect(0, 0) = 0.5;
  CHECK((r1 - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("rank_one_inverse_update matches the direct inverse") {
  Rng rng(15);
  const CMat a = oracle::random_hpd(rng, 6);
  const CVec x = oracle::random_cvec(rng, 6);
  const double w = 0.7, gamma = 0.95;
  const CMat updated = rank_one_inverse_update(oracle::direct_inverse(a), x, w, gamma);
  const CMat direct = oracle::direct_inverse(CMat(gamma * a + w * (x * x.adjoint())));
  CHECK((updated - direct).norm() / direct.norm() < 1e-8);
}

TEST_CASE("recursive inverse tracks gamma-weighted sums up to dim 64") {
  Rng rng(16);
  for (int n : {8, 64}) {
    const double gamma = 0.97;
    CMat a = oracle::random_hpd(rng, n);
    CMat ainv = oracle::direct_inverse(a);
    for (int t = 0; t < 50; ++t) {
      const CVec x = oracle::random_cvec(rng, n);
      const double w = rng.uniform(0.2, 2.0);
      ainv = rank_one_inverse_update(ainv, x, w, gamma);
      a = gamma * a + w * (x * x.adjoint());
      a = hermitianized(a);
    }
    CHECK((ainv * a - CMat::Identity(n, n)).norm() / std::sqrt(double(n)) < 1e-8);
    // outputs declared Hermitian are exactly Hermitian
    CHECK(hermitian_deviation(ainv) == 0.0);
  }
}

TEST_CASE("rank_one_inverse_update degenerate denominator") {
  // gamma + w x^H Ainv x == 0 for Ainv = -I (not reachable through valid
  // updates, but the guard must fire)
  CMat ainv = -CMat::Identity(2, 2);
  CVec x = CVec::Zero(2);
  x(0) = 1.0;
  CHECK_THROWS_AS(rank_one_inverse_update(ainv, x, 1.0, 1.0), DegenerateDenominator);
}

TEST_CASE("gevd_principal diagonal and identical cases") {
  CMat a = CMat::Zero(2, 2);
  a(0, 0) = 3.0;
  a(1, 1) = 1.0;
  const EigPair p = gevd_principal(a, CMat(CMat::Identity(2, 2)));
  CHECK(p.value == doctest::Approx(3.0));
  CHECK(std::abs(p.vector(0)) == doctest::Approx(1.0));
  CHECK(std::abs(p.vector(1)) < 1e-12);
  CHECK(p.vector(0).real() > 0.0);  // phase convention
  CHECK(p.vector(0).imag() == doctest::Approx(0.0));

  Rng rng(17);
  const CMat b = oracle::random_hpd(rng, 4);
  CHECK(gevd_principal(b, b).value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("gevd_principal rank-one construction") {
  Rng rng(18);
  CVec u = oracle::random_cvec(rng, 5);
  u.normalize();
  const CMat a = hermitianized(u * u.adjoint() + 0.01 * CMat::Identity(5, 5));
  const EigPair p = gevd_principal(a, CMat(CMat::Identity(5, 5)));
  CHECK(p.value == doctest::Approx(1.01).epsilon(1e-9));
  const double cosang = std::abs(u.dot(p.vector));
  CHECK(std::acos(std::min(1.0, cosang)) < 1e-6);
}

TEST_CASE("gevd_principal residual property on random Hermitian pairs") {
  Rng rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform(0.0, 7.0));
    CMat g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = cplx(rng.gaussian(), rng.gaussian());
    const CMat a = hermitianized(g + CMat(g.adjoint()));  // Hermitian, indefinite
    const CMat b = oracle::random_hpd(rng, n);
    const EigPair p = gevd_principal(a, b);
    const double resid = (a * p.vector - p.value * (b * p.vector)).norm();
    CHECK(resid <= kGevdTol * a.norm() * p.vector.norm());
  }
}

TEST_CASE("gevd_principal rejects indefinite B") {
  CMat b = CMat::Identity(2, 2);
  b(1, 1) = -1.0;
  CHECK_THROWS_AS(gevd_principal(CMat(CMat::Identity(2, 2)), b), NotPositiveDefinite);
}

TEST_CASE("principal_eigvec diagonal and rank-one cases") {
  CMat a = CMat::Zero(3, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 5.0;
  a(2, 2) = 2.0;
  const CVec v = principal_eigvec(a);
  CHECK(std::abs(v(1)) == doctest::Approx(1.0));

  Rng rng(20);
  CVec u = oracle::random_cvec(rng, 4);
  u.normalize();
  const CVec w = principal_eigvec(hermitianized(u * u.adjoint()));
  CHECK(std::abs(u.dot(w)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("principal_eigvec agrees with the identity-B GEVD") {
  Rng rng(21);
  const CMat a = oracle::random_hpd(rng, 6);
  const CVec v1 = principal_eigvec(a);
  const CVec v2 = gevd_principal(a, CMat(CMat::Identity(6, 6))).vector;
  CHECK(std::abs(v1.dot(v2)) == doctest::Approx(1.0).epsilon(1e-9));
}
