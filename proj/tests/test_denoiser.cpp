#include <doctest.h>

#include <cmath>

#include "msamp/denoiser.hpp"
#include "msamp/linalg.hpp"
#include "msamp/reference.hpp"

using namespace msamp;

namespace {
CMatrix scalar(double v) { return CMatrix::Constant(1, 1, v); }
CRow row1(Complex v) {
  CRow r(1);
  r(0) = v;
  return r;
}
}  // namespace

TEST_CASE("likelihood ratio closed forms") {
  const PosteriorMeanDenoiser eta(0.1, scalar(1.0), scalar(0.2));
  CHECK(eta.likelihood_ratio(row1(0.0)) == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(eta.likelihood_ratio(row1(1.0)) == doctest::Approx(6.0 * std::exp(-25.0 / 6.0)).epsilon(1e-13));
  const auto q = reference::scalar_posterior_quadrature(1.0, 0.1, 1.0, 0.2);
  CHECK(std::abs(q.likelihood_ratio - 6.0 * std::exp(-25.0 / 6.0)) <= 1e-9);

  const PosteriorMeanDenoiser flat(0.3, CMatrix::Zero(2, 2), 0.5 * CMatrix::Identity(2, 2));
  RandomStream rng(2);
  for (int k = 0; k < 5; ++k) CHECK(flat.likelihood_ratio(rng.complex_normal_matrix(1, 2)) == doctest::Approx(1.0));
}

TEST_CASE("posterior mean vs quadrature at F = 1") {
  const PosteriorMeanDenoiser eta(0.1, scalar(1.0), scalar(0.2));
  const Complex r(0.5, 0.5);
  const auto q = reference::scalar_posterior_quadrature(r, 0.1, 1.0, 0.2);
  CHECK(std::abs(eta.eta(row1(r))(0) - q.mean) <= 1e-6);
  CHECK(eta.eta(row1(0.0)).norm() == 0.0);
}

TEST_CASE("lambda = 1 gives the linear MMSE estimator") {
  RandomStream rng(8);
  const CMatrix a = rng.complex_normal_matrix(3, 3);
  const CMatrix sigma = a * a.adjoint() + 0.1 * CMatrix::Identity(3, 3);
  const CMatrix c = 0.3 * CMatrix::Identity(3, 3);
  const PosteriorMeanDenoiser eta(1.0, sigma, c);
  const CMatrix w = (sigma + c).inverse() * sigma;
  const CRow r = rng.complex_normal_matrix(1, 3);
  CHECK((eta.eta(r) - r * w).norm() <= 1e-12);

  const McMatrixEstimate q = jacobian_expectation_Q(eta, 4000, rng);
  CHECK((q.mean - w).norm() <= 1e-6);
  const DivergenceFreeDenoiser f(eta, w);
  CHECK(f.apply(r).norm() <= 1e-12);
}

TEST_CASE("analytic and finite-difference Jacobians agree") {
  RandomStream rng(21);
  const CMatrix sigma = RVector{{1.0, 1.0, 0.5, 0.5}}.cast<Complex>().asDiagonal();
  const CMatrix c = 0.2 * CMatrix::Identity(4, 4) + 0.05 * sigma;
  const PosteriorMeanDenoiser eta(0.1, sigma, c);
  for (int k = 0; k < 10; ++k) {
    const CRow r = 0.6 * rng.complex_normal_matrix(1, 4);
    const CMatrix ja = eta.jacobian(r);
    const CMatrix jf = eta.jacobian_fd(r, eta.default_fd_step());
    CHECK((ja - jf).norm() <= 1e-7 * (1.0 + ja.norm()));
  }
}

TEST_CASE("Sigma = 0 gives Q = 0") {
  RandomStream rng(1);
  const PosteriorMeanDenoiser eta(0.2, CMatrix::Zero(2, 2), 0.3 * CMatrix::Identity(2, 2));
  const McMatrixEstimate q = jacobian_expectation_Q(eta, 2000, rng);
  CHECK(q.mean.norm() <= 1e-12);
  const DivergenceFreeDenoiser f(eta, CMatrix::Zero(2, 2));
  const CRow r = rng.complex_normal_matrix(1, 2);
  CHECK((f.apply(r) - eta.eta(r)).norm() == 0.0);
}

TEST_CASE("divergence-free correction and its identity") {
  RandomStream rng(31);
  const CMatrix sigma = CMatrix::Identity(2, 2);
  const CMatrix c = 0.2 * CMatrix::Identity(2, 2);
  const PosteriorMeanDenoiser eta(0.1, sigma, c);
  const McMatrixEstimate q = jacobian_expectation_Q(eta, 200000, rng, JacobianMethod::Analytic);
  const McMatrixEstimate div = divergence_expectation(eta, q, 200000, rng, JacobianMethod::Analytic);
  CHECK(div.mean.norm() <= 3.0 * div.frobenius_std_error());

  // (I - Q)^-1 = I + C^-1 C_psi at alpha = 1, C_psi = E[(x - f)^H (x - f)]
  const DivergenceFreeDenoiser f(eta, q.mean);
  RandomStream rng2(32);
  const PriorNoiseDraw d = draw_prior_plus_noise(eta, 200000, rng2);
  const CMatrix err = d.x - f.apply_rows(d.r);
  const CMatrix c_psi = err.adjoint() * err / static_cast<double>(err.rows());
  const CMatrix lhs = (CMatrix::Identity(2, 2) - q.mean).inverse();
  const CMatrix rhs = CMatrix::Identity(2, 2) + c.inverse() * c_psi;
  CHECK(relative_frobenius_error(rhs, lhs) <= 0.01);
}

TEST_CASE("singular I - Q is reported") {
  const PosteriorMeanDenoiser eta(0.1, CMatrix::Identity(2, 2), CMatrix::Identity(2, 2));
  CHECK_THROWS_AS(DivergenceFreeDenoiser(eta, CMatrix::Identity(2, 2)), NumericalError);
}
