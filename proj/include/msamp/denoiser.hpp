#pragma once

#include "msamp/model.hpp"
#include "msamp/monte_carlo.hpp"
#include "msamp/rng.hpp"
#include "msamp/types.hpp"

namespace msamp {

/// Posterior-mean denoiser for r = x + phi, x ~ a h (a ~ Bernoulli(lambda),
/// h ~ CN(0, Sigma)), phi ~ CN(0, C). Rows are 1 x F.
///
///   Lambda(r; C) = det(Sigma + C) / det(C) * exp(-r (C^-1 - (Sigma + C)^-1) r^H)
///   eta(r)       = lambda r (Sigma + C)^-1 Sigma / (lambda + (1 - lambda) Lambda(r; C))
///
/// Everything is evaluated through log Lambda; determinants come from Cholesky.
class PosteriorMeanDenoiser {
 public:
  /// lambda in [0, 1]; C Hermitian positive definite (NumericalError otherwise).
  PosteriorMeanDenoiser(double lambda, CMatrix sigma, CMatrix noise_cov);

  double lambda() const { return lambda_; }
  const CMatrix& sigma() const { return sigma_; }
  const CMatrix& noise_cov() const { return noise_cov_; }
  Index dim() const { return sigma_.rows(); }
  /// (Sigma + C)^-1 Sigma, the Gaussian linear-MMSE gain.
  const CMatrix& linear_gain() const { return gain_; }

  double log_likelihood_ratio(const CRow& r) const;
  double likelihood_ratio(const CRow& r) const;
  /// log Lambda for every row of R.
  RVector log_likelihood_ratio_rows(const CMatrix& rows) const;

  CRow eta(const CRow& r) const;
  CMatrix eta_rows(const CMatrix& rows) const;

  /// Wirtinger Jacobian J_ij = d eta_j / d r_i in closed form.
  CMatrix jacobian(const CRow& r) const;
  /// Same by central differences on real and imaginary parts with step h:
  /// J_i. = (d/dx_i - i d/dy_i) eta / 2.
  CMatrix jacobian_fd(const CRow& r, double step) const;
  /// 1e-4 * sqrt(tr C) / F
  double default_fd_step() const;

 private:
  double lambda_;
  CMatrix sigma_;
  CMatrix noise_cov_;
  CMatrix gain_;
  CMatrix quad_;  // C^-1 - (Sigma + C)^-1
  double log_det_ratio_ = 0.0;
  double log_odds_ = 0.0;  // log((1 - lambda) / lambda)
};

enum class JacobianMethod { FiniteDifference, Analytic };

/// Monte-Carlo estimate of Q = E[eta'(x + phi)], x from the prior of `eta`,
/// phi ~ CN(0, C).
McMatrixEstimate jacobian_expectation_Q(const PosteriorMeanDenoiser& eta, Index mc_samples,
                                        RandomStream& rng,
                                        JacobianMethod method = JacobianMethod::FiniteDifference);

/// f(r) = (eta(r) - r Q)(I - Q)^-1. With Q = E[eta'] this has E[f'] = 0.
class DivergenceFreeDenoiser {
 public:
  /// Throws NumericalError quoting Q when I - Q is singular.
  DivergenceFreeDenoiser(PosteriorMeanDenoiser eta, CMatrix q);

  const PosteriorMeanDenoiser& eta() const { return eta_; }
  const CMatrix& q() const { return q_; }
  /// (I - Q)^-1
  const CMatrix& correction() const { return correction_; }

  CRow apply(const CRow& r) const;
  CMatrix apply_rows(const CMatrix& rows) const;
  /// (eta'(r) - Q)(I - Q)^-1
  CMatrix jacobian(const CRow& r) const;

 private:
  PosteriorMeanDenoiser eta_;
  CMatrix q_;
  CMatrix correction_;
};

CRow f_divergence_free(const CRow& r, const PosteriorMeanDenoiser& eta, const CMatrix& q);

/// Monte-Carlo estimate of E[f'(x + phi)] for f built from `eta` and `q`,
/// using fresh draws from `rng`. `q_estimate` (the estimate q came from, if
/// any) adds its own sampling error to the reported standard errors.
McMatrixEstimate divergence_expectation(const PosteriorMeanDenoiser& eta,
                                        const McMatrixEstimate& q_estimate, Index mc_samples,
                                        RandomStream& rng,
                                        JacobianMethod method = JacobianMethod::FiniteDifference);

/// r = x + phi draws used by the expectations above (x, then phi, row-wise).
struct PriorNoiseDraw {
  CMatrix x;
  CMatrix r;
};
PriorNoiseDraw draw_prior_plus_noise(const PosteriorMeanDenoiser& eta, Index n, RandomStream& rng);

}  // namespace msamp
