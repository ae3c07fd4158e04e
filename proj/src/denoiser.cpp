#include "msamp/denoiser.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "msamp/linalg.hpp"

namespace msamp {

namespace {

// Row batch size for Monte-Carlo loops.
constexpr Index kBatch = 4096;

RVector sigmoid_neg(const RVector& z) {
  // 1 / (1 + e^z), written to stay finite for large |z|.
  RVector out(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    const double v = z(i);
    if (v >= 0.0) {
      const double e = std::exp(-v);
      out(i) = e / (1.0 + e);
    } else {
      out(i) = 1.0 / (1.0 + std::exp(v));
    }
  }
  return out;
}

}  // namespace

PosteriorMeanDenoiser::PosteriorMeanDenoiser(double lambda, CMatrix sigma, CMatrix noise_cov)
    : lambda_(lambda), sigma_(std::move(sigma)), noise_cov_(hermitize(noise_cov)) {
  require_shape(sigma_.rows() == sigma_.cols() && noise_cov_.rows() == sigma_.rows() &&
                    noise_cov_.cols() == sigma_.rows(),
                "PosteriorMeanDenoiser: Sigma and C must be F x F");
  if (!(lambda_ >= 0.0 && lambda_ <= 1.0))
    throw std::invalid_argument("PosteriorMeanDenoiser: lambda must lie in [0, 1]");
  Eigen::LLT<CMatrix> c_llt(noise_cov_);
  if (c_llt.info() != Eigen::Success || min_hermitian_eigenvalue(noise_cov_) <= 0.0)
    throw NumericalError("PosteriorMeanDenoiser: effective noise covariance C is singular:\n" +
                         to_string(noise_cov_));
  const CMatrix total = hermitize(sigma_ + noise_cov_);
  Eigen::LLT<CMatrix> t_llt(total);
  if (t_llt.info() != Eigen::Success)
    throw NumericalError("PosteriorMeanDenoiser: Sigma + C is singular:\n" + to_string(total));
  const CMatrix eye = CMatrix::Identity(dim(), dim());
  const CMatrix c_inv = c_llt.solve(eye);
  const CMatrix t_inv = t_llt.solve(eye);
  gain_ = t_inv * sigma_;
  quad_ = hermitize(c_inv - t_inv);
  log_det_ratio_ = log_det_hpd(total) - log_det_hpd(noise_cov_);
  if (lambda_ == 0.0)
    log_odds_ = std::numeric_limits<double>::infinity();
  else if (lambda_ == 1.0)
    log_odds_ = -std::numeric_limits<double>::infinity();
  else
    log_odds_ = std::log((1.0 - lambda_) / lambda_);
}

double PosteriorMeanDenoiser::log_likelihood_ratio(const CRow& r) const {
  require_shape(r.size() == dim(), "likelihood_ratio: row length must be F");
  return log_det_ratio_ - (r * quad_ * r.adjoint())(0, 0).real();
}

double PosteriorMeanDenoiser::likelihood_ratio(const CRow& r) const {
  return std::exp(log_likelihood_ratio(r));
}

RVector PosteriorMeanDenoiser::log_likelihood_ratio_rows(const CMatrix& rows) const {
  require_shape(rows.cols() == dim(), "likelihood_ratio: rows must have F columns");
  const CMatrix ra = rows * quad_;
  RVector q = ra.cwiseProduct(rows.conjugate()).rowwise().sum().real();
  return RVector::Constant(rows.rows(), log_det_ratio_) - q;
}

CRow PosteriorMeanDenoiser::eta(const CRow& r) const {
  CMatrix m = r;
  return eta_rows(m).row(0);
}

CMatrix PosteriorMeanDenoiser::eta_rows(const CMatrix& rows) const {
  const RVector log_lr = log_likelihood_ratio_rows(rows);
  const RVector weight = sigmoid_neg(log_lr.array() + log_odds_);
  return weight.asDiagonal() * (rows * gain_);
}

CMatrix PosteriorMeanDenoiser::jacobian(const CRow& r) const {
  const double w = sigmoid_neg(RVector::Constant(1, log_likelihood_ratio(r) + log_odds_))(0);
  const CVector a_r = quad_ * r.adjoint();
  const CRow r_gain = r * gain_;
  return w * gain_ + (w * (1.0 - w)) * (a_r * r_gain);
}

CMatrix PosteriorMeanDenoiser::jacobian_fd(const CRow& r, double step) const {
  const Index f = dim();
  // Rows: +h e_i, -h e_i, +ih e_i, -ih e_i for each i.
  CMatrix probes(4 * f, f);
  for (Index i = 0; i < f; ++i) {
    for (int k = 0; k < 4; ++k) probes.row(4 * i + k) = r;
    probes(4 * i + 0, i) += step;
    probes(4 * i + 1, i) -= step;
    probes(4 * i + 2, i) += Complex(0.0, step);
    probes(4 * i + 3, i) -= Complex(0.0, step);
  }
  const CMatrix e = eta_rows(probes);
  CMatrix jac(f, f);
  for (Index i = 0; i < f; ++i) {
    const CRow dx = (e.row(4 * i + 0) - e.row(4 * i + 1)) / (2.0 * step);
    const CRow dy = (e.row(4 * i + 2) - e.row(4 * i + 3)) / (2.0 * step);
    jac.row(i) = 0.5 * (dx - Complex(0.0, 1.0) * dy);
  }
  return jac;
}

double PosteriorMeanDenoiser::default_fd_step() const {
  return 1e-4 * std::sqrt(noise_cov_.trace().real()) / static_cast<double>(dim());
}

PriorNoiseDraw draw_prior_plus_noise(const PosteriorMeanDenoiser& eta, Index n, RandomStream& rng) {
  BernoulliGaussianPrior prior(eta.lambda(), eta.sigma());
  PriorNoiseDraw d;
  d.x = prior.sample(n, rng);
  d.r = d.x + rng.complex_normal_matrix(n, eta.dim()) * hermitian_sqrt(eta.noise_cov());
  return d;
}

namespace {

// Jacobians of eta for a batch of rows, by the requested method.
void add_jacobians(const PosteriorMeanDenoiser& eta, const CMatrix& rows, JacobianMethod method,
                   const CMatrix* post_q, const CMatrix* post_m, McMatrixAccumulator& acc) {
  const Index f = eta.dim();
  const double h = eta.default_fd_step();
  if (method == JacobianMethod::Analytic) {
    for (Index k = 0; k < rows.rows(); ++k) {
      CMatrix j = eta.jacobian(rows.row(k));
      if (post_q) j = (j - *post_q) * (*post_m);
      acc.add(j);
    }
    return;
  }
  // Finite differences over the whole batch: 4F shifted copies.
  std::vector<CMatrix> shifted;
  shifted.reserve(static_cast<std::size_t>(4 * f));
  for (Index i = 0; i < f; ++i) {
    for (int k = 0; k < 4; ++k) {
      CMatrix p = rows;
      const Complex d = (k == 0) ? Complex(h, 0) : (k == 1) ? Complex(-h, 0)
                      : (k == 2) ? Complex(0, h) : Complex(0, -h);
      p.col(i).array() += d;
      shifted.push_back(eta.eta_rows(p));
    }
  }
  CMatrix j(f, f);
  for (Index k = 0; k < rows.rows(); ++k) {
    for (Index i = 0; i < f; ++i) {
      const auto base = static_cast<std::size_t>(4 * i);
      const CRow dx = (shifted[base].row(k) - shifted[base + 1].row(k)) / (2.0 * h);
      const CRow dy = (shifted[base + 2].row(k) - shifted[base + 3].row(k)) / (2.0 * h);
      j.row(i) = 0.5 * (dx - Complex(0.0, 1.0) * dy);
    }
    if (post_q)
      acc.add((j - *post_q) * (*post_m));
    else
      acc.add(j);
  }
}

}  // namespace

McMatrixEstimate jacobian_expectation_Q(const PosteriorMeanDenoiser& eta, Index mc_samples,
                                        RandomStream& rng, JacobianMethod method) {
  if (mc_samples < 1) throw std::invalid_argument("jacobian_expectation_Q: mc_samples must be >= 1");
  McMatrixAccumulator acc(eta.dim(), eta.dim());
  for (Index done = 0; done < mc_samples; done += kBatch) {
    const Index n = std::min(kBatch, mc_samples - done);
    const PriorNoiseDraw d = draw_prior_plus_noise(eta, n, rng);
    add_jacobians(eta, d.r, method, nullptr, nullptr, acc);
  }
  return acc.finish();
}

DivergenceFreeDenoiser::DivergenceFreeDenoiser(PosteriorMeanDenoiser eta, CMatrix q)
    : eta_(std::move(eta)), q_(std::move(q)) {
  require_shape(q_.rows() == eta_.dim() && q_.cols() == eta_.dim(), "f: Q must be F x F");
  const CMatrix i_minus_q = CMatrix::Identity(eta_.dim(), eta_.dim()) - q_;
  try {
    correction_ = checked_inverse(i_minus_q, "f: I - Q");
  } catch (const NumericalError&) {
    throw NumericalError("f: I - Q is singular for Q =\n" + to_string(q_));
  }
}

CRow DivergenceFreeDenoiser::apply(const CRow& r) const {
  return (eta_.eta(r) - r * q_) * correction_;
}

CMatrix DivergenceFreeDenoiser::apply_rows(const CMatrix& rows) const {
  return (eta_.eta_rows(rows) - rows * q_) * correction_;
}

CMatrix DivergenceFreeDenoiser::jacobian(const CRow& r) const {
  return (eta_.jacobian(r) - q_) * correction_;
}

CRow f_divergence_free(const CRow& r, const PosteriorMeanDenoiser& eta, const CMatrix& q) {
  return DivergenceFreeDenoiser(eta, q).apply(r);
}

McMatrixEstimate divergence_expectation(const PosteriorMeanDenoiser& eta,
                                        const McMatrixEstimate& q_estimate, Index mc_samples,
                                        RandomStream& rng, JacobianMethod method) {
  const DivergenceFreeDenoiser f(eta, q_estimate.mean);
  McMatrixAccumulator acc(eta.dim(), eta.dim());
  for (Index done = 0; done < mc_samples; done += kBatch) {
    const Index n = std::min(kBatch, mc_samples - done);
    const PriorNoiseDraw d = draw_prior_plus_noise(eta, n, rng);
    add_jacobians(eta, d.r, method, &f.q(), &f.correction(), acc);
  }
  McMatrixEstimate out = acc.finish();
  if (q_estimate.samples > 0 && !q_estimate.row_cov.empty()) {
    const McMatrixEstimate q_part = q_estimate.right_multiply(f.correction());
    out.std_error = (out.std_error.array().square() + q_part.std_error.array().square()).sqrt();
  }
  return out;
}

}  // namespace msamp
