#include "msamp/state_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "msamp/linalg.hpp"

namespace msamp {

BlockCholeskyFactor::BlockCholeskyFactor(Index block, double psd_tol)
    : block_(block), psd_tol_(psd_tol) {
  if (block < 1) throw std::invalid_argument("BlockCholeskyFactor: block size must be >= 1");
}

void BlockCholeskyFactor::extend(const std::vector<CMatrix>& row) {
  const int t = blocks() + 1;
  require_shape(static_cast<int>(row.size()) == t, "block_cholesky: row must hold t blocks");
  for (const CMatrix& b : row)
    require_shape(b.rows() == block_ && b.cols() == block_, "block_cholesky: blocks must be F x F");

  std::vector<CMatrix> out(static_cast<std::size_t>(t));
  for (int s = 1; s < t; ++s) {
    CMatrix w = row[static_cast<std::size_t>(s - 1)];
    for (int k = 1; k < s; ++k) w -= out[k - 1].adjoint() * at(s, k);
    out[s - 1] = (w * diag_pinv_[s - 1]).adjoint();
  }

  CMatrix pivot = row[static_cast<std::size_t>(t - 1)];
  for (int k = 1; k < t; ++k) pivot -= out[k - 1].adjoint() * out[k - 1];
  pivot = hermitize(pivot);
  const double scale = std::max(row[static_cast<std::size_t>(t - 1)].trace().real(), 0.0);
  const double tol = psd_tol_ * std::max(scale, 1e-300);

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(pivot);
  const RVector e = eig.eigenvalues();
  if (e.minCoeff() < -tol) {
    std::ostringstream msg;
    msg << "block_cholesky: pivot " << t << " is indefinite (min eigenvalue " << e.minCoeff()
        << ", tolerance " << tol << "):\n"
        << to_string(pivot);
    throw NumericalError(msg.str());
  }
  CMatrix b_tt;
  CMatrix pinv;
  Eigen::LLT<CMatrix> llt(pivot);
  if (e.minCoeff() > tol && llt.info() == Eigen::Success) {
    b_tt = llt.matrixU();
    pinv = b_tt.triangularView<Eigen::Upper>().solve(CMatrix::Identity(block_, block_));
  } else {
    RVector root = RVector::Zero(block_);
    RVector inv_root = RVector::Zero(block_);
    for (Index i = 0; i < block_; ++i) {
      if (e(i) > tol) {
        root(i) = std::sqrt(e(i));
        inv_root(i) = 1.0 / root(i);
      }
    }
    b_tt = root.asDiagonal() * eig.eigenvectors().adjoint();
    pinv = eig.eigenvectors() * inv_root.asDiagonal();
  }
  out[static_cast<std::size_t>(t - 1)] = b_tt;
  rows_.push_back(std::move(out));
  diag_.push_back(std::move(b_tt));
  diag_pinv_.push_back(std::move(pinv));
}

const CMatrix& BlockCholeskyFactor::at(int t, int s) const {
  if (t < 1 || s < 1 || s > t || t > blocks())
    throw std::out_of_range("BlockCholeskyFactor: block index out of range");
  return rows_[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(s - 1)];
}

CMatrix BlockCholeskyFactor::lower_block_matrix() const {
  const Index n = block_ * blocks();
  CMatrix m = CMatrix::Zero(n, n);
  for (int t = 1; t <= blocks(); ++t)
    for (int s = 1; s <= t; ++s) m.block((t - 1) * block_, (s - 1) * block_, block_, block_) = at(t, s);
  return m;
}

CMatrix BlockCholeskyFactor::upper_block_matrix() const {
  const Index n = block_ * blocks();
  CMatrix m = CMatrix::Zero(n, n);
  for (int t = 1; t <= blocks(); ++t)
    for (int s = 1; s <= t; ++s) m.block((s - 1) * block_, (t - 1) * block_, block_, block_) = at(t, s);
  return m;
}

BlockCholeskyFactor block_cholesky(const CMatrix& a, Index block, double psd_tol) {
  require_shape(block >= 1 && a.rows() == a.cols() && a.rows() % block == 0,
                "block_cholesky: matrix must be square with a whole number of blocks");
  BlockCholeskyFactor factor(block, psd_tol);
  const int t_max = static_cast<int>(a.rows() / block);
  for (int t = 1; t <= t_max; ++t) {
    std::vector<CMatrix> row;
    for (int s = 1; s <= t; ++s) row.push_back(a.block((t - 1) * block, (s - 1) * block, block, block));
    factor.extend(row);
  }
  return factor;
}

std::vector<CMatrix> sample_gp_trajectory(const BlockCholeskyFactor& factor, Index n, RandomStream& rng) {
  const Index f = factor.block();
  std::vector<CMatrix> z;
  std::vector<CMatrix> phi;
  for (int t = 1; t <= factor.blocks(); ++t) {
    z.push_back(rng.complex_normal_matrix(n, f));
    CMatrix p = CMatrix::Zero(n, f);
    for (int s = 1; s <= t; ++s) p.noalias() += z[s - 1] * factor.at(t, s);
    phi.push_back(std::move(p));
  }
  return phi;
}

std::vector<CMatrix> sample_gp_trajectory(const CMatrix& a, Index block, Index n, RandomStream& rng) {
  return sample_gp_trajectory(block_cholesky(a, block), n, rng);
}

TwoTimeCovariance::TwoTimeCovariance(Index sources, int iterations, Index dim)
    : sources_(sources), iterations_(iterations), dim_(dim) {
  if (sources < 1 || iterations < 1 || dim < 1)
    throw std::invalid_argument("TwoTimeCovariance: dimensions must be >= 1");
  const std::size_t tri = static_cast<std::size_t>(iterations) * (iterations + 1) / 2;
  psi_.assign(static_cast<std::size_t>(sources) * tri, CMatrix::Zero(dim, dim));
  phi_ = psi_;
  McMatrixEstimate zero;
  zero.mean = CMatrix::Zero(dim, dim);
  zero.std_error = RMatrix::Zero(dim, dim);
  q_.assign(static_cast<std::size_t>(sources * iterations), zero);
}

std::size_t TwoTimeCovariance::slot(Index u, int t, int s) const {
  if (u < 0 || u >= sources_ || t < 1 || s < 1 || t > iterations_ || s > t)
    throw std::out_of_range("TwoTimeCovariance: index out of range");
  const std::size_t tri = static_cast<std::size_t>(iterations_) * (iterations_ + 1) / 2;
  return static_cast<std::size_t>(u) * tri + static_cast<std::size_t>(t) * (t - 1) / 2 +
         static_cast<std::size_t>(s - 1);
}

CMatrix TwoTimeCovariance::psi(Index u, int t, int s) const {
  return s <= t ? psi_[slot(u, t, s)] : CMatrix(psi_[slot(u, s, t)].adjoint());
}

CMatrix TwoTimeCovariance::phi(Index u, int t, int s) const {
  return s <= t ? phi_[slot(u, t, s)] : CMatrix(phi_[slot(u, s, t)].adjoint());
}

void TwoTimeCovariance::set_psi(Index u, int t, int s, const CMatrix& m) {
  if (s <= t) psi_[slot(u, t, s)] = m;
  else psi_[slot(u, s, t)] = m.adjoint();
}

void TwoTimeCovariance::set_phi(Index u, int t, int s, const CMatrix& m) {
  if (s <= t) phi_[slot(u, t, s)] = m;
  else phi_[slot(u, s, t)] = m.adjoint();
}

const CMatrix& TwoTimeCovariance::q(Index u, int t) const { return q_estimate(u, t).mean; }

const McMatrixEstimate& TwoTimeCovariance::q_estimate(Index u, int t) const {
  if (u < 0 || u >= sources_ || t < 1 || t > iterations_)
    throw std::out_of_range("TwoTimeCovariance: Q index out of range");
  return q_[static_cast<std::size_t>(u * iterations_ + t - 1)];
}

void TwoTimeCovariance::set_q(Index u, int t, McMatrixEstimate estimate) {
  if (u < 0 || u >= sources_ || t < 1 || t > iterations_)
    throw std::out_of_range("TwoTimeCovariance: Q index out of range");
  q_[static_cast<std::size_t>(u * iterations_ + t - 1)] = std::move(estimate);
}

namespace {

CMatrix assemble(Index f, int t_max, const auto& get) {
  CMatrix m(f * t_max, f * t_max);
  for (int t = 1; t <= t_max; ++t)
    for (int s = 1; s <= t_max; ++s) m.block((t - 1) * f, (s - 1) * f, f, f) = get(t, s);
  return m;
}

// Moore-Penrose inverse square root of a Hermitian PSD matrix.
CMatrix pinv_sqrt(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitize(a));
  const RVector e = eig.eigenvalues();
  const double tol = 1e-12 * std::max(e.maxCoeff(), 0.0);
  RVector d = RVector::Zero(e.size());
  for (Index i = 0; i < e.size(); ++i)
    if (e(i) > tol) d(i) = 1.0 / std::sqrt(e(i));
  return eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace

CMatrix TwoTimeCovariance::assembled_psi(Index u, int t_max) const {
  return assemble(dim_, t_max, [&](int t, int s) { return psi(u, t, s); });
}

CMatrix TwoTimeCovariance::assembled_phi(Index u, int t_max) const {
  return assemble(dim_, t_max, [&](int t, int s) { return phi(u, t, s); });
}

CMatrix phi_from_psi(const SystemConfig& config, const std::vector<CMatrix>& psi_ts, Index u) {
  const Index f = config.F;
  const double a = config.alpha[static_cast<std::size_t>(u)];
  CMatrix c = config.noise_var * CMatrix::Identity(f, f) + ((a - 1.0) / a) * psi_ts[static_cast<std::size_t>(u)];
  for (Index v = 0; v < config.U; ++v)
    if (v != u) c += psi_ts[static_cast<std::size_t>(v)];
  return c;
}

TwoTimeCovariance run_state_evolution(const SystemConfig& config, const SeOptions& options) {
  config.validate();
  const Index n = options.mc_samples.value_or(config.mc_samples);
  if (n < 2) throw std::invalid_argument("run_state_evolution: mc_samples must be >= 2");
  const Index U = config.U;
  const Index F = config.F;
  const int T = config.T;
  const RandomStream root = RandomStream(options.seed.value_or(config.seed)).substream("se");

  TwoTimeCovariance se(U, T, F);
  std::vector<CMatrix> x(static_cast<std::size_t>(U));
  std::vector<std::vector<CMatrix>> err(static_cast<std::size_t>(U));   // x - f^(t)
  std::vector<std::vector<CMatrix>> path(static_cast<std::size_t>(U));  // z^(t)
  std::vector<BlockCholeskyFactor> factor;

  for (Index u = 0; u < U; ++u) {
    const auto su = static_cast<std::size_t>(u);
    RandomStream rx = root.substream("se.x", static_cast<std::uint64_t>(u));
    x[su] = BernoulliGaussianPrior(config.lambda[su], config.sigma[su]).sample(n, rx);
    if (options.moment_match) {
      const CMatrix second = x[su].adjoint() * x[su] / static_cast<double>(n);
      x[su] = x[su] * (pinv_sqrt(second) * hermitian_sqrt(config.lambda[su] * config.sigma[su]));
    }
    err[su].push_back(x[su]);
    factor.emplace_back(F, options.psd_tol);
  }

  for (int t = 1; t <= T; ++t) {
    for (int s = 1; s <= t; ++s) {
      std::vector<CMatrix> psi_ts(static_cast<std::size_t>(U));
      for (Index u = 0; u < U; ++u) {
        const auto su = static_cast<std::size_t>(u);
        CMatrix c = config.alpha[su] / static_cast<double>(n) * (err[su][t - 1].adjoint() * err[su][s - 1]);
        if (s == t) c = hermitize(c);
        psi_ts[su] = c;
        se.set_psi(u, t, s, c);
      }
      for (Index u = 0; u < U; ++u) {
        CMatrix c = phi_from_psi(config, psi_ts, u);
        if (s == t) c = hermitize(c);
        se.set_phi(u, t, s, c);
      }
    }
    if (t == T) break;

    for (Index u = 0; u < U; ++u) {
      const auto su = static_cast<std::size_t>(u);
      std::vector<CMatrix> row;
      for (int s = 1; s <= t; ++s) row.push_back(se.phi(u, t, s));
      try {
        factor[su].extend(row);
      } catch (const NumericalError& e) {
        std::ostringstream msg;
        msg << "run_state_evolution: C_phi of source " << u << " is not PSD at t = " << t
            << " (increase mc_samples?): " << e.what();
        throw NumericalError(msg.str());
      }
      RandomStream rz = root.substream("se.path", static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(t));
      path[su].push_back(rz.complex_normal_matrix(n, F));
      CMatrix phi = CMatrix::Zero(n, F);
      for (int s = 1; s <= t; ++s) phi.noalias() += path[su][s - 1] * factor[su].at(t, s);

      PosteriorMeanDenoiser eta(config.lambda[su], config.sigma[su], se.phi(u, t, t));
      RandomStream rq = root.substream("se.Q", static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(t));
      McMatrixEstimate q = jacobian_expectation_Q(eta, n, rq, options.jacobian);
      const DivergenceFreeDenoiser f(eta, q.mean);
      err[su].push_back(x[su] - f.apply_rows(x[su] + phi));
      se.set_q(u, t + 1, std::move(q));
    }
  }
  return se;
}

McMatrixEstimate posterior_mse(const PosteriorMeanDenoiser& eta, Index mc_samples, RandomStream& rng) {
  McMatrixAccumulator acc(eta.dim(), eta.dim());
  constexpr Index kBatch = 4096;
  for (Index done = 0; done < mc_samples; done += kBatch) {
    const Index m = std::min(kBatch, mc_samples - done);
    const PriorNoiseDraw d = draw_prior_plus_noise(eta, m, rng);
    const CMatrix e = d.x - eta.eta_rows(d.r);
    for (Index k = 0; k < m; ++k) acc.add(e.row(k).adjoint() * e.row(k));
  }
  return acc.finish();
}

void write_state_evolution_csv(std::ostream& os, const TwoTimeCovariance& se) {
  os << "u,t,s,i,j,psi_re,psi_im,phi_re,phi_im\n";
  os.precision(17);
  for (Index u = 0; u < se.sources(); ++u)
    for (int t = 1; t <= se.iterations(); ++t)
      for (int s = 1; s <= t; ++s) {
        const CMatrix psi = se.psi(u, t, s);
        const CMatrix phi = se.phi(u, t, s);
        for (Index i = 0; i < se.dim(); ++i)
          for (Index j = 0; j < se.dim(); ++j)
            os << u + 1 << ',' << t << ',' << s << ',' << i + 1 << ',' << j + 1 << ','
               << psi(i, j).real() << ',' << psi(i, j).imag() << ',' << phi(i, j).real() << ','
               << phi(i, j).imag() << '\n';
      }
}

}  // namespace msamp
