#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "msamp/denoiser.hpp"
#include "msamp/model.hpp"
#include "msamp/monte_carlo.hpp"
#include "msamp/rng.hpp"
#include "msamp/types.hpp"

namespace msamp {

/// Block factor of a Hermitian PSD matrix A made of F x F blocks A^(t,s).
///
/// Blocks B^(t,s), s <= t, satisfy
///   A^(t,s) = sum_{s' <= min(t,s)} B^(t,s')^H B^(s,s'),
/// so a Gaussian process with covariance A is phi^(t) = sum_{s<=t} z^(s) B^(t,s)
/// for i.i.d. CN(0, I) rows z^(s). Pivots that are positive definite use the
/// Cholesky factor (B^(t,t) = L^H, upper triangular). Rank-deficient pivots use
/// an eigendecomposition with eigenvalues below `psd_tol * trace` set to zero.
class BlockCholeskyFactor {
 public:
  BlockCholeskyFactor(Index block, double psd_tol = 1e-8);

  Index block() const { return block_; }
  int blocks() const { return static_cast<int>(diag_.size()); }

  /// Appends time t = blocks() + 1 given A^(t,1), ..., A^(t,t).
  /// Throws NumericalError when the new pivot is indefinite beyond tolerance.
  void extend(const std::vector<CMatrix>& row);

  /// B^(t,s), 1 <= s <= t <= blocks().
  const CMatrix& at(int t, int s) const;

  /// Full matrix with block (t,s) = B^(t,s) below the diagonal, zero above.
  CMatrix lower_block_matrix() const;
  /// Its block transpose U (block (s,t) = B^(t,s)); A = U^H U.
  CMatrix upper_block_matrix() const;

 private:
  Index block_;
  double psd_tol_;
  std::vector<std::vector<CMatrix>> rows_;  // rows_[t-1][s-1] = B^(t,s)
  std::vector<CMatrix> diag_pinv_;          // pseudo-inverse of B^(s,s)
  std::vector<CMatrix> diag_;
};

/// Factor of an assembled tF x tF matrix.
BlockCholeskyFactor block_cholesky(const CMatrix& a, Index block, double psd_tol = 1e-8);

/// n joint samples (phi^(1), ..., phi^(t)) with covariance `a`; entry k of the
/// result is the n x F matrix of phi^(k+1) rows.
std::vector<CMatrix> sample_gp_trajectory(const CMatrix& a, Index block, Index n, RandomStream& rng);
std::vector<CMatrix> sample_gp_trajectory(const BlockCholeskyFactor& factor, Index n,
                                          RandomStream& rng);

/// State-evolution covariances C_psi_u^(t,s), C_phi_u^(t,s) for 1 <= s <= t <= T
/// and the Jacobian expectations Q_u^(t) (Q_u^(1) = 0). All indices 1-based in t, s;
/// sources are 0-based.
class TwoTimeCovariance {
 public:
  TwoTimeCovariance() = default;
  TwoTimeCovariance(Index sources, int iterations, Index dim);

  Index sources() const { return sources_; }
  int iterations() const { return iterations_; }
  Index dim() const { return dim_; }

  /// Any order of (t, s); blocks with s > t are returned as the adjoint.
  CMatrix psi(Index u, int t, int s) const;
  CMatrix phi(Index u, int t, int s) const;
  void set_psi(Index u, int t, int s, const CMatrix& m);
  void set_phi(Index u, int t, int s, const CMatrix& m);

  const CMatrix& q(Index u, int t) const;
  const McMatrixEstimate& q_estimate(Index u, int t) const;
  void set_q(Index u, int t, McMatrixEstimate estimate);

  /// [C^(t,s)] for t, s = 1..t_max.
  CMatrix assembled_psi(Index u, int t_max) const;
  CMatrix assembled_phi(Index u, int t_max) const;

 private:
  std::size_t slot(Index u, int t, int s) const;

  Index sources_ = 0;
  int iterations_ = 0;
  Index dim_ = 0;
  std::vector<CMatrix> psi_;
  std::vector<CMatrix> phi_;
  std::vector<McMatrixEstimate> q_;
};

struct SeOptions {
  std::optional<Index> mc_samples;      // default: config.mc_samples
  std::optional<std::uint64_t> seed;    // default: config.seed
  JacobianMethod jacobian = JacobianMethod::FiniteDifference;
  /// Recolor the prior samples so that their second moment equals lambda Sigma
  /// exactly. Reduces the Monte-Carlo noise of every block.
  bool moment_match = true;
  double psd_tol = 1e-8;
};

/// Runs the two-time recursion with f_u^(1) = 0 and the divergence-free
/// posterior-mean denoisers. Expectations use common random numbers:
/// x from substream ("se.x", u), path noise z^(t) from ("se.path", u, t),
/// Q^(t+1) from ("se.Q", u, t) of the seed's ("se") stream. Truncating T
/// therefore gives a prefix of a longer run with the same seed.
TwoTimeCovariance run_state_evolution(const SystemConfig& config, const SeOptions& options = {});

/// C_phi_u^(t,s) = sigma^2 I + ((alpha_u - 1) / alpha_u) C_psi_u^(t,s) + sum_{u' != u} C_psi_u'^(t,s).
CMatrix phi_from_psi(const SystemConfig& config, const std::vector<CMatrix>& psi_ts, Index u);

/// Monte-Carlo estimate of E[(x - eta(x + phi))^H (x - eta(x + phi))].
McMatrixEstimate posterior_mse(const PosteriorMeanDenoiser& eta, Index mc_samples, RandomStream& rng);

/// One row per (u, t, s, i, j) with s <= t, all indices 1-based:
/// u,t,s,i,j,psi_re,psi_im,phi_re,phi_im
void write_state_evolution_csv(std::ostream& os, const TwoTimeCovariance& se);

}  // namespace msamp
