#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "msamp/dictionary.hpp"
#include "msamp/rng.hpp"
#include "msamp/types.hpp"

namespace msamp {

/// All scenario parameters of the multi-source observation Y = N + sum_u S_u X_u.
struct SystemConfig {
  Index L = 256;                   // observation length
  Index U = 2;                     // number of sources / locations
  Index F = 4;                     // columns (receive antennas)
  std::vector<double> alpha;       // N_u / L, one per source
  std::vector<double> lambda;      // activity probabilities in (0, 1]; 1 gives Gaussian signals
  std::vector<CMatrix> sigma;      // F x F channel covariances, Hermitian PSD
  double noise_var = 0.1;          // sigma^2 >= 0 (noise covariance sigma^2 I_F)
  int T = 10;                      // AMP iterations
  std::vector<double> nu;          // decision thresholds
  DictionaryKind dict_kind = DictionaryKind::DenseHaar;
  std::uint64_t seed = 1;
  Index mc_samples = 100000;       // Monte-Carlo budget for expectations

  /// N_u = alpha_u L (validated to be integral).
  Index source_dim(Index u) const;
  /// Throws std::invalid_argument describing the first violated invariant.
  void validate() const;
};

/// Prior of one row of X_u: a * h with a ~ Bernoulli(lambda), h ~ CN(0, Sigma).
class BernoulliGaussianPrior {
 public:
  BernoulliGaussianPrior(double lambda, CMatrix sigma);

  double lambda() const { return lambda_; }
  const CMatrix& sigma() const { return sigma_; }
  Index dim() const { return sigma_.rows(); }

  /// n rows of CN(0, Sigma) (the channel alone, no activity).
  CMatrix sample_channels(Index n, RandomStream& rng) const;
  /// n rows of a * h; `activity`, when given, receives the Bernoulli draws.
  CMatrix sample(Index n, RandomStream& rng, std::vector<std::uint8_t>* activity = nullptr) const;

 private:
  double lambda_;
  CMatrix sigma_;
  CMatrix sigma_root_;
};

/// Wyner-model channel covariances Sigma_u = diag(g_u1..g_uB) (x) I_M.
///
/// `gains` is the U x B large-scale fading matrix. Without it, U = B and the
/// default is 1 on the diagonal and `crosstalk` elsewhere ([[1, p], [p, 1]]
/// for B = 2).
std::vector<CMatrix> wyner_covariances(Index B, Index M, double crosstalk,
                                       const std::optional<RMatrix>& gains = std::nullopt);

/// U x 2 gain matrix for the four-location extension: rows 1 and 3 equal
/// [1, p], rows 2 and 4 equal [p, 1].
RMatrix four_location_gains(double crosstalk);

/// The two-location toy scenario (U = B = M = 2, F = 4, crosstalk 1/2, nu = 1).
SystemConfig two_location_config(Index L, double lambda1, double lambda2, double noise_var,
                                 double alpha = 1.0);

struct SignalRealization {
  std::vector<CMatrix> X;                              // per-source N_u x F
  std::vector<std::vector<std::uint8_t>> activity;     // per-source a_u
  std::vector<std::pair<Index, Index>> active_set;     // (u, n) with a_{u,n} = 1

  std::size_t num_active() const { return active_set.size(); }
};

/// Draws each source from its own substream ("signal", u) of `rng`.
SignalRealization sample_signals(const SystemConfig& config, RandomStream& rng);

struct Observation {
  CMatrix Y;
  CMatrix noise;
};

/// Y = N + sum_u S_u X_u with N rows i.i.d. CN(0, sigma^2 I_F).
Observation synthesize_observation(const SystemConfig& config,
                                   const std::vector<SemiUnitaryDictionary>& dictionaries,
                                   const SignalRealization& signals, RandomStream& rng);

/// Observation from a given noise matrix (no randomness).
CMatrix superpose(const std::vector<SemiUnitaryDictionary>& dictionaries,
                  const std::vector<CMatrix>& signals, const CMatrix& noise);

/// One dictionary per source, each from substream ("dictionary", u) of `rng`.
std::vector<SemiUnitaryDictionary> build_dictionaries(const SystemConfig& config,
                                                      RandomStream& rng);

}  // namespace msamp
