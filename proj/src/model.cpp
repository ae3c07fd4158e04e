#include "msamp/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "msamp/linalg.hpp"

namespace msamp {

Index SystemConfig::source_dim(Index u) const {
  const double n = alpha.at(static_cast<std::size_t>(u)) * static_cast<double>(L);
  return static_cast<Index>(std::llround(n));
}

void SystemConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (L < 1 || U < 1 || F < 1) fail("L, U and F must all be >= 1");
  if (T < 1) fail("T must be >= 1");
  if (mc_samples < 1) fail("mc_samples must be >= 1");
  if (!(noise_var >= 0.0)) fail("noise_var must be >= 0");
  const auto u_count = static_cast<std::size_t>(U);
  if (alpha.size() != u_count || lambda.size() != u_count || sigma.size() != u_count ||
      nu.size() != u_count)
    fail("alpha, lambda, sigma and nu must each have U entries");
  for (std::size_t u = 0; u < u_count; ++u) {
    const std::string tag = " (source " + std::to_string(u + 1) + ")";
    if (!(alpha[u] > 0.0)) fail("alpha must be positive" + tag);
    const double n = alpha[u] * static_cast<double>(L);
    if (std::abs(n - std::round(n)) > 1e-9 || std::round(n) < static_cast<double>(L))
      fail("alpha * L must be an integer >= L" + tag);
    if (!(lambda[u] > 0.0 && lambda[u] <= 1.0)) fail("lambda must lie in (0, 1]" + tag);
    if (!(nu[u] > 0.0)) fail("nu must be positive" + tag);
    const CMatrix& s = sigma[u];
    if (s.rows() != F || s.cols() != F) fail("sigma must be F x F" + tag);
    const double scale = std::max(1.0, s.norm());
    if ((s - s.adjoint()).norm() > 1e-12 * scale) fail("sigma must be Hermitian" + tag);
    if (min_hermitian_eigenvalue(s) < -1e-12 * scale) fail("sigma must be PSD" + tag);
    if (dict_kind == DictionaryKind::SignedFourier && !is_power_of_two(source_dim(static_cast<Index>(u))))
      fail("signed-Fourier dictionaries need N_u to be a power of two" + tag);
  }
}

BernoulliGaussianPrior::BernoulliGaussianPrior(double lambda, CMatrix sigma)
    : lambda_(lambda), sigma_(std::move(sigma)), sigma_root_(hermitian_sqrt(sigma_)) {
  if (!(lambda_ >= 0.0 && lambda_ <= 1.0))
    throw std::invalid_argument("BernoulliGaussianPrior: lambda must lie in [0, 1]");
}

CMatrix BernoulliGaussianPrior::sample_channels(Index n, RandomStream& rng) const {
  return rng.complex_normal_matrix(n, dim()) * sigma_root_;
}

CMatrix BernoulliGaussianPrior::sample(Index n, RandomStream& rng,
                                       std::vector<std::uint8_t>* activity) const {
  CMatrix out = CMatrix::Zero(n, dim());
  if (activity) activity->assign(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i) {
    const bool active = rng.bernoulli(lambda_);
    CRow z(dim());
    for (Index j = 0; j < dim(); ++j) z(j) = rng.complex_normal();
    if (active) {
      out.row(i) = z * sigma_root_;
      if (activity) (*activity)[static_cast<std::size_t>(i)] = 1;
    }
  }
  return out;
}

std::vector<CMatrix> wyner_covariances(Index B, Index M, double crosstalk,
                                       const std::optional<RMatrix>& gains) {
  if (B < 1 || M < 1) throw std::invalid_argument("wyner_covariances: B and M must be >= 1");
  if (!(crosstalk >= 0.0 && crosstalk <= 1.0))
    throw std::invalid_argument("wyner_covariances: crosstalk must lie in [0, 1]");
  RMatrix g;
  if (gains) {
    g = *gains;
    if (g.cols() != B) throw std::invalid_argument("wyner_covariances: gains must have B columns");
    if ((g.array() < 0.0).any())
      throw std::invalid_argument("wyner_covariances: gains must be nonnegative");
  } else {
    g = RMatrix::Constant(B, B, crosstalk);
    g.diagonal().setOnes();
  }
  std::vector<CMatrix> out;
  for (Index u = 0; u < g.rows(); ++u) {
    CMatrix s = CMatrix::Zero(B * M, B * M);
    for (Index b = 0; b < B; ++b)
      for (Index m = 0; m < M; ++m) s(b * M + m, b * M + m) = g(u, b);
    out.push_back(std::move(s));
  }
  return out;
}

RMatrix four_location_gains(double crosstalk) {
  RMatrix g(4, 2);
  g << 1.0, crosstalk, crosstalk, 1.0, 1.0, crosstalk, crosstalk, 1.0;
  return g;
}

SystemConfig two_location_config(Index L, double lambda1, double lambda2, double noise_var,
                                 double alpha) {
  SystemConfig c;
  c.L = L;
  c.U = 2;
  c.F = 4;
  c.alpha = {alpha, alpha};
  c.lambda = {lambda1, lambda2};
  c.sigma = wyner_covariances(2, 2, 0.5);
  c.noise_var = noise_var;
  c.T = 10;
  c.nu = {1.0, 1.0};
  return c;
}

SignalRealization sample_signals(const SystemConfig& config, RandomStream& rng) {
  config.validate();
  SignalRealization s;
  for (Index u = 0; u < config.U; ++u) {
    const auto su = static_cast<std::size_t>(u);
    RandomStream stream = rng.substream("signal", static_cast<std::uint64_t>(u));
    BernoulliGaussianPrior prior(config.lambda[su], config.sigma[su]);
    std::vector<std::uint8_t> act;
    s.X.push_back(prior.sample(config.source_dim(u), stream, &act));
    for (std::size_t n = 0; n < act.size(); ++n)
      if (act[n]) s.active_set.emplace_back(u, static_cast<Index>(n));
    s.activity.push_back(std::move(act));
  }
  return s;
}

CMatrix superpose(const std::vector<SemiUnitaryDictionary>& dictionaries,
                  const std::vector<CMatrix>& signals, const CMatrix& noise) {
  require_shape(dictionaries.size() == signals.size(), "superpose: one signal per dictionary");
  CMatrix y = noise;
  for (std::size_t u = 0; u < dictionaries.size(); ++u) {
    require_shape(dictionaries[u].rows() == noise.rows() && signals[u].cols() == noise.cols(),
                  "superpose: dictionary/signal shape does not match the noise");
    y += dictionaries[u].apply(signals[u]);
  }
  return y;
}

Observation synthesize_observation(const SystemConfig& config,
                                   const std::vector<SemiUnitaryDictionary>& dictionaries,
                                   const SignalRealization& signals, RandomStream& rng) {
  require_shape(static_cast<Index>(dictionaries.size()) == config.U &&
                    static_cast<Index>(signals.X.size()) == config.U,
                "synthesize_observation: need one dictionary and signal per source");
  for (Index u = 0; u < config.U; ++u) {
    const auto su = static_cast<std::size_t>(u);
    require_shape(dictionaries[su].rows() == config.L &&
                      dictionaries[su].cols() == signals.X[su].rows() &&
                      signals.X[su].cols() == config.F,
                  "synthesize_observation: source " + std::to_string(u + 1) + " shape mismatch");
  }
  Observation obs;
  obs.noise = std::sqrt(config.noise_var) * rng.complex_normal_matrix(config.L, config.F);
  obs.Y = superpose(dictionaries, signals.X, obs.noise);
  return obs;
}

std::vector<SemiUnitaryDictionary> build_dictionaries(const SystemConfig& config,
                                                      RandomStream& rng) {
  std::vector<SemiUnitaryDictionary> out;
  for (Index u = 0; u < config.U; ++u) {
    RandomStream stream = rng.substream("dictionary", static_cast<std::uint64_t>(u));
    out.push_back(build_dictionary(config.dict_kind, config.L, config.source_dim(u), stream));
  }
  return out;
}

}  // namespace msamp
