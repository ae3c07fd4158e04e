#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "msamp/denoiser.hpp"
#include "msamp/dictionary.hpp"
#include "msamp/model.hpp"
#include "msamp/monte_carlo.hpp"
#include "msamp/rng.hpp"
#include "msamp/state_evolution.hpp"

namespace msamp {

/// Per-source binary activity decisions.
using ActivityEstimate = std::vector<std::vector<std::uint8_t>>;

/// Active iff Lambda(r) <= nu (a tie counts as active).
bool declare_active(const PosteriorMeanDenoiser& eta, const CRow& r, double nu);

ActivityEstimate detect(const std::vector<CMatrix>& R, const std::vector<PosteriorMeanDenoiser>& eta,
                        const std::vector<double>& nu);

/// h_hat_{u,n} = eta_u(r_{u,n}).
std::vector<CMatrix> estimate_channels(const std::vector<CMatrix>& R,
                                       const std::vector<PosteriorMeanDenoiser>& eta);

/// Raw counts of one or more instances; they add across trials.
struct DetectionCounts {
  Index active = 0;        // |A|
  Index missed = 0;        // |A_hat^c and A|
  Index inactive = 0;      // |A^c|
  Index false_alarm = 0;   // |A_hat and A^c|
  double sq_error_detected = 0.0;   // sum over A^d of ||h - h_hat||^2
  double power_false_alarm = 0.0;   // sum over A^fa of ||h_hat||^2

  DetectionCounts& operator+=(const DetectionCounts& o);
};

DetectionCounts count_detection(const SignalRealization& truth, const ActivityEstimate& estimate,
                                const std::vector<CMatrix>& channel_estimates = {});

/// Empty denominators give std::nullopt.
struct EmpiricalRates {
  std::optional<double> md;
  std::optional<double> fa;
};
EmpiricalRates empirical_rates(const SignalRealization& truth, const ActivityEstimate& estimate);
EmpiricalRates empirical_rates(const DetectionCounts& counts);

struct EmpiricalMsePow {
  std::optional<double> mse_d;
  std::optional<double> pow_fa;
};
EmpiricalMsePow empirical_mse_pow(const SignalRealization& truth, const ActivityEstimate& estimate,
                                  const std::vector<CMatrix>& channel_estimates);
EmpiricalMsePow empirical_mse_pow(const DetectionCounts& counts);

/// Large-system metrics evaluated by Monte Carlo with h_u ~ CN(0, Sigma_u) and
/// phi_u ~ CN(0, C_u) independent. Probabilities and conditional means share
/// one stream per source: substream ("asymptotic", u) of `rng`.
struct AsymptoticMetrics {
  McScalar md;
  McScalar fa;
  std::optional<McScalar> mse_d;   // undefined when no detection event was sampled
  std::optional<McScalar> pow_fa;  // undefined when no false-alarm event was sampled
};

/// `eta[u]` carries (lambda_u, Sigma_u, C_phi_u^(T,T)).
AsymptoticMetrics asymptotic_metrics(const SystemConfig& config,
                                     const std::vector<PosteriorMeanDenoiser>& eta,
                                     const std::vector<double>& nu, Index mc_samples,
                                     const RandomStream& rng);

struct AsymptoticRates {
  McScalar md;
  McScalar fa;
};
AsymptoticRates asymptotic_rates(const SystemConfig& config, const std::vector<PosteriorMeanDenoiser>& eta,
                                 const std::vector<double>& nu, Index mc_samples, const RandomStream& rng);

struct AsymptoticMsePow {
  std::optional<McScalar> mse_d;
  std::optional<McScalar> pow_fa;
};
AsymptoticMsePow asymptotic_mse_pow(const SystemConfig& config,
                                    const std::vector<PosteriorMeanDenoiser>& eta,
                                    const std::vector<double>& nu, Index mc_samples,
                                    const RandomStream& rng);

/// R-transform of the limiting spectrum of S D D^T S^H for x <= 0:
///   R(x) = alpha / (2x) ((x - 1) + sqrt((x - 1)^2 + 4 lambda x)),
/// evaluated as 2 alpha lambda / (1 - x + sqrt(...)); R(0) = alpha lambda and
/// R = alpha when lambda = 1.
double r_transform_G(double x, double alpha, double lambda);

struct GenieAsymptotic {
  std::vector<double> c;        // c*_f per column
  std::vector<int> iterations;  // fixed-point iterations per column
  double mmse = 0.0;
};

/// Requires diagonal Sigma_u (std::invalid_argument otherwise). Throws
/// NumericalError with the last iterates when the fixed point does not converge.
GenieAsymptotic genie_asymptotic(const SystemConfig& config);
double genie_mmse_asymptotic(const SystemConfig& config);

/// (1/|A|) ||H - E[H | Y, S, A]||_F^2 with the active set known; per column the
/// linear MMSE (sigma^2 I + D S_A^H S_A)^-1 D S_A^H y_f. nullopt when |A| = 0.
std::optional<double> genie_mmse_empirical(const CMatrix& Y, const std::vector<SemiUnitaryDictionary>& dictionaries,
                                           const SignalRealization& truth, const SystemConfig& config);

/// Everything reported for one operating point.
struct DetectionReport {
  ActivityEstimate estimated_active;
  DetectionCounts counts;
  EmpiricalRates rates;
  EmpiricalMsePow mse_pow;
  AsymptoticMetrics asymptotic;
  std::optional<double> genie_mmse_emp;
  double genie_mmse_inf = 0.0;
};

/// Runs detection and channel estimation on final AMP outputs R_u^(T).
DetectionReport make_detection_report(const CMatrix& Y, const std::vector<SemiUnitaryDictionary>& dictionaries,
                                      const SignalRealization& truth, const std::vector<CMatrix>& R_final,
                                      const SystemConfig& config, const TwoTimeCovariance& se,
                                      Index mc_samples, const RandomStream& rng, bool with_genie = true);

/// Binomial standard error sqrt(p (1 - p) / n) of an empirical rate.
double binomial_std_error(double p, Index n);

/// Metric columns (rates, MSE / power, genie values, standard errors).
std::string detection_csv_header();
std::string detection_csv_values(const DetectionReport& report);
/// config_hash,point,<metric columns>; `point` must not contain commas.
std::string detection_csv_row(const std::string& config_hash, const std::string& point,
                              const DetectionReport& report);

}  // namespace msamp
