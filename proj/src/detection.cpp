#include "msamp/detection.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "msamp/amp.hpp"
#include "msamp/linalg.hpp"

namespace msamp {

bool declare_active(const PosteriorMeanDenoiser& eta, const CRow& r, double nu) {
  return eta.log_likelihood_ratio(r) <= std::log(nu);
}

ActivityEstimate detect(const std::vector<CMatrix>& R, const std::vector<PosteriorMeanDenoiser>& eta,
                        const std::vector<double>& nu) {
  require_shape(R.size() == eta.size() && R.size() == nu.size(), "detect: one R, denoiser and nu per source");
  ActivityEstimate out;
  for (std::size_t u = 0; u < R.size(); ++u) {
    const RVector log_lr = eta[u].log_likelihood_ratio_rows(R[u]);
    const double threshold = std::log(nu[u]);
    std::vector<std::uint8_t> a(static_cast<std::size_t>(R[u].rows()));
    for (Index n = 0; n < R[u].rows(); ++n) a[static_cast<std::size_t>(n)] = log_lr(n) <= threshold ? 1 : 0;
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<CMatrix> estimate_channels(const std::vector<CMatrix>& R,
                                       const std::vector<PosteriorMeanDenoiser>& eta) {
  require_shape(R.size() == eta.size(), "estimate_channels: one denoiser per source");
  std::vector<CMatrix> out;
  for (std::size_t u = 0; u < R.size(); ++u) out.push_back(eta[u].eta_rows(R[u]));
  return out;
}

DetectionCounts& DetectionCounts::operator+=(const DetectionCounts& o) {
  active += o.active;
  missed += o.missed;
  inactive += o.inactive;
  false_alarm += o.false_alarm;
  sq_error_detected += o.sq_error_detected;
  power_false_alarm += o.power_false_alarm;
  return *this;
}

DetectionCounts count_detection(const SignalRealization& truth, const ActivityEstimate& estimate,
                                const std::vector<CMatrix>& channel_estimates) {
  require_shape(truth.activity.size() == estimate.size(), "count_detection: source count differs");
  const bool with_channels = !channel_estimates.empty();
  require_shape(!with_channels || channel_estimates.size() == estimate.size(),
                "count_detection: one channel estimate per source");
  DetectionCounts c;
  for (std::size_t u = 0; u < estimate.size(); ++u) {
    require_shape(truth.activity[u].size() == estimate[u].size(), "count_detection: activity length differs");
    for (std::size_t n = 0; n < estimate[u].size(); ++n) {
      const bool truly = truth.activity[u][n] != 0;
      const bool declared = estimate[u][n] != 0;
      const auto row = static_cast<Index>(n);
      if (truly) {
        ++c.active;
        if (!declared) ++c.missed;
        else if (with_channels)
          c.sq_error_detected += (truth.X[u].row(row) - channel_estimates[u].row(row)).squaredNorm();
      } else {
        ++c.inactive;
        if (declared) {
          ++c.false_alarm;
          if (with_channels) c.power_false_alarm += channel_estimates[u].row(row).squaredNorm();
        }
      }
    }
  }
  return c;
}

EmpiricalRates empirical_rates(const DetectionCounts& c) {
  EmpiricalRates r;
  if (c.active > 0) r.md = static_cast<double>(c.missed) / static_cast<double>(c.active);
  if (c.inactive > 0) r.fa = static_cast<double>(c.false_alarm) / static_cast<double>(c.inactive);
  return r;
}

EmpiricalRates empirical_rates(const SignalRealization& truth, const ActivityEstimate& estimate) {
  return empirical_rates(count_detection(truth, estimate));
}

EmpiricalMsePow empirical_mse_pow(const DetectionCounts& c) {
  EmpiricalMsePow m;
  const Index detected = c.active - c.missed;
  if (detected > 0) m.mse_d = c.sq_error_detected / static_cast<double>(detected);
  if (c.false_alarm > 0) m.pow_fa = c.power_false_alarm / static_cast<double>(c.false_alarm);
  return m;
}

EmpiricalMsePow empirical_mse_pow(const SignalRealization& truth, const ActivityEstimate& estimate,
                                  const std::vector<CMatrix>& channel_estimates) {
  return empirical_mse_pow(count_detection(truth, estimate, channel_estimates));
}

namespace {

// Weighted ratio sum_u w_u mean(v_u 1_u) / sum_u w_u mean(1_u) with a
// delta-method standard error.
std::optional<McScalar> ratio_estimate(const std::vector<double>& w, const std::vector<RVector>& value,
                                       const std::vector<RVector>& indicator) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t u = 0; u < w.size(); ++u) {
    num += w[u] * value[u].cwiseProduct(indicator[u]).mean();
    den += w[u] * indicator[u].mean();
  }
  if (den <= 0.0) return std::nullopt;
  const double r = num / den;
  double var = 0.0;
  for (std::size_t u = 0; u < w.size(); ++u) {
    const RVector g = (value[u].array() - r) * indicator[u].array();
    const double n = static_cast<double>(g.size());
    const double mean = g.mean();
    const double v = n > 1 ? (g.array() - mean).square().sum() / (n - 1.0) : 0.0;
    var += w[u] * w[u] * v / n;
  }
  return McScalar{r, std::sqrt(var) / den};
}

}  // namespace

AsymptoticMetrics asymptotic_metrics(const SystemConfig& config,
                                     const std::vector<PosteriorMeanDenoiser>& eta,
                                     const std::vector<double>& nu, Index mc_samples,
                                     const RandomStream& rng) {
  require_shape(static_cast<Index>(eta.size()) == config.U && static_cast<Index>(nu.size()) == config.U,
                "asymptotic_metrics: one denoiser and threshold per source");
  if (mc_samples < 2) throw std::invalid_argument("asymptotic_metrics: mc_samples must be >= 2");
  const auto U = static_cast<std::size_t>(config.U);
  std::vector<double> w_active(U), w_inactive(U);
  std::vector<RVector> err(U), det(U), pow(U), fa(U);
  double z_active = 0.0, z_inactive = 0.0;
  double md_mean = 0.0, md_var = 0.0, fa_mean = 0.0, fa_var = 0.0;
  const double n = static_cast<double>(mc_samples);

  for (std::size_t u = 0; u < U; ++u) {
    RandomStream r = rng.substream("asymptotic", u);
    const BernoulliGaussianPrior prior(1.0, eta[u].sigma());
    const CMatrix h = prior.sample_channels(mc_samples, r);
    const CMatrix phi = r.complex_normal_matrix(mc_samples, config.F) * hermitian_sqrt(eta[u].noise_cov());
    const double threshold = std::log(nu[u]);

    const CMatrix r_active = h + phi;
    const RVector llr_active = eta[u].log_likelihood_ratio_rows(r_active);
    const RVector llr_null = eta[u].log_likelihood_ratio_rows(phi);
    det[u] = (llr_active.array() <= threshold).cast<double>();
    fa[u] = (llr_null.array() <= threshold).cast<double>();
    err[u] = (h - eta[u].eta_rows(r_active)).rowwise().squaredNorm();
    pow[u] = eta[u].eta_rows(phi).rowwise().squaredNorm();

    const double a = config.alpha[u];
    const double lam = config.lambda[u];
    w_active[u] = a * lam;
    w_inactive[u] = a * (1.0 - lam);
    z_active += w_active[u];
    z_inactive += w_inactive[u];

    const double p_md = 1.0 - det[u].mean();
    const double p_fa = fa[u].mean();
    md_mean += w_active[u] * p_md;
    md_var += w_active[u] * w_active[u] * p_md * (1.0 - p_md) / n;
    fa_mean += w_inactive[u] * p_fa;
    fa_var += w_inactive[u] * w_inactive[u] * p_fa * (1.0 - p_fa) / n;
  }

  AsymptoticMetrics out;
  out.md = {md_mean / z_active, std::sqrt(md_var) / z_active};
  out.fa = {fa_mean / z_inactive, std::sqrt(fa_var) / z_inactive};
  out.mse_d = ratio_estimate(w_active, err, det);
  out.pow_fa = ratio_estimate(w_inactive, pow, fa);
  return out;
}

AsymptoticRates asymptotic_rates(const SystemConfig& config, const std::vector<PosteriorMeanDenoiser>& eta,
                                 const std::vector<double>& nu, Index mc_samples, const RandomStream& rng) {
  const AsymptoticMetrics m = asymptotic_metrics(config, eta, nu, mc_samples, rng);
  return {m.md, m.fa};
}

AsymptoticMsePow asymptotic_mse_pow(const SystemConfig& config,
                                    const std::vector<PosteriorMeanDenoiser>& eta,
                                    const std::vector<double>& nu, Index mc_samples,
                                    const RandomStream& rng) {
  const AsymptoticMetrics m = asymptotic_metrics(config, eta, nu, mc_samples, rng);
  return {m.mse_d, m.pow_fa};
}

double r_transform_G(double x, double alpha, double lambda) {
  if (x > 0.0) throw std::invalid_argument("r_transform_G: x must be <= 0");
  if (lambda == 1.0) return alpha;
  const double d = (x - 1.0) * (x - 1.0) + 4.0 * lambda * x;
  return 2.0 * alpha * lambda / (1.0 - x + std::sqrt(d));
}

namespace {

std::vector<RVector> diagonal_variances(const SystemConfig& config) {
  std::vector<RVector> tau;
  for (const CMatrix& s : config.sigma) {
    CMatrix off = s;
    off.diagonal().setZero();
    if (off.norm() > 1e-12 * std::max(1.0, s.norm()))
      throw std::invalid_argument("genie MMSE: channel covariances must be diagonal");
    tau.push_back(s.diagonal().real());
  }
  return tau;
}

}  // namespace

GenieAsymptotic genie_asymptotic(const SystemConfig& config) {
  config.validate();
  const std::vector<RVector> tau = diagonal_variances(config);
  const double sigma2 = config.noise_var;
  GenieAsymptotic out;
  double z = 0.0;
  for (Index u = 0; u < config.U; ++u) z += config.alpha[u] * config.lambda[u];

  auto map = [&](Index f, double c) {
    double v = sigma2;
    for (Index u = 0; u < config.U; ++u) {
      const double t = tau[u](f);
      if (t > 0.0) v += t * r_transform_G(-t / c, config.alpha[u], config.lambda[u]);
    }
    return v;
  };

  double total = 0.0;
  for (Index f = 0; f < config.F; ++f) {
    double c = sigma2;
    for (Index u = 0; u < config.U; ++u) c += tau[u](f) * config.alpha[u] * config.lambda[u];
    double damping = 1.0;
    double prev_step = 0.0;
    std::vector<double> history;
    bool converged = false;
    int it = 0;
    for (; it < 10000; ++it) {
      const double next = map(f, c);
      const double step = next - c;
      if (it > 0 && step * prev_step < 0.0 && std::abs(step) >= std::abs(prev_step)) damping = 0.5;
      prev_step = step;
      const double c_new = c + damping * step;
      history.push_back(c_new);
      if (std::abs(c_new - c) <= 1e-10 * std::max(1.0, std::abs(c))) {
        c = c_new;
        converged = true;
        break;
      }
      c = c_new;
    }
    if (!converged || !(c > 0.0)) {
      std::ostringstream msg;
      msg << "genie_asymptotic: fixed point for column " << f << " did not converge; last iterates:";
      for (std::size_t k = history.size() > 5 ? history.size() - 5 : 0; k < history.size(); ++k)
        msg << ' ' << history[k];
      throw NumericalError(msg.str());
    }
    out.c.push_back(c);
    out.iterations.push_back(it + 1);
    for (Index u = 0; u < config.U; ++u) {
      const double t = tau[u](f);
      if (t <= 0.0) continue;
      const double a = config.alpha[u], lam = config.lambda[u];
      total += t * (a * lam - (t / c) * r_transform_G(-t / c, a, lam));
    }
  }
  out.mmse = total / z;
  return out;
}

double genie_mmse_asymptotic(const SystemConfig& config) { return genie_asymptotic(config).mmse; }

std::optional<double> genie_mmse_empirical(const CMatrix& Y, const std::vector<SemiUnitaryDictionary>& dictionaries,
                                           const SignalRealization& truth, const SystemConfig& config) {
  const std::vector<RVector> tau = diagonal_variances(config);
  const auto K = static_cast<Index>(truth.num_active());
  if (K == 0) return std::nullopt;
  require_shape(Y.rows() == config.L && Y.cols() == config.F, "genie_mmse_empirical: Y must be L x F");

  CMatrix s_active(config.L, K);
  CMatrix h(K, config.F);
  RMatrix d(K, config.F);
  Index k = 0;
  for (Index u = 0; u < config.U; ++u) {
    const auto su = static_cast<std::size_t>(u);
    std::vector<Index> rows;
    for (const auto& [src, n] : truth.active_set)
      if (src == u) rows.push_back(n);
    if (rows.empty()) continue;
    const auto ku = static_cast<Index>(rows.size());
    CMatrix unit = CMatrix::Zero(dictionaries[su].cols(), ku);
    for (Index j = 0; j < ku; ++j) unit(rows[static_cast<std::size_t>(j)], j) = 1.0;
    s_active.middleCols(k, ku) = dictionaries[su].apply(unit);
    for (Index j = 0; j < ku; ++j) {
      h.row(k + j) = truth.X[su].row(rows[static_cast<std::size_t>(j)]);
      d.row(k + j) = tau[su].transpose();
    }
    k += ku;
  }

  const CMatrix gram = s_active.adjoint() * s_active;
  const CMatrix sy = s_active.adjoint() * Y;
  double err = 0.0;
  for (Index f = 0; f < config.F; ++f) {
    const RVector df = d.col(f);
    CMatrix a = df.cast<Complex>().asDiagonal() * gram;
    a.diagonal().array() += config.noise_var;
    const CVector rhs = df.cast<Complex>().asDiagonal() * sy.col(f);
    const CVector est = a.partialPivLu().solve(rhs);
    err += (h.col(f) - est).squaredNorm();
  }
  return err / static_cast<double>(K);
}

double binomial_std_error(double p, Index n) {
  if (n <= 0) return 0.0;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

DetectionReport make_detection_report(const CMatrix& Y, const std::vector<SemiUnitaryDictionary>& dictionaries,
                                      const SignalRealization& truth, const std::vector<CMatrix>& R_final,
                                      const SystemConfig& config, const TwoTimeCovariance& se,
                                      Index mc_samples, const RandomStream& rng, bool with_genie) {
  std::vector<PosteriorMeanDenoiser> eta;
  for (Index u = 0; u < config.U; ++u) eta.push_back(make_posterior_denoiser(config, se, u, config.T));
  DetectionReport rep;
  rep.estimated_active = detect(R_final, eta, config.nu);
  const std::vector<CMatrix> h_hat = estimate_channels(R_final, eta);
  rep.counts = count_detection(truth, rep.estimated_active, h_hat);
  rep.rates = empirical_rates(rep.counts);
  rep.mse_pow = empirical_mse_pow(rep.counts);
  rep.asymptotic = asymptotic_metrics(config, eta, config.nu, mc_samples, rng);
  if (with_genie) {
    rep.genie_mmse_emp = genie_mmse_empirical(Y, dictionaries, truth, config);
    rep.genie_mmse_inf = genie_mmse_asymptotic(config);
  }
  return rep;
}

namespace {

std::string opt(const std::optional<double>& v) {
  if (!v) return "nan";
  std::ostringstream s;
  s.precision(10);
  s << *v;
  return s.str();
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

}  // namespace

std::string detection_csv_header() {
  return "md_emp,md_emp_se,md_inf,md_inf_se,fa_emp,fa_emp_se,fa_inf,fa_inf_se,"
         "mse_d_emp,mse_d_inf,mse_d_inf_se,pow_fa_emp,pow_fa_inf,pow_fa_inf_se,genie_emp,genie_inf";
}

std::string detection_csv_row(const std::string& config_hash, const std::string& point,
                              const DetectionReport& report) {
  return config_hash + ',' + point + ',' + detection_csv_values(report);
}

std::string detection_csv_values(const DetectionReport& r) {
  std::ostringstream s;
  const auto& a = r.asymptotic;
  s << opt(r.rates.md) << ','
    << num(r.rates.md ? binomial_std_error(*r.rates.md, r.counts.active) : 0.0) << ',' << num(a.md.mean) << ','
    << num(a.md.std_error) << ',' << opt(r.rates.fa) << ','
    << num(r.rates.fa ? binomial_std_error(*r.rates.fa, r.counts.inactive) : 0.0) << ',' << num(a.fa.mean)
    << ',' << num(a.fa.std_error) << ',' << opt(r.mse_pow.mse_d) << ','
    << opt(a.mse_d ? std::optional<double>(a.mse_d->mean) : std::nullopt) << ','
    << opt(a.mse_d ? std::optional<double>(a.mse_d->std_error) : std::nullopt) << ','
    << opt(r.mse_pow.pow_fa) << ','
    << opt(a.pow_fa ? std::optional<double>(a.pow_fa->mean) : std::nullopt) << ','
    << opt(a.pow_fa ? std::optional<double>(a.pow_fa->std_error) : std::nullopt) << ','
    << opt(r.genie_mmse_emp) << ',' << num(r.genie_mmse_inf);
  return s.str();
}

}  // namespace msamp
