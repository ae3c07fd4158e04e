#include "msamp/amp.hpp"

#include <ostream>
#include <stdexcept>

#include "msamp/linalg.hpp"

namespace msamp {

const AmpIterate& AmpTrajectory::at(int t) const {
  for (const AmpIterate& it : iterates)
    if (it.t == t) return it;
  throw std::out_of_range("AmpTrajectory: iterate " + std::to_string(t) + " was not stored");
}

PosteriorMeanDenoiser make_posterior_denoiser(const SystemConfig& config, const TwoTimeCovariance& se,
                                              Index u, int t) {
  const auto su = static_cast<std::size_t>(u);
  return PosteriorMeanDenoiser(config.lambda[su], config.sigma[su], se.phi(u, t, t));
}

DivergenceFreeDenoiser make_divergence_free_denoiser(const SystemConfig& config,
                                                     const TwoTimeCovariance& se, Index u, int t) {
  return DivergenceFreeDenoiser(make_posterior_denoiser(config, se, u, t), se.q(u, t + 1));
}

AmpTrajectory run_amp(const CMatrix& Y, const std::vector<SemiUnitaryDictionary>& dictionaries,
                      const SystemConfig& config, const TwoTimeCovariance& se,
                      const AmpOptions& options) {
  const Index U = config.U;
  require_shape(static_cast<Index>(dictionaries.size()) == U, "run_amp: one dictionary per source");
  require_shape(Y.rows() == config.L && Y.cols() == config.F, "run_amp: Y must be L x F");
  require_shape(se.sources() == U && se.dim() == config.F && se.iterations() >= config.T,
                "run_amp: state evolution does not match the config");

  AmpTrajectory traj;
  std::vector<CMatrix> f_cur;
  for (Index u = 0; u < U; ++u) f_cur.push_back(CMatrix::Zero(dictionaries[static_cast<std::size_t>(u)].cols(), config.F));
  const RandomStream emp_root = RandomStream(options.empirical_seed).substream("amp.empirical");

  for (int t = 1; t <= config.T; ++t) {
    AmpIterate it;
    it.t = t;
    it.Z = Y;
    for (Index u = 0; u < U; ++u) {
      it.Gamma.push_back(dictionaries[static_cast<std::size_t>(u)].apply(f_cur[static_cast<std::size_t>(u)]));
      it.Z -= it.Gamma.back();
    }
    for (Index u = 0; u < U; ++u) {
      const auto su = static_cast<std::size_t>(u);
      it.R.push_back(dictionaries[su].apply_adjoint(it.Z) + f_cur[su]);
    }

    std::vector<CMatrix> c_used;
    std::vector<CMatrix> f_next;
    for (Index u = 0; u < U; ++u) {
      const auto su = static_cast<std::size_t>(u);
      if (!options.empirical_phi) {
        c_used.push_back(se.phi(u, t, t));
        if (t < config.T) f_next.push_back(make_divergence_free_denoiser(config, se, u, t).apply_rows(it.R[su]));
        continue;
      }
      const CMatrix zz = it.Z.adjoint() * it.Z / static_cast<double>(config.L);
      const CMatrix c = hermitize(zz - se.psi(u, t, t) / config.alpha[su]);
      c_used.push_back(c);
      if (t < config.T) {
        PosteriorMeanDenoiser eta(config.lambda[su], config.sigma[su], c);
        RandomStream rq = emp_root.substream("Q", static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(t));
        const McMatrixEstimate q = jacobian_expectation_Q(eta, options.empirical_mc_samples, rq);
        f_next.push_back(DivergenceFreeDenoiser(eta, q.mean).apply_rows(it.R[su]));
      }
    }
    traj.c_phi_used.push_back(std::move(c_used));
    it.F = std::move(f_cur);
    f_cur = std::move(f_next);
    if (options.store_all || t == config.T) traj.iterates.push_back(std::move(it));
  }
  return traj;
}

std::vector<CMatrix> estimate_theta(const AmpIterate& iterate, const TwoTimeCovariance& se,
                                    const SystemConfig& config) {
  std::vector<CMatrix> theta;
  for (Index u = 0; u < config.U; ++u) {
    const auto su = static_cast<std::size_t>(u);
    const CMatrix psi = se.psi(u, iterate.t, iterate.t);
    const CMatrix inner = se.phi(u, iterate.t, iterate.t) + psi / config.alpha[su];
    theta.push_back(iterate.Gamma[su] + iterate.Z * checked_inverse(inner, "estimate_theta: C_phi + C_psi / alpha") * psi);
  }
  return theta;
}

CMatrix empirical_error_covariance(const AmpIterate& at_t, const AmpIterate& at_s,
                                   const SignalRealization& truth, Index u) {
  const auto su = static_cast<std::size_t>(u);
  const CMatrix& x = truth.X[su];
  return (at_t.R[su] - x).adjoint() * (at_s.R[su] - x) / static_cast<double>(x.rows());
}

void write_trajectory_summary_csv(std::ostream& os, const AmpTrajectory& trajectory,
                                  const SignalRealization& truth, const TwoTimeCovariance& se) {
  os << "t,u,trace_empirical,trace_se,rel_frobenius\n";
  os.precision(10);
  for (const AmpIterate& it : trajectory.iterates)
    for (Index u = 0; u < se.sources(); ++u) {
      const CMatrix emp = empirical_error_covariance(it, it, truth, u);
      const CMatrix pred = se.phi(u, it.t, it.t);
      os << it.t << ',' << u + 1 << ',' << emp.trace().real() << ',' << pred.trace().real() << ','
         << relative_frobenius_error(emp, pred) << '\n';
    }
}

}  // namespace msamp
