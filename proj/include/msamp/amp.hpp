#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "msamp/denoiser.hpp"
#include "msamp/dictionary.hpp"
#include "msamp/model.hpp"
#include "msamp/state_evolution.hpp"
#include "msamp/types.hpp"

namespace msamp {

/// Matrices of one AMP iteration t (1-based).
struct AmpIterate {
  int t = 0;
  std::vector<CMatrix> Gamma;  // S_u F_u^(t), L x F
  CMatrix Z;                   // Y - sum_u Gamma_u^(t)
  std::vector<CMatrix> R;      // S_u^H Z^(t) + F_u^(t), N_u x F
  std::vector<CMatrix> F;      // F_u^(t), N_u x F
};

struct AmpTrajectory {
  std::vector<AmpIterate> iterates;  // all t, or only t = T
  /// Equal-time C_phi used by the denoisers at each t (SE or empirical).
  std::vector<std::vector<CMatrix>> c_phi_used;

  const AmpIterate& final() const { return iterates.back(); }
  /// Iterate with index t; throws when it was not stored.
  const AmpIterate& at(int t) const;
};

struct AmpOptions {
  bool store_all = true;
  /// Replace C_phi_u^(t,t) by Z^H Z / L - C_psi_u^(t,t) / alpha_u (C_psi from SE)
  /// and recompute Q by Monte Carlo. Not covered by the analysis.
  bool empirical_phi = false;
  Index empirical_mc_samples = 20000;
  std::uint64_t empirical_seed = 1;
};

/// eta_{u,t} with C = C_phi_u^(t,t).
PosteriorMeanDenoiser make_posterior_denoiser(const SystemConfig& config, const TwoTimeCovariance& se,
                                              Index u, int t);
/// f_{u,t} with C = C_phi_u^(t,t) and Q = Q_u^(t+1), 1 <= t < T.
DivergenceFreeDenoiser make_divergence_free_denoiser(const SystemConfig& config,
                                                     const TwoTimeCovariance& se, Index u, int t);

/// Gamma = S F, Z = Y - sum Gamma, R = S^H Z + F, F^(t+1) = f_{u,t}(R) for t = 1..T
/// starting from F^(1) = 0.
AmpTrajectory run_amp(const CMatrix& Y, const std::vector<SemiUnitaryDictionary>& dictionaries,
                      const SystemConfig& config, const TwoTimeCovariance& se,
                      const AmpOptions& options = {});

/// Theta_u^(t) = Gamma_u^(t) + Z^(t) (C_phi + C_psi / alpha_u)^-1 C_psi with equal-time
/// SE blocks at t.
std::vector<CMatrix> estimate_theta(const AmpIterate& iterate, const TwoTimeCovariance& se,
                                    const SystemConfig& config);

/// (1/N_u) (R_u^(t) - X_u)^H (R_u^(s) - X_u)
CMatrix empirical_error_covariance(const AmpIterate& at_t, const AmpIterate& at_s,
                                   const SignalRealization& truth, Index u);

/// Per (t, u): trace of the empirical error covariance, trace of C_phi_u^(t,t)
/// and their relative Frobenius distance. Needs a trajectory with all iterates.
void write_trajectory_summary_csv(std::ostream& os, const AmpTrajectory& trajectory,
                                  const SignalRealization& truth, const TwoTimeCovariance& se);

}  // namespace msamp
