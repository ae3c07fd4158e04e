#include <doctest.h>

#include "msamp/amp.hpp"
#include "msamp/experiment.hpp"
#include "msamp/linalg.hpp"
#include "msamp/oracle.hpp"

using namespace msamp;

namespace {
SystemConfig small_config() {
  SystemConfig cfg = two_location_config(128, 0.1, 0.2, 0.1);
  cfg.T = 4;
  cfg.mc_samples = 20000;
  cfg.seed = 17;
  return cfg;
}
}  // namespace

TEST_CASE("AMP recursion identities") {
  const SystemConfig cfg = small_config();
  const auto se = run_state_evolution(cfg);
  const TrialData trial = make_trial(cfg, RandomStream(5));
  const AmpTrajectory traj = run_amp(trial.observation.Y, trial.dictionaries, cfg, se);
  REQUIRE(traj.iterates.size() == 4);

  const AmpIterate& first = traj.at(1);
  for (Index u = 0; u < 2; ++u) {
    CHECK(first.Gamma[u].norm() == 0.0);
    CHECK((first.R[u] - trial.dictionaries[u].apply_adjoint(trial.observation.Y)).norm() <= 1e-12);
  }
  CHECK((first.Z - trial.observation.Y).norm() == 0.0);

  for (const auto& it : traj.iterates) {
    CMatrix z = trial.observation.Y;
    for (Index u = 0; u < 2; ++u) {
      CHECK((it.Gamma[u] - trial.dictionaries[u].apply(it.F[u])).norm() <= 1e-12);
      z -= it.Gamma[u];
    }
    CHECK((it.Z - z).norm() <= 1e-12);
    for (Index u = 0; u < 2; ++u)
      CHECK((it.R[u] - trial.dictionaries[u].apply_adjoint(it.Z) - it.F[u]).norm() <= 1e-12);
  }
}

TEST_CASE("zero observation stays at zero") {
  const SystemConfig cfg = small_config();
  const auto se = run_state_evolution(cfg);
  RandomStream rng(1);
  const auto dicts = build_dictionaries(cfg, rng);
  const AmpTrajectory traj = run_amp(CMatrix::Zero(cfg.L, cfg.F), dicts, cfg, se);
  for (const auto& it : traj.iterates)
    for (Index u = 0; u < 2; ++u) CHECK(it.R[u].norm() == 0.0);
}

TEST_CASE("residual form agrees with AMP on the same realization") {
  SystemConfig cfg = small_config();
  cfg.L = 32;
  const auto se = run_state_evolution(cfg);
  RandomStream rng(23);
  std::vector<CMatrix> haar;
  std::vector<SemiUnitaryDictionary> dicts;
  for (Index u = 0; u < 2; ++u) {
    haar.push_back(sample_haar_unitary(32, rng));
    dicts.push_back(SemiUnitaryDictionary::from_dense(std::sqrt(cfg.alpha[u]) * haar.back().topRows(cfg.L)));
  }
  RandomStream srng(24);
  const SignalRealization sig = sample_signals(cfg, srng);
  const CMatrix noise = std::sqrt(cfg.noise_var) * rng.complex_normal_matrix(cfg.L, cfg.F);
  const CMatrix y = superpose(dicts, sig.X, noise);
  const AmpTrajectory traj = run_amp(y, dicts, cfg, se);
  const auto schedule = make_denoiser_schedule(cfg, se);
  const ResidualPath path = run_residual_dynamics(cfg, sig, noise, haar, schedule, cfg.T);
  for (int t = 1; t <= cfg.T; ++t)
    for (Index u = 0; u < 2; ++u) {
      const CMatrix theta = dicts[static_cast<std::size_t>(u)].apply(sig.X[u]);
      CHECK((path.psi_hat[u][t - 1] - (traj.at(t).Gamma[u] - theta)).norm() <= 1e-8);
      CHECK((path.phi_hat[u][t - 1] - (traj.at(t).R[u] - sig.X[u])).norm() <= 1e-8);
    }
  const AmpIterate& it = traj.at(1);
  for (Index u = 0; u < 2; ++u)
    CHECK((path.psi_hat[u][0] - std::sqrt(cfg.alpha[u]) * haar[u] * (it.F[u] - sig.X[u])).norm() <= 1e-8);
}

TEST_CASE("theta estimate with no signal uncertainty is Gamma") {
  SystemConfig cfg = small_config();
  const auto se_real = run_state_evolution(cfg);
  TwoTimeCovariance se(2, cfg.T, cfg.F);
  for (Index u = 0; u < 2; ++u)
    for (int t = 1; t <= cfg.T; ++t) {
      se.set_psi(u, t, t, CMatrix::Zero(4, 4));
      se.set_phi(u, t, t, se_real.phi(u, t, t));
    }
  const TrialData trial = make_trial(cfg, RandomStream(6));
  const AmpTrajectory traj = run_amp(trial.observation.Y, trial.dictionaries, cfg, se_real);
  const auto theta = estimate_theta(traj.at(3), se, cfg);
  for (Index u = 0; u < 2; ++u) CHECK((theta[u] - traj.at(3).Gamma[u]).norm() <= 1e-12);
}
