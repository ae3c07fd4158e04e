#include <doctest.h>

#include "msamp/linalg.hpp"
#include "msamp/oracle.hpp"

using namespace msamp;

TEST_CASE("block Gram-Schmidt") {
  RandomStream rng(3);
  SUBCASE("already orthonormal block is unchanged") {
    const CMatrix o = sample_haar_unitary(32, rng);
    const CMatrix b = std::sqrt(32.0) * o.leftCols(2);
    CHECK((block_gram_schmidt(b, {}) - b).norm() <= 1e-10);
  }
  SUBCASE("self deflation is an error") {
    const CMatrix b = rng.complex_normal_matrix(32, 2);
    const CMatrix v = block_gram_schmidt(b, {});
    CHECK_THROWS_AS(block_gram_schmidt(b, {v}), NumericalError);
  }
  SUBCASE("reconstruction") {
    const CMatrix b1 = rng.complex_normal_matrix(32, 2);
    const CMatrix b = rng.complex_normal_matrix(32, 2);
    const CMatrix v1 = block_gram_schmidt(b1, {});
    const CMatrix v2 = block_gram_schmidt(b, {v1});
    CHECK((normalized_inner(v2, v2) - CMatrix::Identity(2, 2)).norm() <= 1e-10);
    CHECK(normalized_inner(v1, v2).norm() <= 1e-10);
    const CMatrix rebuilt = v1 * normalized_inner(v1, b) + v2 * normalized_inner(v2, b);
    CHECK((rebuilt - b).norm() <= 1e-10);
  }
}

TEST_CASE("Gaussian-element dynamics") {
  SystemConfig cfg;
  cfg.L = 48;
  cfg.U = 2;
  cfg.F = 2;
  cfg.alpha = {1.0, 1.0};
  cfg.lambda = {0.1, 0.2};
  cfg.sigma = wyner_covariances(2, 1, 0.5);
  cfg.noise_var = 0.1;
  cfg.T = 3;
  cfg.nu = {1.0, 1.0};
  cfg.mc_samples = 20000;
  const auto se = run_state_evolution(cfg);
  const auto schedule = make_denoiser_schedule(cfg, se);
  RandomStream rng(4);
  const SignalRealization sig = sample_signals(cfg, rng);
  const CMatrix noise = std::sqrt(cfg.noise_var) * rng.complex_normal_matrix(48, 2);
  const DiceElements el = draw_dice_elements(cfg, 3, RandomStream(5));
  DiceState state;
  const ResidualPath path = run_householder_dice(cfg, sig, noise, el, schedule, 3, &state);

  for (Index u = 0; u < 2; ++u) {
    const auto& v = state.V[u];
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        const CMatrix g = normalized_inner(v[i], v[j]);
        const CMatrix want = i == j ? CMatrix(CMatrix::Identity(2, 2)) : CMatrix(CMatrix::Zero(2, 2));
        CHECK((g - want).norm() <= 1e-10);
      }
    // Phi^(t) - T^(t) lies in span{V^(1..2t)}
    for (int t = 1; t <= 3; ++t) {
      CMatrix resid = path.phi_hat[u][t - 1] - state.T_mats[u][t - 1];
      for (int s = 0; s < 2 * t && s < static_cast<int>(v.size()); ++s) resid -= v[s] * normalized_inner(v[s], resid);
      CHECK(resid.norm() <= 1e-10 * (1.0 + path.phi_hat[u][t - 1].norm()));
    }
  }

  SignalRealization zero = sig;
  for (auto& x : zero.X) x.setZero();
  const std::vector<CMatrix> haar = {sample_haar_unitary(48, rng), sample_haar_unitary(48, rng)};
  const ResidualPath still = run_residual_dynamics(cfg, zero, CMatrix::Zero(48, 2), haar, schedule, 3);
  for (Index u = 0; u < 2; ++u)
    for (int t = 1; t <= 3; ++t) {
      CHECK(still.phi_hat[u][t - 1].norm() == 0.0);
      CHECK(still.psi_hat[u][t - 1].norm() == 0.0);
    }
}
