#include <doctest.h>

#include "msamp/linalg.hpp"
#include "msamp/model.hpp"
#include "msamp/monte_carlo.hpp"
#include "msamp/state_evolution.hpp"

using namespace msamp;

namespace {
CMatrix random_pd(Index n, RandomStream& rng) {
  const CMatrix a = rng.complex_normal_matrix(n, n);
  return a * a.adjoint() + 0.5 * CMatrix::Identity(n, n);
}
}  // namespace

TEST_CASE("block Cholesky") {
  RandomStream rng(12);
  SUBCASE("identity") {
    const auto f = block_cholesky(CMatrix::Identity(6, 6), 2);
    CHECK((f.upper_block_matrix() - CMatrix::Identity(6, 6)).norm() <= 1e-15);
  }
  SUBCASE("single block is the ordinary factor") {
    const CMatrix a = random_pd(3, rng);
    const auto f = block_cholesky(a, 3);
    const CMatrix l = a.llt().matrixL();
    CHECK((f.at(1, 1) - l.adjoint()).norm() <= 1e-12);
  }
  SUBCASE("reconstruction and block structure") {
    const CMatrix a = random_pd(6, rng);
    const auto f = block_cholesky(a, 2);
    const CMatrix u = f.upper_block_matrix();
    CHECK((u.adjoint() * u - a).norm() <= 1e-10);
    const CMatrix low = f.lower_block_matrix();
    CHECK(low.topRightCorner(2, 4).norm() == 0.0);
    CHECK(low.block(2, 4, 2, 2).norm() == 0.0);
  }
  SUBCASE("rank-deficient pivot") {
    const CMatrix c = random_pd(2, rng);
    CMatrix a(4, 4);
    a << c, c, c, c;
    const auto f = block_cholesky(a, 2);
    const CMatrix u = f.upper_block_matrix();
    CHECK((u.adjoint() * u - a).norm() <= 1e-10);
  }
  SUBCASE("indefinite pivot throws") {
    CMatrix a = CMatrix::Identity(4, 4);
    a(2, 2) = -1.0;
    CHECK_THROWS_AS(block_cholesky(a, 2), NumericalError);
  }
}

TEST_CASE("Gaussian-process sampler") {
  RandomStream rng(13);
  SUBCASE("single time") {
    const auto s = sample_gp_trajectory(0.3 * CMatrix::Identity(2, 2), 2, 100000, rng);
    const CMatrix cov = s[0].adjoint() * s[0] / 100000.0;
    CHECK(relative_frobenius_error(cov, 0.3 * CMatrix::Identity(2, 2)) <= 0.05);
  }
  SUBCASE("perfectly correlated times") {
    const CMatrix c = random_pd(2, rng);
    CMatrix a(4, 4);
    a << c, c, c, c;
    const auto s = sample_gp_trajectory(a, 2, 1000, rng);
    CHECK((s[0] - s[1]).cwiseAbs().maxCoeff() <= 1e-10);
  }
  SUBCASE("two-time moment") {
    const CMatrix a = random_pd(6, rng);
    const Index n = 100000;
    const auto s = sample_gp_trajectory(a, 2, n, rng);
    McMatrixAccumulator acc(2, 2);
    for (Index k = 0; k < n; ++k) acc.add(s[2].row(k).adjoint() * s[0].row(k));
    const McMatrixEstimate e = acc.finish();
    const CMatrix target = a.block(4, 0, 2, 2);
    CHECK((e.mean - target).norm() <= 3.0 * e.frobenius_std_error());
  }
}

TEST_CASE("state evolution") {
  SystemConfig cfg = two_location_config(256, 0.1, 0.1, 0.1);
  cfg.mc_samples = 20000;
  cfg.T = 4;

  SUBCASE("base case") {
    SystemConfig sym = cfg;
    sym.sigma = {CMatrix::Identity(4, 4), CMatrix::Identity(4, 4)};
    const auto se = run_state_evolution(sym);
    for (Index u = 0; u < 2; ++u) {
      CHECK((se.psi(u, 1, 1) - 0.1 * CMatrix::Identity(4, 4)).norm() <= 1e-12);
      CHECK((se.phi(u, 1, 1) - 0.2 * CMatrix::Identity(4, 4)).norm() <= 1e-12);
      CHECK(se.q(u, 1).norm() == 0.0);
    }
  }

  SUBCASE("cross-source relation and PSD blocks") {
    SystemConfig c15 = two_location_config(256, 0.2, 0.1, 0.1, 1.5);
    c15.mc_samples = 20000;
    c15.T = 4;
    const auto se = run_state_evolution(c15);
    for (Index u = 0; u < 2; ++u) {
      for (int t = 1; t <= 4; ++t)
        for (int s = 1; s <= t; ++s) {
          CMatrix expect = (c15.alpha[u] - 1.0) / c15.alpha[u] * se.psi(u, t, s) + se.psi(1 - u, t, s);
          expect += c15.noise_var * CMatrix::Identity(4, 4);
          CHECK((se.phi(u, t, s) - expect).norm() <= 1e-12);
        }
      CHECK(min_hermitian_eigenvalue(se.assembled_psi(u, 4)) >= -1e-10);
      CHECK(min_hermitian_eigenvalue(se.assembled_phi(u, 4)) >= -1e-10);
      CHECK((se.psi(u, 3, 1) - se.psi(u, 1, 3).adjoint()).norm() == 0.0);
    }
  }

  SUBCASE("shorter horizon is a prefix") {
    const auto long_run = run_state_evolution(cfg);
    SystemConfig shorter = cfg;
    shorter.T = 2;
    const auto short_run = run_state_evolution(shorter);
    for (Index u = 0; u < 2; ++u)
      for (int t = 1; t <= 2; ++t)
        for (int s = 1; s <= t; ++s) CHECK((short_run.psi(u, t, s) - long_run.psi(u, t, s)).norm() == 0.0);
  }

  SUBCASE("Gaussian signals keep C_psi at alpha Sigma") {
    SystemConfig g = cfg;
    g.lambda = {1.0, 1.0};
    const auto se = run_state_evolution(g);
    for (Index u = 0; u < 2; ++u) {
      const CMatrix w = (g.sigma[u] + se.phi(u, 1, 1)).inverse() * g.sigma[u];
      CHECK((se.q(u, 2) - w).norm() <= 1e-6);
      for (int t = 1; t <= 4; ++t) CHECK(relative_frobenius_error(se.psi(u, t, t), g.sigma[u]) <= 1e-4);
    }
  }
}
