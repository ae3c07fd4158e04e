#include <doctest.h>

#include <cmath>

#include "msamp/amp.hpp"
#include "msamp/detection.hpp"
#include "msamp/experiment.hpp"
#include "msamp/reference.hpp"

using namespace msamp;

namespace {
SignalRealization activity_only(std::vector<std::uint8_t> a) {
  SignalRealization s;
  s.X = {CMatrix::Zero(static_cast<Index>(a.size()), 1)};
  for (std::size_t n = 0; n < a.size(); ++n)
    if (a[n]) {
      s.X[0](static_cast<Index>(n), 0) = 1.0;
      s.active_set.emplace_back(0, static_cast<Index>(n));
    }
  s.activity = {std::move(a)};
  return s;
}
}  // namespace

TEST_CASE("decision rule") {
  const PosteriorMeanDenoiser eta(0.1, CMatrix::Constant(1, 1, 1.0), CMatrix::Constant(1, 1, 0.2));
  CRow r(1);
  r(0) = 0.0;
  CHECK_FALSE(declare_active(eta, r, 1.0));
  r(0) = 50.0;
  CHECK(declare_active(eta, r, 1.0));
  const double radius = std::sqrt(std::log(6.0) / (1.0 / 0.2 - 1.0 / 1.2));
  r(0) = std::polar(radius * (1.0 - 1e-9), 0.7);
  CHECK_FALSE(declare_active(eta, r, 1.0));
  r(0) = std::polar(radius * (1.0 + 1e-9), 0.7);
  CHECK(declare_active(eta, r, 1.0));
}

TEST_CASE("empirical rate counting") {
  std::vector<std::uint8_t> truth(100, 0), est(100, 0);
  for (int n = 0; n < 10; ++n) truth[n] = 1;
  const auto s = activity_only(truth);
  CHECK(empirical_rates(s, ActivityEstimate{truth}).md == 0.0);
  CHECK(empirical_rates(s, ActivityEstimate{truth}).fa == 0.0);
  CHECK(empirical_rates(s, ActivityEstimate{est}).md == 1.0);
  CHECK(empirical_rates(s, ActivityEstimate{est}).fa == 0.0);
  for (int n = 0; n < 9; ++n) est[n] = 1;
  for (int n = 50; n < 53; ++n) est[n] = 1;
  const auto rates = empirical_rates(s, ActivityEstimate{est});
  CHECK(*rates.md == doctest::Approx(0.1));
  CHECK(*rates.fa == doctest::Approx(1.0 / 30.0));
}

TEST_CASE("mse and power counting") {
  const auto s = activity_only({1, 1, 0});
  CMatrix h = s.X[0];
  CHECK(*empirical_mse_pow(s, ActivityEstimate{{1, 1, 0}}, {h}).mse_d == 0.0);
  h(0, 0) = 0.5;
  h(1, 0) = Complex(1.0, 1.0);
  h(2, 0) = 2.0;
  const auto m = empirical_mse_pow(s, ActivityEstimate{{1, 1, 1}}, {h});
  CHECK(*m.mse_d == doctest::Approx((0.25 + 1.0) / 2.0));
  CHECK(*m.pow_fa == doctest::Approx(4.0));
  h(2, 0) = 0.0;
  CHECK(*empirical_mse_pow(s, ActivityEstimate{{1, 1, 1}}, {h}).pow_fa == 0.0);
}

TEST_CASE("asymptotic metrics: threshold limits and reproducibility") {
  SystemConfig cfg = two_location_config(256, 0.1, 0.1, 0.1);
  cfg.T = 3;
  cfg.mc_samples = 20000;
  const auto se = run_state_evolution(cfg);
  std::vector<PosteriorMeanDenoiser> eta;
  for (Index u = 0; u < 2; ++u) eta.push_back(make_posterior_denoiser(cfg, se, u, cfg.T));
  const RandomStream root(3);
  const auto tiny = asymptotic_metrics(cfg, eta, {1e-300, 1e-300}, 20000, root);
  CHECK(tiny.md.mean == 1.0);
  CHECK(tiny.fa.mean == 0.0);
  const auto huge = asymptotic_metrics(cfg, eta, {1e300, 1e300}, 20000, root);
  CHECK(huge.md.mean == 0.0);
  CHECK(huge.fa.mean == 1.0);

  const auto a = asymptotic_metrics(cfg, eta, cfg.nu, 50000, root);
  const auto b = asymptotic_metrics(cfg, eta, cfg.nu, 50000, root);
  CHECK(a.md.mean == b.md.mean);
  const auto c = asymptotic_metrics(cfg, eta, cfg.nu, 400000, RandomStream(99));
  CHECK(std::abs(a.md.mean - c.md.mean) <= 3.0 * std::hypot(a.md.std_error, c.md.std_error));
  CHECK(std::abs(a.fa.mean - c.fa.mean) <= 3.0 * std::hypot(a.fa.std_error, c.fa.std_error));
  CHECK(std::abs(a.mse_d->mean - c.mse_d->mean) <= 3.0 * std::hypot(a.mse_d->std_error, c.mse_d->std_error));
}

TEST_CASE("R-transform") {
  CHECK(r_transform_G(0.0, 1.5, 0.2) == doctest::Approx(0.3));
  CHECK(r_transform_G(-1e-9, 1.0, 0.1) == doctest::Approx(0.1).epsilon(1e-6));
  for (double x : {-3.0, -0.7, -0.1}) CHECK(r_transform_G(x, 2.0, 1.0) == doctest::Approx(2.0));

  // spectrum of S D D^T S^H at N = 2048, alpha = 1, lambda = 0.1
  RandomStream rng(41);
  const Index n = 2048;
  const auto d = build_dictionary(DictionaryKind::DenseHaar, n, n, rng);
  CMatrix active(n, 0);
  std::vector<Index> cols;
  for (Index k = 0; k < n; ++k)
    if (rng.bernoulli(0.1)) cols.push_back(k);
  const CMatrix& s = d.dense_matrix();
  CMatrix sa(n, static_cast<Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) sa.col(static_cast<Index>(k)) = s.col(cols[k]);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(sa * sa.adjoint(), Eigen::EigenvaluesOnly);
  const std::vector<double> e(eig.eigenvalues().data(), eig.eigenvalues().data() + n);
  const double lam_emp = static_cast<double>(cols.size()) / static_cast<double>(n);
  const double mc = reference::r_transform_from_spectrum(e, -0.5);
  CHECK(std::abs(mc - r_transform_G(-0.5, 1.0, lam_emp)) <= 2e-3);
}

TEST_CASE("genie MMSE") {
  SUBCASE("scalar Wiener filter") {
    SystemConfig cfg = two_location_config(2, 0.5, 0.5, 0.3);
    cfg.U = 1;
    cfg.F = 1;
    cfg.alpha = {1.0};
    cfg.lambda = {0.5};
    cfg.sigma = {CMatrix::Constant(1, 1, 0.7)};
    cfg.nu = {1.0};
    RandomStream rng(2);
    auto dicts = build_dictionaries(cfg, rng);
    SignalRealization sig;
    sig.X = {CMatrix::Zero(2, 1)};
    sig.X[0](1, 0) = Complex(0.4, -0.2);
    sig.activity = {{0, 1}};
    sig.active_set = {{0, 1}};
    const CMatrix y = superpose(dicts, sig.X, CMatrix::Constant(2, 1, Complex(0.1, 0.3)));
    const CVector sv = dicts[0].materialize().col(1);
    const Complex est = 0.7 * (sv.adjoint() * y)(0, 0) / (sv.squaredNorm() * 0.7 + 0.3);
    const double want = std::norm(sig.X[0](1, 0) - est);
    CHECK(*genie_mmse_empirical(y, dicts, sig, cfg) == doctest::Approx(want).epsilon(1e-12));
  }
  SUBCASE("joint Gaussian reference at L = 64") {
    SystemConfig cfg = two_location_config(64, 0.2, 0.3, 0.05);
    const TrialData t = make_trial(cfg, RandomStream(8));
    const CMatrix h = reference::joint_gaussian_genie_estimate(t.observation.Y, t.dictionaries, t.signals, cfg);
    double err = 0.0;
    for (std::size_t k = 0; k < t.signals.active_set.size(); ++k) {
      const auto [u, n] = t.signals.active_set[k];
      err += (t.signals.X[u].row(n) - h.row(static_cast<Index>(k))).squaredNorm();
    }
    err /= static_cast<double>(t.signals.active_set.size());
    CHECK(std::abs(*genie_mmse_empirical(t.observation.Y, t.dictionaries, t.signals, cfg) - err) <= 1e-8);
  }
  SUBCASE("Gaussian limit closes in one step") {
    SystemConfig cfg = two_location_config(64, 1.0, 1.0, 0.1);
    const GenieAsymptotic g = genie_asymptotic(cfg);
    double expect = 0.0;
    for (Index f = 0; f < 4; ++f) {
      const double c = 0.1 + cfg.sigma[0](f, f).real() + cfg.sigma[1](f, f).real();
      CHECK(g.c[f] == doctest::Approx(c).epsilon(1e-12));
      for (Index u = 0; u < 2; ++u) {
        const double tau = cfg.sigma[u](f, f).real();
        expect += tau * (1.0 - tau / c);
      }
    }
    CHECK(g.mmse == doctest::Approx(expect / 2.0).epsilon(1e-10));
  }
  SUBCASE("no information limit") {
    SystemConfig cfg = two_location_config(64, 0.1, 0.2, 1e8);
    CHECK(genie_mmse_asymptotic(cfg) == doctest::Approx(3.0).epsilon(1e-6));
  }
}
