#include <doctest.h>

#include <sstream>

#include "msamp/config_io.hpp"
#include "msamp/linalg.hpp"
#include "msamp/model.hpp"

using namespace msamp;

TEST_CASE("wyner covariances") {
  const auto s = wyner_covariances(2, 2, 0.5);
  REQUIRE(s.size() == 2);
  CHECK((s[0].diagonal().real() - RVector{{1.0, 1.0, 0.5, 0.5}}).norm() == 0.0);
  CHECK((s[1].diagonal().real() - RVector{{0.5, 0.5, 1.0, 1.0}}).norm() == 0.0);
  const auto z = wyner_covariances(2, 2, 0.0);
  CHECK((z[0].diagonal().real() - RVector{{1.0, 1.0, 0.0, 0.0}}).norm() == 0.0);
  const auto four = wyner_covariances(2, 2, 0.5, four_location_gains(0.5));
  REQUIRE(four.size() == 4);
  CHECK(four[0] == four[2]);
  CHECK(four[1] == four[3]);
}

TEST_CASE("signal sampling") {
  SystemConfig cfg = two_location_config(10000, 0.1, 1e-12, 0.1);
  cfg.L = 10000;
  RandomStream rng(9);
  const auto sig = sample_signals(cfg, rng);
  Index active = 0;
  for (Index n = 0; n < 10000; ++n) {
    const bool a = sig.activity[0][static_cast<std::size_t>(n)] != 0;
    active += a;
    CHECK((sig.X[0].row(n).norm() == 0.0) == !a);
  }
  CHECK(std::abs(static_cast<double>(active) - 1000.0) <= 3.0 * std::sqrt(10000 * 0.09));
  CHECK(sig.X[1].norm() == 0.0);

  SystemConfig big = two_location_config(20000, 0.5, 0.5, 0.1);
  RandomStream r2(10);
  const auto s2 = sample_signals(big, r2);
  CMatrix cov = CMatrix::Zero(4, 4);
  Index k = 0;
  for (Index n = 0; n < 20000; ++n)
    if (s2.activity[0][static_cast<std::size_t>(n)]) {
      cov += s2.X[0].row(n).adjoint() * s2.X[0].row(n);
      ++k;
    }
  cov /= static_cast<double>(k);
  CHECK(k >= 9000);
  CHECK(relative_frobenius_error(cov, big.sigma[0]) <= 0.05);
}

TEST_CASE("observation synthesis") {
  SystemConfig cfg = two_location_config(16, 0.3, 0.3, 0.1);
  RandomStream rng(4);
  auto dicts = build_dictionaries(cfg, rng);
  const auto sig = sample_signals(cfg, rng);
  const Observation obs = synthesize_observation(cfg, dicts, sig, rng);
  const CMatrix dense = obs.noise + dicts[0].materialize() * sig.X[0] + dicts[1].materialize() * sig.X[1];
  CHECK((obs.Y - dense).cwiseAbs().maxCoeff() <= 1e-12);

  SystemConfig one = cfg;
  one.U = 1;
  one.alpha = {1.0};
  one.lambda = {0.5};
  one.sigma = {cfg.sigma[0]};
  one.nu = {1.0};
  one.noise_var = 0.0;
  auto d1 = build_dictionaries(one, rng);
  const auto s1 = sample_signals(one, rng);
  const Observation o1 = synthesize_observation(one, d1, s1, rng);
  CHECK(std::abs(o1.Y.norm() - s1.X[0].norm()) <= 1e-10);
  SignalRealization none;
  none.X = {CMatrix::Zero(16, 4)};
  none.activity = {std::vector<std::uint8_t>(16, 0)};
  one.noise_var = 0.0;
  const Observation zero = synthesize_observation(one, d1, none, rng);
  CHECK(zero.Y.norm() == 0.0);
}

TEST_CASE("config validation and text round trip") {
  SystemConfig cfg = two_location_config(64, 0.1, 0.2, 0.05, 2.0);
  cfg.dict_kind = DictionaryKind::SignedFourier;
  cfg.sigma[1](0, 1) = Complex(0.1, 0.2);
  cfg.sigma[1](1, 0) = Complex(0.1, -0.2);
  cfg.seed = 77;
  std::stringstream ss;
  write_config(ss, cfg);
  const SystemConfig back = read_config(ss);
  CHECK(config_hash(back) == config_hash(cfg));
  CHECK(back.L == 64);
  CHECK(back.alpha[0] == 2.0);
  CHECK(back.sigma[1] == cfg.sigma[1]);
  CHECK(back.dict_kind == DictionaryKind::SignedFourier);

  SystemConfig bad = cfg;
  bad.lambda[0] = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.alpha[0] = 1.01;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  std::stringstream junk("L = 64\nbogus = 3\n");
  CHECK_THROWS(read_config(junk));
}
