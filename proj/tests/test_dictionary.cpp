#include <doctest.h>

#include <cmath>

#include "msamp/dictionary.hpp"
#include "msamp/fft.hpp"
#include "msamp/monte_carlo.hpp"
#include "msamp/reference.hpp"

using namespace msamp;

TEST_CASE("haar unitary: unit modulus, unitarity, second moment") {
  RandomStream rng(11);
  const CMatrix o1 = sample_haar_unitary(1, rng);
  CHECK(std::abs(std::abs(o1(0, 0)) - 1.0) < 1e-15);
  for (Index n : {2, 5, 17, 64}) {
    const CMatrix o = sample_haar_unitary(n, rng);
    CHECK((o.adjoint() * o - CMatrix::Identity(n, n)).norm() <= 1e-10);
  }
  McScalarAccumulator acc;
  for (int k = 0; k < 100000; ++k) acc.add(std::norm(sample_haar_unitary(4, rng)(0, 0)));
  const McScalar m = acc.finish();
  CHECK(std::abs(m.mean - 0.25) <= 3.0 * m.std_error);
}

TEST_CASE("fft matches the direct sum") {
  RandomStream rng(3);
  for (Index n : {1, 2, 8, 64}) {
    const Radix2Fft fft(n);
    std::vector<Complex> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = rng.complex_normal();
    std::vector<Complex> y = x;
    fft.forward(y);
    double err = 0.0;
    for (Index k = 0; k < n; ++k) {
      Complex s = 0.0;
      for (Index j = 0; j < n; ++j)
        s += x[static_cast<std::size_t>(j)] *
             std::polar(1.0, -2.0 * M_PI * static_cast<double>((j * k) % n) / static_cast<double>(n));
      err = std::max(err, std::abs(s - y[static_cast<std::size_t>(k)]));
    }
    CHECK(err < 1e-11);
    fft.inverse(y);
    for (Index j = 0; j < n; ++j)
      CHECK(std::abs(y[static_cast<std::size_t>(j)] / static_cast<double>(n) - x[static_cast<std::size_t>(j)]) < 1e-12);
  }
}

TEST_CASE("semi-unitary dictionaries") {
  RandomStream rng(5);
  SUBCASE("dense square") {
    const auto d = build_dictionary(DictionaryKind::DenseHaar, 8, 8, rng);
    CHECK(d.alpha() == 1.0);
    const CMatrix s = d.materialize();
    CHECK((s * s.adjoint() - CMatrix::Identity(8, 8)).norm() <= 1e-10);
  }
  SUBCASE("fourier alpha = 2") {
    const auto d = build_dictionary(DictionaryKind::SignedFourier, 32, 64, rng);
    const CMatrix s = d.materialize();
    CHECK((s * s.adjoint() - 2.0 * CMatrix::Identity(32, 32)).norm() <= 1e-10);
    for (auto v : d.signs()) CHECK(std::abs(v) == 1);
    auto sel = d.selection();
    std::sort(sel.begin(), sel.end());
    CHECK(std::adjacent_find(sel.begin(), sel.end()) == sel.end());
  }
  SUBCASE("full signed fourier is unitary") {
    const auto d = build_dictionary(DictionaryKind::SignedFourier, 64, 64, rng);
    const CMatrix o = reference::dense_signed_fourier(d);
    CHECK((o.adjoint() * o - CMatrix::Identity(64, 64)).norm() <= 1e-12);
  }
  SUBCASE("zero input") {
    const auto d = build_dictionary(DictionaryKind::SignedFourier, 24, 32, rng);
    CHECK(d.apply(CMatrix::Zero(32, 3)).norm() == 0.0);
    const auto h = build_dictionary(DictionaryKind::DenseHaar, 24, 32, rng);
    CHECK(h.apply(CMatrix::Zero(32, 3)).norm() == 0.0);
  }
  SUBCASE("square fourier round trip") {
    const auto d = build_dictionary(DictionaryKind::SignedFourier, 16, 16, rng);
    const CMatrix x = rng.complex_normal_matrix(16, 2);
    CHECK((d.apply_adjoint(d.apply(x)) - x).cwiseAbs().maxCoeff() <= 1e-10);
  }
  SUBCASE("fast path vs dense reference") {
    const auto d = build_dictionary(DictionaryKind::SignedFourier, 24, 32, rng);
    const CMatrix ref = reference::dense_signed_fourier(d);
    const CMatrix x = rng.complex_normal_matrix(32, 4);
    const CMatrix z = rng.complex_normal_matrix(24, 4);
    CHECK((d.apply(x) - ref * x).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((d.apply_adjoint(z) - ref.adjoint() * z).cwiseAbs().maxCoeff() <= 1e-10);
  }
  SUBCASE("bad shapes") {
    CHECK_THROWS(build_dictionary(DictionaryKind::DenseHaar, 9, 8, rng));
    CHECK_THROWS(build_dictionary(DictionaryKind::SignedFourier, 8, 24, rng));
  }
}
