#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "msamp/types.hpp"

namespace msamp {

/// Seeded pseudo-random stream with deterministic labeled substreams.
///
/// A substream is keyed by (parent seed, label, indices) only, never by how
/// many numbers the parent has already produced, so components that draw from
/// their own substreams are reproducible regardless of evaluation order.
///
/// Derivation: child = splitmix64(parent ^ fnv1a64(label)) folded with each
/// index via child = splitmix64(child + 0x9e3779b97f4a7c15 * (index + 1)).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  RandomStream substream(std::string_view label) const;
  RandomStream substream(std::string_view label, std::uint64_t i) const;
  RandomStream substream(std::string_view label, std::uint64_t i, std::uint64_t j) const;

  double uniform();
  double normal();
  bool bernoulli(double p);
  int sign();
  // Circularly-symmetric complex Gaussian with E|z|^2 = 1.
  Complex complex_normal();
  // rows x cols matrix of i.i.d. CN(0, 1) entries.
  CMatrix complex_normal_matrix(Index rows, Index cols);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view text);

}  // namespace msamp
