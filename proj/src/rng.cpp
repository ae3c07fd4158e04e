#include "msamp/rng.hpp"

#include <cmath>

namespace msamp {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {
std::uint64_t fold(std::uint64_t h, std::uint64_t i) {
  return splitmix64(h + 0x9e3779b97f4a7c15ULL * (i + 1));
}
}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

RandomStream RandomStream::substream(std::string_view label) const {
  return RandomStream(splitmix64(seed_ ^ fnv1a64(label)));
}

RandomStream RandomStream::substream(std::string_view label, std::uint64_t i) const {
  return RandomStream(fold(splitmix64(seed_ ^ fnv1a64(label)), i));
}

RandomStream RandomStream::substream(std::string_view label, std::uint64_t i,
                                     std::uint64_t j) const {
  return RandomStream(fold(fold(splitmix64(seed_ ^ fnv1a64(label)), i), j));
}

double RandomStream::uniform() { return uniform_(engine_); }

double RandomStream::normal() { return normal_(engine_); }

bool RandomStream::bernoulli(double p) { return uniform() < p; }

int RandomStream::sign() { return (engine_() >> 63) ? 1 : -1; }

Complex RandomStream::complex_normal() {
  static const double kScale = std::sqrt(0.5);
  const double re = normal();
  const double im = normal();
  return {kScale * re, kScale * im};
}

CMatrix RandomStream::complex_normal_matrix(Index rows, Index cols) {
  CMatrix out(rows, cols);
  // Row-major fill order so that the i-th row is the same whatever the width.
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) out(i, j) = complex_normal();
  return out;
}

}  // namespace msamp
