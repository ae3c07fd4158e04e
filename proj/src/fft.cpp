#include "msamp/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace msamp {

bool is_power_of_two(Index n) { return n >= 1 && (n & (n - 1)) == 0; }

Radix2Fft::Radix2Fft(Index n) : n_(n) {
  if (!is_power_of_two(n))
    throw std::invalid_argument("Radix2Fft: length " + std::to_string(n) +
                                " is not a power of two");
  int bits = 0;
  while ((Index{1} << bits) < n) ++bits;
  bit_reverse_.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    Index r = 0;
    for (int b = 0; b < bits; ++b)
      if (i & (Index{1} << b)) r |= Index{1} << (bits - 1 - b);
    bit_reverse_[static_cast<std::size_t>(i)] = r;
  }
  twiddles_.resize(static_cast<std::size_t>(n / 2));
  for (Index k = 0; k < n / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    twiddles_[static_cast<std::size_t>(k)] = {std::cos(angle), std::sin(angle)};
  }
}

void Radix2Fft::transform(std::span<Complex> data, bool inverse) const {
  if (static_cast<Index>(data.size()) != n_)
    throw ShapeError("Radix2Fft: buffer length does not match transform length");
  for (Index i = 0; i < n_; ++i) {
    const Index r = bit_reverse_[static_cast<std::size_t>(i)];
    if (i < r) std::swap(data[static_cast<std::size_t>(i)], data[static_cast<std::size_t>(r)]);
  }
  for (Index len = 2; len <= n_; len <<= 1) {
    const Index half = len / 2;
    const Index stride = n_ / len;
    for (Index start = 0; start < n_; start += len) {
      for (Index k = 0; k < half; ++k) {
        Complex w = twiddles_[static_cast<std::size_t>(k * stride)];
        if (inverse) w = std::conj(w);
        Complex& a = data[static_cast<std::size_t>(start + k)];
        Complex& b = data[static_cast<std::size_t>(start + k + half)];
        const Complex t = w * b;
        b = a - t;
        a += t;
      }
    }
  }
}

}  // namespace msamp
