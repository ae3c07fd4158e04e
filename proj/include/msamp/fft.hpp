#pragma once

#include <span>
#include <vector>

#include "msamp/types.hpp"

namespace msamp {

bool is_power_of_two(Index n);

/// In-place iterative radix-2 FFT for one fixed power-of-two length.
///
/// forward computes y_k = sum_j x_j e^{-2 pi i jk/N}; inverse uses e^{+2 pi i jk/N}.
/// Neither is normalized.
class Radix2Fft {
 public:
  explicit Radix2Fft(Index n);

  Index size() const { return n_; }
  void forward(std::span<Complex> data) const { transform(data, false); }
  void inverse(std::span<Complex> data) const { transform(data, true); }

 private:
  void transform(std::span<Complex> data, bool inverse) const;

  Index n_;
  std::vector<Index> bit_reverse_;
  std::vector<Complex> twiddles_;  // e^{-2 pi i k / n}, k < n/2
};

}  // namespace msamp
