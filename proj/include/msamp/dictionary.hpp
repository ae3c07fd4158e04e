#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "msamp/fft.hpp"
#include "msamp/rng.hpp"
#include "msamp/types.hpp"

namespace msamp {

enum class DictionaryKind { DenseHaar, SignedFourier };

std::string to_string(DictionaryKind kind);
/// Accepts "haar"/"dense" and "fourier"/"signed-fourier".
DictionaryKind parse_dictionary_kind(const std::string& text);

/// Haar-distributed n x n unitary: QR of an i.i.d. CN(0,1) matrix, with Q
/// right-multiplied by the phases of diag(R).
CMatrix sample_haar_unitary(Index n, RandomStream& rng);

/// L x N semi-unitary dictionary S = sqrt(alpha) P O with alpha = N / L, so
/// that S S^H = alpha I_L.
///
/// DenseHaar keeps S explicitly (first L rows of a Haar unitary).
/// SignedFourier keeps only the sign vector s and the kept-row selection; O is
/// diag(s) F diag(s) with F the unitary DFT, applied through a radix-2 FFT.
///
/// Immutable after construction; apply/apply_adjoint are const and thread-safe.
class SemiUnitaryDictionary {
 public:
  /// Wraps an explicit L x N matrix already scaled by sqrt(alpha).
  static SemiUnitaryDictionary from_dense(CMatrix scaled_rows);
  static SemiUnitaryDictionary from_signed_fourier(Index rows, std::vector<std::int8_t> signs,
                                                   std::vector<Index> selection);

  DictionaryKind kind() const { return kind_; }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  double alpha() const { return static_cast<double>(cols_) / static_cast<double>(rows_); }

  const CMatrix& dense_matrix() const;
  const std::vector<std::int8_t>& signs() const { return signs_; }
  const std::vector<Index>& selection() const { return selection_; }

  /// S X for X of shape N x F.
  CMatrix apply(const CMatrix& x) const;
  /// S^H Z for Z of shape L x F.
  CMatrix apply_adjoint(const CMatrix& z) const;
  /// Explicit L x N matrix; for SignedFourier built column by column from apply.
  CMatrix materialize() const;

  /// Little-endian dump of a SignedFourier dictionary:
  ///   bytes 0-7   magic "MSAMPSF1"
  ///   u64         rows L
  ///   u64         cols N
  ///   N x i8      signs (+1 / -1)
  ///   L x u64     selection (0-based column indices of the kept rows)
  void write_binary(std::ostream& out) const;
  static SemiUnitaryDictionary read_binary(std::istream& in);

 private:
  SemiUnitaryDictionary() = default;

  DictionaryKind kind_ = DictionaryKind::DenseHaar;
  Index rows_ = 0;
  Index cols_ = 0;
  CMatrix dense_;
  std::vector<std::int8_t> signs_;
  std::vector<Index> selection_;
  std::shared_ptr<const Radix2Fft> fft_;
};

/// DenseHaar: sqrt(alpha) times the first L rows of a fresh Haar unitary.
/// SignedFourier: i.i.d. uniform signs and L rows chosen uniformly without
/// replacement; N must be a power of two.
SemiUnitaryDictionary build_dictionary(DictionaryKind kind, Index rows, Index cols,
                                       RandomStream& rng);

}  // namespace msamp
