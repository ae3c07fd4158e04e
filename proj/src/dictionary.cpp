#include "msamp/dictionary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

namespace msamp {

std::string to_string(DictionaryKind kind) {
  return kind == DictionaryKind::DenseHaar ? "haar" : "fourier";
}

DictionaryKind parse_dictionary_kind(const std::string& text) {
  if (text == "haar" || text == "dense" || text == "DenseHaar") return DictionaryKind::DenseHaar;
  if (text == "fourier" || text == "signed-fourier" || text == "SignedFourier")
    return DictionaryKind::SignedFourier;
  throw std::invalid_argument("unknown dictionary kind '" + text + "' (expected haar|fourier)");
}

CMatrix sample_haar_unitary(Index n, RandomStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_haar_unitary: dimension must be >= 1");
  CMatrix g = rng.complex_normal_matrix(n, n);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    q.col(j) *= mag > 0.0 ? d / mag : Complex(1.0, 0.0);
  }
  return q;
}

SemiUnitaryDictionary SemiUnitaryDictionary::from_dense(CMatrix scaled_rows) {
  if (scaled_rows.rows() < 1 || scaled_rows.rows() > scaled_rows.cols())
    throw std::invalid_argument("dictionary: need 1 <= L <= N");
  SemiUnitaryDictionary d;
  d.kind_ = DictionaryKind::DenseHaar;
  d.rows_ = scaled_rows.rows();
  d.cols_ = scaled_rows.cols();
  d.dense_ = std::move(scaled_rows);
  d.selection_.resize(static_cast<std::size_t>(d.rows_));
  std::iota(d.selection_.begin(), d.selection_.end(), Index{0});
  return d;
}

SemiUnitaryDictionary SemiUnitaryDictionary::from_signed_fourier(Index rows,
                                                                 std::vector<std::int8_t> signs,
                                                                 std::vector<Index> selection) {
  const auto cols = static_cast<Index>(signs.size());
  if (rows < 1 || rows > cols) throw std::invalid_argument("dictionary: need 1 <= L <= N");
  if (!is_power_of_two(cols))
    throw std::invalid_argument("dictionary: signed-Fourier length " + std::to_string(cols) +
                                " is not a power of two");
  if (static_cast<Index>(selection.size()) != rows)
    throw std::invalid_argument("dictionary: selection must list exactly L rows");
  for (auto s : signs)
    if (s != 1 && s != -1) throw std::invalid_argument("dictionary: signs must be +1 or -1");
  std::unordered_set<Index> seen;
  for (auto k : selection) {
    if (k < 0 || k >= cols || !seen.insert(k).second)
      throw std::invalid_argument("dictionary: selection entries must be distinct and < N");
  }
  SemiUnitaryDictionary d;
  d.kind_ = DictionaryKind::SignedFourier;
  d.rows_ = rows;
  d.cols_ = cols;
  d.signs_ = std::move(signs);
  d.selection_ = std::move(selection);
  d.fft_ = std::make_shared<const Radix2Fft>(cols);
  return d;
}

const CMatrix& SemiUnitaryDictionary::dense_matrix() const {
  if (kind_ != DictionaryKind::DenseHaar)
    throw std::logic_error("dense_matrix: dictionary is not DenseHaar");
  return dense_;
}

CMatrix SemiUnitaryDictionary::apply(const CMatrix& x) const {
  require_shape(x.rows() == cols_, "apply: expected " + std::to_string(cols_) + " rows, got " +
                                       std::to_string(x.rows()));
  if (kind_ == DictionaryKind::DenseHaar) return dense_ * x;

  const double scale = std::sqrt(alpha() / static_cast<double>(cols_));
  CMatrix out(rows_, x.cols());
  std::vector<Complex> buf(static_cast<std::size_t>(cols_));
  for (Index f = 0; f < x.cols(); ++f) {
    for (Index n = 0; n < cols_; ++n)
      buf[static_cast<std::size_t>(n)] =
          static_cast<double>(signs_[static_cast<std::size_t>(n)]) * x(n, f);
    fft_->forward(buf);
    for (Index l = 0; l < rows_; ++l) {
      const auto k = static_cast<std::size_t>(selection_[static_cast<std::size_t>(l)]);
      out(l, f) = scale * static_cast<double>(signs_[k]) * buf[k];
    }
  }
  return out;
}

CMatrix SemiUnitaryDictionary::apply_adjoint(const CMatrix& z) const {
  require_shape(z.rows() == rows_, "apply_adjoint: expected " + std::to_string(rows_) +
                                       " rows, got " + std::to_string(z.rows()));
  if (kind_ == DictionaryKind::DenseHaar) return dense_.adjoint() * z;

  const double scale = std::sqrt(alpha() / static_cast<double>(cols_));
  CMatrix out(cols_, z.cols());
  std::vector<Complex> buf(static_cast<std::size_t>(cols_));
  for (Index f = 0; f < z.cols(); ++f) {
    std::fill(buf.begin(), buf.end(), Complex(0.0, 0.0));
    for (Index l = 0; l < rows_; ++l) {
      const auto k = static_cast<std::size_t>(selection_[static_cast<std::size_t>(l)]);
      buf[k] = static_cast<double>(signs_[k]) * z(l, f);
    }
    fft_->inverse(buf);
    for (Index n = 0; n < cols_; ++n)
      out(n, f) = scale * static_cast<double>(signs_[static_cast<std::size_t>(n)]) *
                  buf[static_cast<std::size_t>(n)];
  }
  return out;
}

CMatrix SemiUnitaryDictionary::materialize() const {
  if (kind_ == DictionaryKind::DenseHaar) return dense_;
  return apply(CMatrix::Identity(cols_, cols_));
}

namespace {

constexpr std::array<char, 8> kMagic = {'M', 'S', 'A', 'M', 'P', 'S', 'F', '1'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<unsigned char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b.data()), 8);
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> b{};
  in.read(reinterpret_cast<char*>(b.data()), 8);
  if (!in) throw std::runtime_error("dictionary dump: truncated input");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

}  // namespace

void SemiUnitaryDictionary::write_binary(std::ostream& out) const {
  if (kind_ != DictionaryKind::SignedFourier)
    throw std::logic_error("write_binary: only SignedFourier dictionaries have a compact dump");
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, static_cast<std::uint64_t>(rows_));
  put_u64(out, static_cast<std::uint64_t>(cols_));
  out.write(reinterpret_cast<const char*>(signs_.data()), static_cast<std::streamsize>(signs_.size()));
  for (auto k : selection_) put_u64(out, static_cast<std::uint64_t>(k));
  if (!out) throw std::runtime_error("dictionary dump: write failed");
}

SemiUnitaryDictionary SemiUnitaryDictionary::read_binary(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw std::runtime_error("dictionary dump: bad magic");
  const auto rows = static_cast<Index>(get_u64(in));
  const auto cols = static_cast<Index>(get_u64(in));
  if (rows < 1 || cols < rows || cols > (Index{1} << 40))
    throw std::runtime_error("dictionary dump: implausible dimensions");
  std::vector<std::int8_t> signs(static_cast<std::size_t>(cols));
  in.read(reinterpret_cast<char*>(signs.data()), static_cast<std::streamsize>(cols));
  if (!in) throw std::runtime_error("dictionary dump: truncated input");
  std::vector<Index> selection(static_cast<std::size_t>(rows));
  for (auto& k : selection) k = static_cast<Index>(get_u64(in));
  return from_signed_fourier(rows, std::move(signs), std::move(selection));
}

SemiUnitaryDictionary build_dictionary(DictionaryKind kind, Index rows, Index cols,
                                       RandomStream& rng) {
  if (rows < 1 || rows > cols)
    throw std::invalid_argument("build_dictionary: need 1 <= L <= N (L=" + std::to_string(rows) +
                                ", N=" + std::to_string(cols) + ")");
  const double alpha = static_cast<double>(cols) / static_cast<double>(rows);
  if (kind == DictionaryKind::DenseHaar) {
    CMatrix o = sample_haar_unitary(cols, rng);
    return SemiUnitaryDictionary::from_dense(std::sqrt(alpha) * o.topRows(rows));
  }
  if (!is_power_of_two(cols))
    throw std::invalid_argument("build_dictionary: signed-Fourier length " + std::to_string(cols) +
                                " is not a power of two");
  std::vector<std::int8_t> signs(static_cast<std::size_t>(cols));
  for (auto& s : signs) s = static_cast<std::int8_t>(rng.sign());
  std::vector<Index> perm(static_cast<std::size_t>(cols));
  std::iota(perm.begin(), perm.end(), Index{0});
  // Partial Fisher-Yates: the first L entries are a uniform L-subset in random order.
  for (Index i = 0; i < rows; ++i) {
    std::uniform_int_distribution<Index> pick(i, cols - 1);
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng.engine()))]);
  }
  perm.resize(static_cast<std::size_t>(rows));
  return SemiUnitaryDictionary::from_signed_fourier(rows, std::move(signs), std::move(perm));
}

}  // namespace msamp
