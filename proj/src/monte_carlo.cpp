#include "msamp/monte_carlo.hpp"

#include <algorithm>
#include <cmath>

namespace msamp {

McMatrixEstimate McMatrixEstimate::right_multiply(const CMatrix& m) const {
  require_shape(m.rows() == mean.cols(), "right_multiply: inner dimensions differ");
  McMatrixEstimate out;
  out.samples = samples;
  out.mean = mean * m;
  out.std_error.resize(mean.rows(), m.cols());
  for (std::size_t i = 0; i < row_cov.size(); ++i) {
    CMatrix k = m.adjoint() * row_cov[i] * m;
    for (Index j = 0; j < m.cols(); ++j)
      out.std_error(static_cast<Index>(i), j) =
          std::sqrt(std::max(0.0, k(j, j).real()) / static_cast<double>(std::max<Index>(samples, 1)));
    out.row_cov.push_back(std::move(k));
  }
  return out;
}

McMatrixAccumulator::McMatrixAccumulator(Index rows, Index cols)
    : sum_(CMatrix::Zero(rows, cols)), row_second_(static_cast<std::size_t>(rows), CMatrix::Zero(cols, cols)) {}

void McMatrixAccumulator::add(const CMatrix& sample) {
  require_shape(sample.rows() == sum_.rows() && sample.cols() == sum_.cols(),
                "McMatrixAccumulator: sample shape changed");
  ++n_;
  sum_ += sample;
  for (Index i = 0; i < sample.rows(); ++i)
    row_second_[static_cast<std::size_t>(i)].noalias() += sample.row(i).adjoint() * sample.row(i);
}

McMatrixEstimate McMatrixAccumulator::finish() const {
  McMatrixEstimate out;
  out.samples = n_;
  const double n = static_cast<double>(std::max<Index>(n_, 1));
  out.mean = sum_ / n;
  out.std_error.resize(sum_.rows(), sum_.cols());
  for (Index i = 0; i < sum_.rows(); ++i) {
    const CRow mu = out.mean.row(i);
    CMatrix cov = row_second_[static_cast<std::size_t>(i)] / n - mu.adjoint() * mu;
    if (n_ > 1) cov *= n / (n - 1.0);
    for (Index j = 0; j < sum_.cols(); ++j)
      out.std_error(i, j) = std::sqrt(std::max(0.0, cov(j, j).real()) / n);
    out.row_cov.push_back(std::move(cov));
  }
  return out;
}

McScalar McScalarAccumulator::finish() const {
  McScalar out;
  if (n_ == 0) return out;
  const double n = static_cast<double>(n_);
  out.mean = sum_ / n;
  if (n_ > 1) {
    const double var = std::max(0.0, (sum_sq_ - n * out.mean * out.mean) / (n - 1.0));
    out.std_error = std::sqrt(var / n);
  }
  return out;
}

}  // namespace msamp
