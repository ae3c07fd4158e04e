#pragma once

#include <vector>

#include "msamp/types.hpp"

namespace msamp {

/// Monte-Carlo mean of a matrix-valued quantity with per-entry standard errors.
///
/// `row_cov[i]` holds E[(v - Ev)^H (v - Ev)] for row i of the sampled matrix,
/// which is enough to propagate the error through a right multiplication.
struct McMatrixEstimate {
  CMatrix mean;
  RMatrix std_error;  // sqrt((Var Re + Var Im) / n) per entry
  std::vector<CMatrix> row_cov;
  Index samples = 0;

  /// sqrt(sum of squared entry standard errors).
  double frobenius_std_error() const { return std_error.norm(); }
  /// Estimate of E[V] M for a fixed matrix M.
  McMatrixEstimate right_multiply(const CMatrix& m) const;
};

/// Accumulates sample matrices of a fixed shape.
class McMatrixAccumulator {
 public:
  McMatrixAccumulator(Index rows, Index cols);

  void add(const CMatrix& sample);
  McMatrixEstimate finish() const;

 private:
  Index n_ = 0;
  CMatrix sum_;
  std::vector<CMatrix> row_second_;
};

/// Mean and standard error of a scalar sample.
struct McScalar {
  double mean = 0.0;
  double std_error = 0.0;
};

class McScalarAccumulator {
 public:
  void add(double v) {
    ++n_;
    sum_ += v;
    sum_sq_ += v * v;
  }
  McScalar finish() const;
  Index count() const { return n_; }

 private:
  Index n_ = 0;
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
};

}  // namespace msamp
