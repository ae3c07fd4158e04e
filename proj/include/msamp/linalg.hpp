#pragma once

#include <string>

#include "msamp/types.hpp"

namespace msamp {

/// (A + A^H) / 2
CMatrix hermitize(const CMatrix& a);

/// Principal square root of a Hermitian PSD matrix. Eigenvalues are clamped at
/// max(0, e) before the root is taken.
CMatrix hermitian_sqrt(const CMatrix& a);

/// A^{-1/2} of a Hermitian positive-definite matrix. Throws NumericalError when
/// the smallest eigenvalue is at or below `rel_tol` times the largest.
CMatrix hermitian_inv_sqrt(const CMatrix& a, double rel_tol = 1e-12);

/// log det(A) for Hermitian positive-definite A via Cholesky.
double log_det_hpd(const CMatrix& a);

/// Inverse of a square matrix; throws NumericalError naming `what` when the
/// matrix is numerically singular (reciprocal condition below `rcond_min`).
CMatrix checked_inverse(const CMatrix& a, const std::string& what, double rcond_min = 1e-13);

/// Smallest eigenvalue of the Hermitian part of `a`.
double min_hermitian_eigenvalue(const CMatrix& a);

/// ||a - b||_F / ||b||_F
double relative_frobenius_error(const CMatrix& a, const CMatrix& b);

/// Human-readable dump used in error messages.
std::string to_string(const CMatrix& a);

}  // namespace msamp
