#include "msamp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace msamp {

CMatrix hermitize(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

CMatrix hermitian_sqrt(const CMatrix& a) {
  require_shape(a.rows() == a.cols(), "hermitian_sqrt: matrix must be square");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitize(a));
  RVector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().adjoint();
}

CMatrix hermitian_inv_sqrt(const CMatrix& a, double rel_tol) {
  require_shape(a.rows() == a.cols(), "hermitian_inv_sqrt: matrix must be square");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitize(a));
  const RVector& ev = eig.eigenvalues();
  const double top = std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  if (ev.minCoeff() <= rel_tol * top || top == 0.0) {
    throw NumericalError("hermitian_inv_sqrt: matrix is not positive definite, eigenvalues " +
                         to_string(ev.cast<Complex>().transpose()));
  }
  RVector inv_root = ev.cwiseSqrt().cwiseInverse();
  return eig.eigenvectors() * inv_root.asDiagonal() * eig.eigenvectors().adjoint();
}

double log_det_hpd(const CMatrix& a) {
  Eigen::LLT<CMatrix> llt(hermitize(a));
  if (llt.info() != Eigen::Success)
    throw NumericalError("log_det_hpd: matrix is not positive definite:\n" + to_string(a));
  const auto& l = llt.matrixLLT();
  double acc = 0.0;
  for (Index i = 0; i < l.rows(); ++i) acc += std::log(l(i, i).real());
  return 2.0 * acc;
}

CMatrix checked_inverse(const CMatrix& a, const std::string& what, double rcond_min) {
  require_shape(a.rows() == a.cols(), what + ": matrix must be square");
  Eigen::PartialPivLU<CMatrix> lu(a);
  const double rc = lu.rcond();
  if (!(rc > rcond_min))
    throw NumericalError(what + ": matrix is singular (rcond=" + std::to_string(rc) + "):\n" +
                         to_string(a));
  return lu.inverse();
}

double min_hermitian_eigenvalue(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitize(a), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

double relative_frobenius_error(const CMatrix& a, const CMatrix& b) {
  const double denom = b.norm();
  return denom > 0.0 ? (a - b).norm() / denom : (a - b).norm();
}

std::string to_string(const CMatrix& a) {
  std::ostringstream os;
  os.precision(6);
  os << a;
  return os.str();
}

}  // namespace msamp
