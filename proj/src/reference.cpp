#include "msamp/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace msamp::reference {

CMatrix dense_signed_fourier(const SemiUnitaryDictionary& d) {
  if (d.kind() != DictionaryKind::SignedFourier)
    throw std::invalid_argument("dense_signed_fourier: dictionary is not signed-Fourier");
  const Index n = d.cols();
  const double scale = std::sqrt(d.alpha() / static_cast<double>(n));
  CMatrix s(d.rows(), n);
  for (Index i = 0; i < d.rows(); ++i) {
    const Index j = d.selection()[static_cast<std::size_t>(i)];
    for (Index k = 0; k < n; ++k) {
      // Reduce j k mod n first so the angle stays accurate for large n.
      const auto jk = static_cast<double>((j * k) % n);
      const double angle = -2.0 * std::numbers::pi * jk / static_cast<double>(n);
      s(i, k) = scale * static_cast<double>(d.signs()[static_cast<std::size_t>(j)] * d.signs()[static_cast<std::size_t>(k)]) *
                Complex(std::cos(angle), std::sin(angle));
    }
  }
  return s;
}

ScalarPosterior scalar_posterior_quadrature(Complex r, double lambda, double sigma, double c) {
  using boost::math::quadrature::gauss_kronrod;
  const double inf = std::numeric_limits<double>::infinity();
  const double pi = std::numbers::pi;
  // Densities of CN(0, v) on the complex plane.
  auto density = [pi](double re, double im, double v) { return std::exp(-(re * re + im * im) / v) / (pi * v); };
  auto integrate2 = [&](auto&& fn) {
    auto inner = [&](double a) {
      return gauss_kronrod<double, 61>::integrate([&](double b) { return fn(a, b); }, -inf, inf, 15, 1e-13);
    };
    return gauss_kronrod<double, 61>::integrate(inner, -inf, inf, 15, 1e-13);
  };
  // p(r | active) = int p(h) g(r - h; c) dh and its first moment in h.
  const double p_active = integrate2([&](double a, double b) {
    return density(a, b, sigma) * density(r.real() - a, r.imag() - b, c);
  });
  const double m_re = integrate2([&](double a, double b) {
    return a * density(a, b, sigma) * density(r.real() - a, r.imag() - b, c);
  });
  const double m_im = integrate2([&](double a, double b) {
    return b * density(a, b, sigma) * density(r.real() - a, r.imag() - b, c);
  });
  const double p_null = density(r.real(), r.imag(), c);
  const double evidence = lambda * p_active + (1.0 - lambda) * p_null;
  ScalarPosterior out;
  out.mean = lambda * Complex(m_re, m_im) / evidence;
  out.likelihood_ratio = p_null / p_active;
  return out;
}

CMatrix joint_gaussian_genie_estimate(const CMatrix& Y, const std::vector<SemiUnitaryDictionary>& dictionaries,
                                      const SignalRealization& truth, const SystemConfig& config) {
  const auto k = static_cast<Index>(truth.active_set.size());
  std::vector<CMatrix> dense;
  for (const auto& d : dictionaries) dense.push_back(d.materialize());
  CMatrix s(config.L, k);
  RMatrix tau(k, config.F);
  for (Index j = 0; j < k; ++j) {
    const auto [u, n] = truth.active_set[static_cast<std::size_t>(j)];
    s.col(j) = dense[static_cast<std::size_t>(u)].col(n);
    tau.row(j) = config.sigma[static_cast<std::size_t>(u)].diagonal().real().transpose();
  }
  CMatrix est(k, config.F);
  for (Index f = 0; f < config.F; ++f) {
    const CMatrix dmat = tau.col(f).cast<Complex>().asDiagonal();
    CMatrix cov_y = s * dmat * s.adjoint();
    cov_y.diagonal().array() += config.noise_var;
    const CMatrix cov_hy = dmat * s.adjoint();
    est.col(f) = cov_hy * cov_y.ldlt().solve(Y.col(f));
  }
  return est;
}

double r_transform_from_spectrum(const std::vector<double>& eigenvalues, double w) {
  if (!(w < 0.0)) throw std::invalid_argument("r_transform_from_spectrum: w must be negative");
  const double emin = *std::min_element(eigenvalues.begin(), eigenvalues.end());
  auto g = [&](double z) {
    long double acc = 0.0L;
    for (double e : eigenvalues) acc += 1.0L / (z - e);
    return static_cast<double>(acc / static_cast<long double>(eigenvalues.size()));
  };
  // g is negative and decreasing on (-inf, emin): bracket and bisect.
  double hi = emin - 1e-12 * std::max(1.0, std::abs(emin));
  double lo = emin - 1.0;
  while (g(lo) < w) lo = emin - 2.0 * (emin - lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) < w) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi) - 1.0 / w;
}

}  // namespace msamp::reference
