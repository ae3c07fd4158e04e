#pragma once

#include <vector>

#include "msamp/dictionary.hpp"
#include "msamp/model.hpp"
#include "msamp/types.hpp"

// Slow, independent reference computations used by the validation suite and
// the tests. None of them call into the code they are compared against.
namespace msamp::reference {

/// sqrt(alpha) P diag(s) F diag(s) built entry by entry from
/// F_jk = exp(-2 pi i j k / N) / sqrt(N).
CMatrix dense_signed_fourier(const SemiUnitaryDictionary& d);

/// Scalar (F = 1) Bernoulli-Gaussian posterior by two-dimensional adaptive
/// quadrature over the channel h ~ CN(0, sigma).
struct ScalarPosterior {
  Complex mean;             // E[x | r]
  double likelihood_ratio;  // p(r | inactive) / p(r | active)
};
ScalarPosterior scalar_posterior_quadrature(Complex r, double lambda, double sigma, double c);

/// Conditional mean of H given Y with known active set, from the full L x L
/// observation covariance S D S^H + sigma^2 I of each column.
CMatrix joint_gaussian_genie_estimate(const CMatrix& Y, const std::vector<SemiUnitaryDictionary>& dictionaries,
                                      const SignalRealization& truth, const SystemConfig& config);

/// R-transform at w < 0 of the empirical measure of `eigenvalues`, by solving
/// g(z) = w for the Cauchy transform g(z) = mean 1 / (z - e) on z < min(e)
/// and returning z - 1 / w.
double r_transform_from_spectrum(const std::vector<double>& eigenvalues, double w);

}  // namespace msamp::reference
