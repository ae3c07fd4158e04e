#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "msamp/denoiser.hpp"
#include "msamp/model.hpp"
#include "msamp/rng.hpp"
#include "msamp/state_evolution.hpp"
#include "msamp/types.hpp"

namespace msamp {

/// <A, B> = A^H B / N for N-row matrices.
CMatrix normalized_inner(const CMatrix& a, const CMatrix& b);

/// V = P_perp B Q^{-1/2} with Q = <P_perp B, P_perp B> and P_perp the projector
/// onto the complement of span(basis); <V, V> = I and <V, basis_i> = 0.
/// Throws NumericalError when Q is singular relative to <B, B> (rel_tol).
CMatrix block_gram_schmidt(const CMatrix& b, const std::vector<CMatrix>& basis, double rel_tol = 1e-10);

/// f_{u,t} for t = 1..T-1, indexed [u][t-1].
using DenoiserSchedule = std::vector<std::vector<DivergenceFreeDenoiser>>;
DenoiserSchedule make_denoiser_schedule(const SystemConfig& config, const TwoTimeCovariance& se);

/// Psi_hat_u^(t), Phi_hat_u^(t), indexed [u][t-1]; each N_u x F.
struct ResidualPath {
  std::vector<std::vector<CMatrix>> psi_hat;
  std::vector<std::vector<CMatrix>> phi_hat;
};

/// Basis lists and inputs of the Gaussian-element dynamics, for inspection.
struct DiceState {
  std::vector<std::vector<CMatrix>> V, V_tilde;  // [u][s-1], s = 1..2T
  std::vector<std::vector<CMatrix>> T_mats, T_tilde_mats;  // [u][t-1]
};

/// Residual dynamics driven by explicit N_u x N_u unitaries O_u:
///   Psi = sqrt(alpha) O T, Z = N - sum_u P Psi, T~ = sqrt(alpha) P^T Z,
///   Phi = O^H T~ + T, T^(t+1) = f_{u,t}(X + Phi) - X, with T^(1) = -X.
/// P keeps the first L rows.
ResidualPath run_residual_dynamics(const SystemConfig& config, const SignalRealization& signals,
                                   const CMatrix& noise, const std::vector<CMatrix>& haar,
                                   const DenoiserSchedule& schedule, int T);

/// i.i.d. CN(0, I_F) elements G_u^(t), G~_u^(t), indexed [u][t-1]; each N_u x F.
struct DiceElements {
  std::vector<std::vector<CMatrix>> G, G_tilde;
};
/// Drawn from substreams ("dice", u, t) of `rng`.
DiceElements draw_dice_elements(const SystemConfig& config, int T, const RandomStream& rng);

/// The same dynamics with every product by O_u or O_u^H replaced by block
/// Gram-Schmidt steps on fresh Gaussian elements; no unitary is formed.
ResidualPath run_householder_dice(const SystemConfig& config, const SignalRealization& signals,
                                  const CMatrix& noise, const DiceElements& elements,
                                  const DenoiserSchedule& schedule, int T, DiceState* state = nullptr);

struct MomentComparison {
  std::string moment;
  double a = 0.0;   // mean under the explicit-unitary dynamics
  double b = 0.0;   // mean under the Gaussian-element dynamics
  double se = 0.0;  // standard error of the paired difference
  bool pass = false;
};

/// Scalar summaries of one path, in a fixed order (names from moment_names).
std::vector<double> path_moments(const ResidualPath& path);
std::vector<std::string> moment_names(Index sources, int T);

struct OracleOptions {
  int T = 2;
  Index seeds = 2000;
  std::uint64_t seed = 1;
  double gate = 3.0;  // standard errors
  unsigned threads = 1;
};

/// Runs both dynamics on `seeds` paired realizations (shared X and noise,
/// independent unitaries / Gaussian elements) and compares every moment.
std::vector<MomentComparison> compare_dynamics(const SystemConfig& config, const TwoTimeCovariance& se,
                                               const OracleOptions& options);

void write_oracle_csv(std::ostream& os, const std::vector<MomentComparison>& rows);

}  // namespace msamp
