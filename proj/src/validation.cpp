#include "msamp/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "msamp/amp.hpp"
#include "msamp/denoiser.hpp"
#include "msamp/detection.hpp"
#include "msamp/dictionary.hpp"
#include "msamp/experiment.hpp"
#include "msamp/linalg.hpp"
#include "msamp/model.hpp"
#include "msamp/oracle.hpp"
#include "msamp/reference.hpp"
#include "msamp/state_evolution.hpp"

namespace msamp {

namespace {

using Clock = std::chrono::steady_clock;

void note(const ValidationOptions& o, const std::string& line) {
  if (o.log) *o.log << "  .. " << line << std::endl;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

// Entry-wise spread of replicate matrices: sqrt(sum_ij Var(re) + Var(im)).
double replicate_frobenius_sd(const std::vector<CMatrix>& reps) {
  const auto n = static_cast<double>(reps.size());
  CMatrix mean = CMatrix::Zero(reps[0].rows(), reps[0].cols());
  for (const auto& r : reps) mean += r;
  mean /= n;
  double ss = 0.0;
  for (const auto& r : reps) ss += (r - mean).squaredNorm();
  return std::sqrt(ss / (n - 1.0));
}

// ---------------------------------------------------------------- 1
CriterionResult dictionaries(const ValidationOptions& o) {
  CriterionResult r{1, "dictionary semi-unitarity and fast/dense agreement", false, {}};
  RandomStream rng = RandomStream(o.seed).substream("criterion1");
  double worst_gram = 0.0, worst_apply = 0.0;
  int built = 0;
  const std::vector<std::pair<Index, Index>> dense_sizes = {{1, 1}, {1, 4}, {3, 5}, {8, 8}, {7, 16}, {16, 24},
                                                            {32, 48}, {64, 64}, {40, 128}, {64, 96}};
  for (const auto& [L, N] : dense_sizes) {
    const auto d = build_dictionary(DictionaryKind::DenseHaar, L, N, rng);
    const CMatrix s = d.dense_matrix();
    worst_gram = std::max(worst_gram, (s * s.adjoint() - d.alpha() * CMatrix::Identity(L, L)).norm());
    const CMatrix x = rng.complex_normal_matrix(N, 3);
    worst_apply = std::max(worst_apply, (d.apply(x) - s * x).cwiseAbs().maxCoeff());
    ++built;
  }
  for (Index N = 2; N <= 128; N *= 2) {
    std::vector<Index> ls = {1, N / 4, N / 2, (3 * N) / 4, N - 1, N};
    std::sort(ls.begin(), ls.end());
    ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
    for (Index L : ls) {
      if (L < 1 || L > 64) continue;
      const auto d = build_dictionary(DictionaryKind::SignedFourier, L, N, rng);
      const CMatrix s = d.materialize();
      worst_gram = std::max(worst_gram, (s * s.adjoint() - d.alpha() * CMatrix::Identity(L, L)).norm());
      const CMatrix ref = reference::dense_signed_fourier(d);
      const CMatrix x = rng.complex_normal_matrix(N, 3);
      const CMatrix z = rng.complex_normal_matrix(L, 3);
      worst_apply = std::max(worst_apply, (d.apply(x) - ref * x).cwiseAbs().maxCoeff());
      worst_apply = std::max(worst_apply, (d.apply_adjoint(z) - ref.adjoint() * z).cwiseAbs().maxCoeff());
      ++built;
    }
  }
  r.pass = worst_gram <= 1e-8 && worst_apply <= 1e-10;
  r.detail = std::to_string(built) + " dictionaries; max ||SS^H - aI||_F = " + fixed(worst_gram) +
             " (gate 1e-8); max |fast - dense| = " + fixed(worst_apply) + " (gate 1e-10)";
  return r;
}

// ---------------------------------------------------------------- 2
// Median apply times of two dictionaries, measured alternately so that drift
// in machine load affects both sizes equally.
std::pair<double, double> interleaved_median_seconds(const SemiUnitaryDictionary& a, const CMatrix& xa,
                                                     const SemiUnitaryDictionary& b, const CMatrix& xb, int reps) {
  CMatrix ya = a.apply(xa), yb = b.apply(xb);  // warm-up
  std::vector<double> ta, tb;
  for (int k = 0; k < reps; ++k) {
    const auto t0 = Clock::now();
    ya = a.apply(xa);
    const auto t1 = Clock::now();
    yb = b.apply(xb);
    const auto t2 = Clock::now();
    ta.push_back(std::chrono::duration<double>(t1 - t0).count());
    tb.push_back(std::chrono::duration<double>(t2 - t1).count());
  }
  std::sort(ta.begin(), ta.end());
  std::sort(tb.begin(), tb.end());
  if (!std::isfinite(std::abs(ya(0, 0)) + std::abs(yb(0, 0)))) throw NumericalError("apply produced non-finite output");
  return {ta[ta.size() / 2], tb[tb.size() / 2]};
}

double available_memory_bytes() {
  std::ifstream in("/proc/meminfo");
  std::string key;
  double kb = 0.0;
  std::string unit;
  while (in >> key >> kb >> unit)
    if (key == "MemAvailable:") return kb * 1024.0;
  return 0.0;
}

CriterionResult complexity(const ValidationOptions& o) {
  CriterionResult r{2, "fast-path complexity (apply time ratio 2^15 vs 2^14)", false, {}};
  RandomStream rng = RandomStream(o.seed).substream("criterion2");
  const Index F = 4;
  const auto f14 = build_dictionary(DictionaryKind::SignedFourier, Index{1} << 14, Index{1} << 14, rng);
  const auto f15 = build_dictionary(DictionaryKind::SignedFourier, Index{1} << 15, Index{1} << 15, rng);
  const auto [f_small, f_large] = interleaved_median_seconds(f14, rng.complex_normal_matrix(Index{1} << 14, F), f15,
                                                             rng.complex_normal_matrix(Index{1} << 15, F), 61);
  const double tf[2] = {f_small, f_large};
  const double ratio_f = tf[1] / tf[0];
  const bool pass_f = ratio_f <= 2.5;

  const double need = 16.0 * std::pow(2.0, 30);  // one 2^15 x 2^15 complex matrix
  const double have = available_memory_bytes();
  bool pass_d = false;
  std::string dense_detail;
  if (have > 1.5 * need) {
    const auto d14 = build_dictionary(DictionaryKind::DenseHaar, Index{1} << 14, Index{1} << 14, rng);
    const auto d15 = build_dictionary(DictionaryKind::DenseHaar, Index{1} << 15, Index{1} << 15, rng);
    const auto [a, b] = interleaved_median_seconds(d14, rng.complex_normal_matrix(Index{1} << 14, F), d15,
                                                   rng.complex_normal_matrix(Index{1} << 15, F), 5);
    const double td[2] = {a, b};
    pass_d = td[1] / td[0] >= 3.2;
    dense_detail = "DenseHaar ratio " + fixed(td[1] / td[0]) + " (gate >= 3.2)";
  } else {
    const auto d10 = build_dictionary(DictionaryKind::DenseHaar, Index{1} << 10, Index{1} << 10, rng);
    const auto d11 = build_dictionary(DictionaryKind::DenseHaar, Index{1} << 11, Index{1} << 11, rng);
    const auto [a, b] = interleaved_median_seconds(d10, rng.complex_normal_matrix(Index{1} << 10, F), d11,
                                                   rng.complex_normal_matrix(Index{1} << 11, F), 15);
    const double td[2] = {a, b};
    dense_detail = "DenseHaar at 2^15 needs " + fixed(need / std::pow(2.0, 30)) + " GiB for one matrix, only " +
                   fixed(have / std::pow(2.0, 30)) + " GiB available: not measured (FAIL). Informational ratio " +
                   "2^11 vs 2^10: " + fixed(td[1] / td[0]);
  }
  r.pass = pass_f && pass_d;
  r.detail = "SignedFourier median apply " + fixed(tf[0] * 1e3) + " ms -> " + fixed(tf[1] * 1e3) + " ms, ratio " +
             fixed(ratio_f) + " (gate <= 2.5, " + (pass_f ? "ok" : "FAIL") + "); " + dense_detail;
  return r;
}

// ---------------------------------------------------------------- 3
CriterionResult divergence_free(const ValidationOptions& o) {
  CriterionResult r{3, "divergence-free property E[f'] = 0", false, {}};
  const RandomStream root = RandomStream(o.seed).substream("criterion3");
  const std::vector<double> lambdas = {0.05, 0.1, 0.3};
  const std::vector<std::pair<double, double>> noise = {{0.01, 0.01}, {0.1, 0.1}, {1.0, 0.5}};
  const CMatrix sigma = wyner_covariances(2, 2, 0.5)[0];
  const CMatrix cross = wyner_covariances(2, 2, 0.5)[1];
  const Index mc = 200000;
  bool all = true;
  double worst = 0.0;
  std::ostringstream d;
  std::size_t idx = 0;
  for (double lam : lambdas)
    for (const auto& [s2, k] : noise) {
      const CMatrix c = s2 * CMatrix::Identity(4, 4) + k * cross;
      const PosteriorMeanDenoiser eta(lam, sigma, c);
      RandomStream rq = root.substream("Q", idx);
      RandomStream rf = root.substream("f", idx);
      const McMatrixEstimate q = jacobian_expectation_Q(eta, mc, rq);
      const McMatrixEstimate div = divergence_expectation(eta, q, mc, rf);
      const double norm = div.mean.norm();
      const double se = div.frobenius_std_error();
      const bool ok = norm <= 3.0 * se;
      all = all && ok;
      worst = std::max(worst, norm / se);
      d << "\n    lambda=" << lam << " sigma2=" << s2 << " trC=" << fixed(c.trace().real()) << ": ||E f'||_F="
        << fixed(norm) << " se=" << fixed(se) << (ok ? " ok" : " FAIL");
      ++idx;
    }
  r.pass = all;
  r.detail = "max ||E f'||_F / se = " + fixed(worst) + " (gate 3)" + d.str();
  return r;
}

// ---------------------------------------------------------------- 4
CriterionResult denoiser_quadrature(const ValidationOptions& o) {
  CriterionResult r{4, "F=1 posterior mean and likelihood ratio vs quadrature", false, {}};
  RandomStream rng = RandomStream(o.seed).substream("criterion4");
  const double lam = 0.1, sig = 1.0, c = 0.2;
  const PosteriorMeanDenoiser eta(lam, CMatrix::Constant(1, 1, sig), CMatrix::Constant(1, 1, c));
  double worst_eta = 0.0, worst_lr = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double scale = 0.5 + 1.5 * rng.uniform();
    const Complex rv = scale * rng.complex_normal();
    CRow row(1);
    row(0) = rv;
    const auto q = reference::scalar_posterior_quadrature(rv, lam, sig, c);
    worst_eta = std::max(worst_eta, std::abs(eta.eta(row)(0) - q.mean));
    worst_lr = std::max(worst_lr, std::abs(eta.likelihood_ratio(row) - q.likelihood_ratio) / q.likelihood_ratio);
  }
  CRow one(1);
  one(0) = 1.0;
  const double closed = 6.0 * std::exp(-25.0 / 6.0);
  const double lr_one = std::abs(eta.likelihood_ratio(one) - closed) / closed;
  r.pass = worst_eta <= 1e-6 && worst_lr <= 1e-6 && lr_one <= 1e-12;
  r.detail = "20 inputs: max |eta - quad| = " + fixed(worst_eta) + ", max rel |Lambda - quad| = " + fixed(worst_lr) +
             " (gate 1e-6); Lambda(1) vs 6 exp(-25/6): rel " + fixed(lr_one);
  return r;
}

// ---------------------------------------------------------------- 5
CriterionResult se_base_case(const ValidationOptions& o) {
  CriterionResult r{5, "state-evolution base case t = 1", false, {}};
  SystemConfig wyner = two_location_config(256, 0.1, 0.1, 0.1);
  wyner.T = 1;
  wyner.seed = o.seed;
  SystemConfig sym = wyner;
  sym.sigma = {CMatrix::Identity(4, 4), CMatrix::Identity(4, 4)};
  double worst_psi = 0.0, worst_phi = 0.0;
  std::ostringstream d;
  for (const SystemConfig* cfg : {&sym, &wyner}) {
    const TwoTimeCovariance se = run_state_evolution(*cfg);
    for (Index u = 0; u < 2; ++u) {
      const CMatrix psi_exact = cfg->alpha[u] * cfg->lambda[u] * cfg->sigma[u];
      const CMatrix phi_exact =
          cfg->noise_var * CMatrix::Identity(4, 4) + cfg->alpha[1 - u] * cfg->lambda[1 - u] * cfg->sigma[1 - u];
      worst_psi = std::max(worst_psi, (se.psi(u, 1, 1) - psi_exact).norm());
      worst_phi = std::max(worst_phi, (se.phi(u, 1, 1) - phi_exact).norm());
      d << "\n    " << (cfg == &sym ? "Sigma=I_4" : "Wyner") << " u=" << u + 1 << ": diag C_phi(1,1) = "
        << se.phi(u, 1, 1).diagonal().real().transpose();
    }
  }
  const TwoTimeCovariance se_sym = run_state_evolution(sym);
  const double sym_02 = std::max((se_sym.phi(0, 1, 1) - 0.2 * CMatrix::Identity(4, 4)).norm(),
                                 (se_sym.phi(1, 1, 1) - 0.2 * CMatrix::Identity(4, 4)).norm());
  r.pass = worst_psi <= 1e-12 && worst_phi <= 1e-12 && sym_02 <= 1e-12;
  r.detail = "max ||C_psi(1,1) - a lambda Sigma||_F = " + fixed(worst_psi) + ", max ||C_phi(1,1) - exact||_F = " +
             fixed(worst_phi) + ", ||C_phi(1,1) - 0.2 I_4||_F (Sigma = I_4) = " + fixed(sym_02) + d.str();
  return r;
}

// ---------------------------------------------------------------- 6
SystemConfig criterion6_config(const ValidationOptions& o) {
  SystemConfig c = two_location_config(4096, 0.1, 0.1, 0.1);
  c.dict_kind = DictionaryKind::DenseHaar;
  c.seed = RandomStream(o.seed).substream("criterion6").seed();
  return c;
}

CriterionResult decoupling(const ValidationOptions& o) {
  CriterionResult r{6, "decoupling at L = 4096 (equal-time 5%, two-time 10%)", false, {}};
  const SystemConfig cfg = criterion6_config(o);
  const TwoTimeCovariance se = run_state_evolution(cfg);
  note(o, "state evolution done");
  const TrialData trial = make_trial(cfg, RandomStream(cfg.seed).substream("instance"));
  note(o, "instance drawn");
  const AmpTrajectory traj = run_amp(trial.observation.Y, trial.dictionaries, cfg, se);
  const int T = cfg.T;
  bool ok = true;
  std::ostringstream d;
  for (Index u = 0; u < cfg.U; ++u) {
    const CMatrix eq = empirical_error_covariance(traj.at(T), traj.at(T), trial.signals, u);
    const CMatrix two = empirical_error_covariance(traj.at(T), traj.at(T - 1), trial.signals, u);
    const double e_eq = relative_frobenius_error(eq, se.phi(u, T, T));
    const double e_two = relative_frobenius_error(two, se.phi(u, T, T - 1));
    ok = ok && e_eq <= 0.05 && e_two <= 0.10;
    d << "\n    u=" << u + 1 << ": equal-time rel err " << fixed(e_eq) << " (gate 0.05), two-time (T,T-1) rel err "
      << fixed(e_two) << " (gate 0.10); tr C_phi(T,T) = " << fixed(se.phi(u, T, T).trace().real());
  }
  r.pass = ok;
  r.detail = "DenseHaar, lambda = (0.1, 0.1), sigma2 = 0.1, T = 10" + d.str();
  return r;
}

// ---------------------------------------------------------------- 7
CriterionResult dynamics_moments(const ValidationOptions& o) {
  CriterionResult r{7, "explicit-unitary vs Gaussian-element dynamics moments", false, {}};
  SystemConfig cfg;
  cfg.L = 48;
  cfg.U = 2;
  cfg.F = 2;
  cfg.alpha = {1.0, 1.0};
  cfg.lambda = {0.1, 0.1};
  cfg.sigma = wyner_covariances(2, 1, 0.5);
  cfg.noise_var = 0.1;
  cfg.T = 2;
  cfg.nu = {1.0, 1.0};
  cfg.seed = RandomStream(o.seed).substream("criterion7").seed();
  const TwoTimeCovariance se = run_state_evolution(cfg);
  OracleOptions opt;
  opt.T = 2;
  opt.seeds = 2000;
  opt.seed = cfg.seed;
  opt.threads = o.threads;
  const auto rows = compare_dynamics(cfg, se, opt);
  int fails = 0;
  double worst = 0.0;
  std::ostringstream d;
  int exact = 0;
  for (const auto& m : rows) {
    if (std::abs(m.a - m.b) <= 1e-12 * (1.0 + std::abs(m.a) + std::abs(m.b))) {
      ++exact;  // preserved by both dynamics up to round-off
    } else {
      worst = std::max(worst, std::abs(m.a - m.b) / m.se);
    }
    if (!m.pass) {
      ++fails;
      d << "\n    FAIL " << m.moment << ": A=" << fixed(m.a) << " B=" << fixed(m.b) << " se=" << fixed(m.se);
    }
  }
  r.pass = fails == 0;
  r.detail = "U=2 F=2 T=2 N=48, 2000 paired seeds, " + std::to_string(rows.size()) + " moments, " +
             std::to_string(fails) + " outside 3 se, " + std::to_string(exact) +
             " equal to round-off, max |z| of the others = " + fixed(worst) + d.str();
  return r;
}

// ---------------------------------------------------------------- 8
CriterionResult rates(const ValidationOptions& o) {
  CriterionResult r{8, "empirical vs asymptotic detection rates at L = 4096", false, {}};
  ExperimentSpec spec;
  spec.base = two_location_config(4096, 0.1, 0.1, 0.1);
  spec.base.seed = RandomStream(o.seed).substream("criterion8").seed();
  spec.grid = {0.1, 0.2, 0.3};
  spec.lambda_mode = LambdaMode::Product;
  spec.dict_kinds = {DictionaryKind::DenseHaar, DictionaryKind::SignedFourier};
  spec.with_genie = false;
  spec.asymptotic_mc = 200000;
  spec.threads = o.threads;
  const auto rows = run_experiment(spec);
  bool ok = true;
  std::ostringstream d;
  for (const auto& row : rows) {
    const auto& rep = row.report;
    const double md_e = rep.rates.md.value_or(std::nan(""));
    const double fa_e = rep.rates.fa.value_or(std::nan(""));
    const double md_se = std::hypot(binomial_std_error(md_e, rep.counts.active), rep.asymptotic.md.std_error);
    const double fa_se = std::hypot(binomial_std_error(fa_e, rep.counts.inactive), rep.asymptotic.fa.std_error);
    const double md_gate = std::max(0.02, 3.0 * md_se);
    const double fa_gate = std::max(0.02, 3.0 * fa_se);
    const bool pt = std::abs(md_e - rep.asymptotic.md.mean) <= md_gate && std::abs(fa_e - rep.asymptotic.fa.mean) <= fa_gate;
    ok = ok && pt;
    d << "\n    " << row.point << ' ' << to_string(row.kind) << ": md " << fixed(md_e) << " vs " << fixed(rep.asymptotic.md.mean)
      << " (gate " << fixed(md_gate, 3) << "), fa " << fixed(fa_e) << " vs " << fixed(rep.asymptotic.fa.mean) << " (gate "
      << fixed(fa_gate, 3) << ")" << (pt ? "" : " FAIL");
  }
  r.pass = ok;
  r.detail = "3x3 lambda grid, both dictionary kinds, sigma2 = 0.1, nu = 1" + d.str();
  return r;
}

// ---------------------------------------------------------------- 9
CriterionResult channel_estimation(const ValidationOptions& o) {
  CriterionResult r{9, "channel-estimation MSE vs theory and genie MMSE at sigma2 = 0.01", false, {}};
  ExperimentSpec spec;
  spec.base = two_location_config(8192, 0.1, 0.1, 0.01);
  spec.base.dict_kind = DictionaryKind::SignedFourier;
  spec.base.seed = RandomStream(o.seed).substream("criterion9").seed();
  spec.grid = {0.1, 0.2, 0.3};
  spec.with_genie = false;
  spec.asymptotic_mc = 200000;
  spec.threads = o.threads;
  const auto rows = run_experiment(spec);
  note(o, "L = 8192 grid done");
  const auto points = expand_grid(spec);

  bool ok = true;
  int used = 0;
  std::ostringstream d;
  for (std::size_t p = 0; p < rows.size(); ++p) {
    const auto& rep = rows[p].report;
    const Index detected = rep.counts.active - rep.counts.missed;
    if (rep.asymptotic.md.mean > 1e-2 || detected < 1000 || !rep.asymptotic.mse_d || !rep.mse_pow.mse_d) {
      d << "\n    " << rows[p].point << ": skipped (md_inf " << fixed(rep.asymptotic.md.mean) << ", |A^d| " << detected << ")";
      continue;
    }
    ++used;
    const double mse_inf = rep.asymptotic.mse_d->mean;
    const double e1 = std::abs(*rep.mse_pow.mse_d - mse_inf) / mse_inf;

    SystemConfig small = points[p].config;
    small.L = 2048;
    const double genie_inf = genie_mmse_asymptotic(small);
    double sum = 0.0;
    int n = 0;
    for (int k = 0; k < 4; ++k) {
      const TrialData t = make_trial(small, RandomStream(spec.base.seed).substream("genie", p, k));
      const auto g = genie_mmse_empirical(t.observation.Y, t.dictionaries, t.signals, small);
      if (g) {
        sum += *g;
        ++n;
      }
    }
    const double genie_emp = sum / n;
    const double e2 = std::abs(genie_emp - genie_inf) / genie_inf;
    const double e3 = std::abs(mse_inf - genie_inf) / genie_inf;
    const bool pt = e1 <= 0.10 && e2 <= 0.05 && e3 <= 0.10;
    ok = ok && pt;
    d << "\n    " << rows[p].point << ": mse_e " << fixed(*rep.mse_pow.mse_d) << " mse_inf " << fixed(mse_inf) << " (rel "
      << fixed(e1, 3) << "), genie_emp(L=2048) " << fixed(genie_emp) << " genie_inf " << fixed(genie_inf) << " (rel "
      << fixed(e2, 3) << "), mse_inf vs genie rel " << fixed(e3, 3) << (pt ? "" : " FAIL");
  }
  r.pass = ok && used > 0;
  r.detail = std::to_string(used) + " operating points with md_inf <= 1e-2 (SignedFourier, L = 8192)" + d.str();
  return r;
}

// ---------------------------------------------------------------- 10
CriterionResult rs_consistency(const ValidationOptions& o) {
  CriterionResult r{10, "replica-symmetric consistency C_psi = mmse (I - Q)^-1 at alpha = 1", false, {}};
  const std::vector<std::pair<double, double>> points = {{0.1, 0.1}, {0.2, 0.2}, {0.1, 0.3}, {0.3, 0.3}};
  const int reps = 10;
  const Index mc = 100000;
  bool ok = true;
  std::ostringstream d;
  for (std::size_t p = 0; p < points.size(); ++p) {
    SystemConfig cfg = two_location_config(4096, points[p].first, points[p].second, 0.1);
    const int T = cfg.T;
    double drift = 0.0;
    std::vector<std::vector<CMatrix>> per_rep(static_cast<std::size_t>(reps));
    parallel_for(static_cast<std::size_t>(reps), o.threads, [&](std::size_t k) {
      SystemConfig c = cfg;
      c.seed = RandomStream(o.seed).substream("criterion10", p, k).seed();
      const TwoTimeCovariance se = run_state_evolution(c);
      for (Index u = 0; u < c.U; ++u) {
        const PosteriorMeanDenoiser eta = make_posterior_denoiser(c, se, u, T - 1);
        RandomStream rm = RandomStream(c.seed).substream("mmse", static_cast<std::uint64_t>(u));
        const CMatrix mmse = posterior_mse(eta, mc, rm).mean;
        const CMatrix m = checked_inverse(CMatrix::Identity(c.F, c.F) - se.q(u, T), "I - Q");
        per_rep[k].push_back(se.psi(u, T, T) - mmse * m);
        if (k == 0) drift = std::max(drift, relative_frobenius_error(se.phi(u, T, T), se.phi(u, T - 1, T - 1)));
      }
    });
    for (Index u = 0; u < 2; ++u) {
      std::vector<CMatrix> v;
      for (const auto& rep : per_rep) v.push_back(rep[static_cast<std::size_t>(u)]);
      const double sd = replicate_frobenius_sd(v);
      const double norm = v[0].norm();
      const bool pt = norm <= 3.0 * sd;
      ok = ok && pt;
      d << "\n    lambda=(" << points[p].first << "," << points[p].second << ") u=" << u + 1 << ": ||residual||_F "
        << fixed(norm) << ", se " << fixed(sd) << (pt ? "" : " FAIL");
    }
    d << " [C_phi drift T-1 -> T: " << fixed(drift, 3) << "]";
  }
  r.pass = ok;
  r.detail = "standard errors from " + std::to_string(reps) + " independent SE replicates" + d.str();
  return r;
}

// ---------------------------------------------------------------- 11
CriterionResult identity(const ValidationOptions& o) {
  CriterionResult r{11, "(I - Q)^-1 = I + C_phi^-1 C_psi / alpha at every iteration", false, {}};
  const SystemConfig base = criterion6_config(o);
  const int T = base.T;
  const int reps = 10;
  // T + 1 iterations give C_psi^(T+1,T+1); the first T blocks equal those of
  // the criterion-6 run because the streams are keyed by (u, t).
  std::vector<std::vector<CMatrix>> resid(static_cast<std::size_t>(reps));
  parallel_for(static_cast<std::size_t>(reps), o.threads, [&](std::size_t k) {
    SystemConfig c = base;
    c.T = T + 1;
    if (k > 0) c.seed = RandomStream(o.seed).substream("criterion11", k).seed();
    const TwoTimeCovariance se = run_state_evolution(c);
    for (int t = 1; t <= T; ++t)
      for (Index u = 0; u < c.U; ++u) {
        const CMatrix eye = CMatrix::Identity(c.F, c.F);
        const CMatrix lhs = checked_inverse(eye - se.q(u, t + 1), "I - Q");
        const CMatrix rhs = eye + checked_inverse(se.phi(u, t, t), "C_phi") * se.psi(u, t + 1, t + 1) / c.alpha[u];
        resid[k].push_back(lhs - rhs);
      }
  });
  bool ok = true;
  double worst = 0.0;
  std::ostringstream d;
  std::size_t idx = 0;
  for (int t = 1; t <= T; ++t)
    for (Index u = 0; u < base.U; ++u, ++idx) {
      std::vector<CMatrix> v;
      for (const auto& rep : resid) v.push_back(rep[idx]);
      const double sd = replicate_frobenius_sd(v);
      const double z = v[0].norm() / sd;
      worst = std::max(worst, z);
      if (z > 3.0) {
        ok = false;
        d << "\n    FAIL t=" << t << " u=" << u + 1 << ": ||residual||_F " << fixed(v[0].norm()) << ", se " << fixed(sd);
      }
    }
  r.pass = ok;
  r.detail = "t = 1..10, both sources; max ||residual||_F / se = " + fixed(worst) + " (gate 3, se from " +
             std::to_string(reps) + " replicates)" + d.str();
  return r;
}

}  // namespace

std::vector<int> all_criteria() { return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}; }

CriterionResult run_criterion(int id, const ValidationOptions& options) {
  const auto t0 = Clock::now();
  CriterionResult r;
  try {
    switch (id) {
      case 1: r = dictionaries(options); break;
      case 2: r = complexity(options); break;
      case 3: r = divergence_free(options); break;
      case 4: r = denoiser_quadrature(options); break;
      case 5: r = se_base_case(options); break;
      case 6: r = decoupling(options); break;
      case 7: r = dynamics_moments(options); break;
      case 8: r = rates(options); break;
      case 9: r = channel_estimation(options); break;
      case 10: r = rs_consistency(options); break;
      case 11: r = identity(options); break;
      default: throw std::invalid_argument("unknown criterion " + std::to_string(id));
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    r.id = id;
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream s;
  s << (r.pass ? "[PASS] " : "[FAIL] ") << "criterion " << r.id << ": " << r.name << " ("
    << std::fixed << std::setprecision(1) << r.seconds << " s)\n    " << r.detail;
  return s.str();
}

}  // namespace msamp
