#include "msamp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "msamp/amp.hpp"
#include "msamp/config_io.hpp"

namespace msamp {

const char* library_version() { return "0.1.0"; }

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

TrialData make_trial(const SystemConfig& config, const RandomStream& rng) {
  TrialData d;
  RandomStream rd = rng.substream("dictionaries");
  d.dictionaries = build_dictionaries(config, rd);
  RandomStream rs = rng.substream("signals");
  d.signals = sample_signals(config, rs);
  RandomStream rn = rng.substream("noise");
  d.observation = synthesize_observation(config, d.dictionaries, d.signals, rn);
  return d;
}

SweepAxis parse_sweep_axis(const std::string& text) {
  if (text == "lambda") return SweepAxis::Lambda;
  if (text == "nu") return SweepAxis::Nu;
  if (text == "L") return SweepAxis::L;
  throw std::invalid_argument("unknown sweep axis '" + text + "' (expected lambda|nu|L)");
}

LambdaMode parse_lambda_mode(const std::string& text) {
  if (text == "product") return LambdaMode::Product;
  if (text == "uniform") return LambdaMode::Uniform;
  if (text == "alternating") return LambdaMode::Alternating;
  throw std::invalid_argument("unknown lambda mode '" + text + "' (expected product|uniform|alternating)");
}

void ExperimentSpec::validate() const {
  base.validate();
  if (grid.empty()) throw std::invalid_argument("experiment: grid must be nonempty");
  if (trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
  if (asymptotic_mc < 2) throw std::invalid_argument("experiment: asymptotic_mc must be >= 2");
}

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

}  // namespace

std::vector<GridPoint> expand_grid(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<GridPoint> out;
  const Index U = spec.base.U;
  switch (spec.axis) {
    case SweepAxis::Lambda: {
      std::vector<std::vector<double>> points;
      if (spec.lambda_mode == LambdaMode::Uniform) {
        for (double g : spec.grid) points.emplace_back(static_cast<std::size_t>(U), g);
      } else {
        const Index free = spec.lambda_mode == LambdaMode::Product ? U : std::min<Index>(U, 2);
        std::vector<std::size_t> idx(static_cast<std::size_t>(free), 0);
        while (true) {
          std::vector<double> lam(static_cast<std::size_t>(U));
          for (Index u = 0; u < U; ++u) lam[static_cast<std::size_t>(u)] = spec.grid[idx[static_cast<std::size_t>(u % free)]];
          points.push_back(lam);
          std::size_t k = 0;
          while (k < idx.size() && ++idx[k] == spec.grid.size()) idx[k++] = 0;
          if (k == idx.size()) break;
        }
      }
      for (const auto& lam : points) {
        GridPoint p;
        p.config = spec.base;
        p.config.lambda = lam;
        p.label = "lambda=";
        for (std::size_t u = 0; u < lam.size(); ++u) p.label += (u ? "/" : "") + fmt(lam[u]);
        out.push_back(p);
      }
      break;
    }
    case SweepAxis::Nu:
      for (double g : spec.grid) {
        GridPoint p;
        p.config = spec.base;
        p.config.nu.assign(static_cast<std::size_t>(U), g);
        p.label = "nu=" + fmt(g);
        out.push_back(p);
      }
      break;
    case SweepAxis::L:
      for (double g : spec.grid) {
        GridPoint p;
        p.config = spec.base;
        p.config.L = static_cast<Index>(std::llround(g));
        p.label = "L=" + std::to_string(p.config.L);
        out.push_back(p);
      }
      break;
  }
  for (auto& p : out) p.config.validate();
  return out;
}

std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec) {
  const std::vector<GridPoint> points = expand_grid(spec);
  const std::vector<DictionaryKind> kinds =
      spec.dict_kinds.empty() ? std::vector<DictionaryKind>{spec.base.dict_kind} : spec.dict_kinds;
  const RandomStream root(spec.base.seed);

  std::vector<TwoTimeCovariance> se(points.size());
  std::vector<AsymptoticMetrics> asym(points.size());
  std::vector<double> genie_inf(points.size(), std::nan(""));
  parallel_for(points.size(), spec.threads, [&](std::size_t p) {
    try {
      SeOptions opt;
      opt.seed = root.substream("point", p).seed();
      se[p] = run_state_evolution(points[p].config, opt);
      std::vector<PosteriorMeanDenoiser> eta;
      for (Index u = 0; u < points[p].config.U; ++u)
        eta.push_back(make_posterior_denoiser(points[p].config, se[p], u, points[p].config.T));
      asym[p] = asymptotic_metrics(points[p].config, eta, points[p].config.nu, spec.asymptotic_mc,
                                   root.substream("asymptotic", p));
      if (spec.with_genie) genie_inf[p] = genie_mmse_asymptotic(points[p].config);
    } catch (const std::exception& e) {
      throw std::runtime_error("grid point " + points[p].label + ": " + e.what());
    }
  });

  const std::size_t tasks = points.size() * kinds.size();
  std::vector<ExperimentRow> rows(tasks);
  parallel_for(tasks, spec.threads, [&](std::size_t task) {
    const std::size_t p = task / kinds.size();
    SystemConfig config = points[p].config;
    config.dict_kind = kinds[task % kinds.size()];
    ExperimentRow& row = rows[task];
    row.point = points[p].label;
    row.kind = config.dict_kind;
    double genie_sum = 0.0;
    Index genie_n = 0;
    try {
      for (Index k = 0; k < spec.trials; ++k) {
        const TrialData trial = make_trial(config, root.substream("trial", p, static_cast<std::uint64_t>(k)));
        AmpOptions opt;
        opt.store_all = false;
        const AmpTrajectory traj = run_amp(trial.observation.Y, trial.dictionaries, config, se[p], opt);
        std::vector<PosteriorMeanDenoiser> eta;
        for (Index u = 0; u < config.U; ++u) eta.push_back(make_posterior_denoiser(config, se[p], u, config.T));
        const ActivityEstimate est = detect(traj.final().R, eta, config.nu);
        row.report.counts += count_detection(trial.signals, est, estimate_channels(traj.final().R, eta));
        if (spec.with_genie) {
          const auto g = genie_mmse_empirical(trial.observation.Y, trial.dictionaries, trial.signals, config);
          if (g) {
            genie_sum += *g;
            ++genie_n;
          }
        }
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("grid point " + points[p].label + " (" + to_string(config.dict_kind) + "): " + e.what());
    }
    row.report.rates = empirical_rates(row.report.counts);
    row.report.mse_pow = empirical_mse_pow(row.report.counts);
    row.report.asymptotic = asym[p];
    row.report.genie_mmse_inf = genie_inf[p];
    if (genie_n > 0) row.report.genie_mmse_emp = genie_sum / static_cast<double>(genie_n);
  });
  return rows;
}

void write_experiment_csv(std::ostream& os, const ExperimentSpec& spec, const std::vector<ExperimentRow>& rows) {
  const std::string hash = config_hash(spec.base);
  os << "# config=" << hash << " version=" << library_version() << " trials=" << spec.trials
     << " asymptotic_mc=" << spec.asymptotic_mc << '\n';
  os << "config_hash,point,dict," << detection_csv_header() << '\n';
  for (const auto& r : rows)
    os << hash << ',' << r.point << ',' << to_string(r.kind) << ',' << detection_csv_values(r.report) << '\n';
}

void write_rates_svg(std::ostream& os, const std::vector<ExperimentRow>& rows) {
  const double w = 640, h = 400, m = 50;
  double ymax = 1e-3;
  for (const auto& r : rows) {
    ymax = std::max({ymax, r.report.asymptotic.md.mean, r.report.asymptotic.fa.mean,
                     r.report.rates.md.value_or(0.0), r.report.rates.fa.value_or(0.0)});
  }
  const std::size_t n = rows.size();
  auto x_of = [&](std::size_t i) { return m + (w - 2 * m) * (n > 1 ? double(i) / double(n - 1) : 0.5); };
  auto y_of = [&](double v) { return h - m - (h - 2 * m) * v / ymax; };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << m << "\" y1=\"" << h - m << "\" x2=\"" << w - m << "\" y2=\"" << h - m << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\"" << h - m << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << m << "\" y=\"" << m - 10 << "\" font-size=\"12\">max " << ymax << "</text>\n";
  struct Series {
    const char* color;
    bool dashed;
    std::function<double(const ExperimentRow&)> get;
  };
  const std::vector<Series> series = {
      {"blue", true, [](const ExperimentRow& r) { return r.report.asymptotic.md.mean; }},
      {"red", true, [](const ExperimentRow& r) { return r.report.asymptotic.fa.mean; }},
      {"blue", false, [](const ExperimentRow& r) { return r.report.rates.md.value_or(0.0); }},
      {"red", false, [](const ExperimentRow& r) { return r.report.rates.fa.value_or(0.0); }},
  };
  for (const auto& s : series) {
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\"" << (s.dashed ? " stroke-dasharray=\"5,4\"" : "")
       << " points=\"";
    for (std::size_t i = 0; i < n; ++i) os << x_of(i) << ',' << y_of(s.get(rows[i])) << ' ';
    os << "\"/>\n";
  }
  for (std::size_t i = 0; i < n; ++i)
    os << "<text x=\"" << x_of(i) << "\" y=\"" << h - m + 15 << "\" font-size=\"8\" text-anchor=\"middle\">"
       << rows[i].point << "</text>\n";
  os << "<text x=\"" << w - m - 200 << "\" y=\"" << m << "\" font-size=\"11\">blue md, red fa; dashed theory</text>\n";
  os << "</svg>\n";
}

}  // namespace msamp
