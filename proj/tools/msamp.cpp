// Command-line front end: run, se, oracle, validate, gen-config.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "msamp/config_io.hpp"
#include "msamp/experiment.hpp"
#include "msamp/oracle.hpp"
#include "msamp/state_evolution.hpp"
#include "msamp/validation.hpp"

namespace {

using namespace msamp;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string dict;
};

SystemConfig load_base(const Common& c) {
  SystemConfig cfg = c.config.empty() ? two_location_config(256, 0.1, 0.1, 0.1) : read_config_file(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.dict.empty() && c.dict != "both") cfg.dict_kind = parse_dictionary_kind(c.dict);
  cfg.validate();
  return cfg;
}

// Writes to --out when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open " + path + " for writing");
    }
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void add_common(CLI::App* app, Common& c, bool with_dict) {
  app->add_option("--config", c.config, "system config file (default: 2-location, L=256)");
  app->add_option("--out", c.out, "output path (default: stdout)");
  app->add_option("--seed", c.seed, "override the config seed");
  app->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  if (with_dict) app->add_option("--dict", c.dict, "dictionary kind")->check(CLI::IsMember({"haar", "fourier", "both"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-source AMP simulator"};
  app.require_subcommand(1);

  Common run_c;
  ExperimentSpec spec;
  std::vector<double> lambda_grid, nu_grid, l_grid;
  std::string lambda_mode = "product";
  std::string svg;
  bool no_genie = false;
  auto* run = app.add_subcommand("run", "sweep a grid and write detection metrics as CSV");
  add_common(run, run_c, true);
  run->add_option("--trials", spec.trials, "AMP instances per grid point")->check(CLI::PositiveNumber);
  auto* lg = run->add_option("--lambda-grid", lambda_grid, "activity grid");
  auto* ng = run->add_option("--nu-grid", nu_grid, "threshold grid");
  auto* Lg = run->add_option("--L-grid", l_grid, "observation-length grid");
  lg->excludes(ng)->excludes(Lg);
  ng->excludes(Lg);
  run->add_option("--lambda-mode", lambda_mode, "product | uniform | alternating");
  run->add_option("--asymptotic-mc", spec.asymptotic_mc, "Monte-Carlo samples for the asymptotic metrics");
  run->add_flag("--no-genie", no_genie, "skip the genie MMSE columns");
  run->add_option("--svg", svg, "also write a rate plot");

  Common se_c;
  std::optional<Index> se_mc;
  auto* se = app.add_subcommand("se", "run state evolution and write all covariance blocks");
  add_common(se, se_c, false);
  se->add_option("--mc", se_mc, "Monte-Carlo samples per expectation");

  Common or_c;
  OracleOptions oopt;
  auto* oracle = app.add_subcommand("oracle", "compare explicit-unitary and Gaussian-element dynamics");
  add_common(oracle, or_c, false);
  oracle->add_option("--seeds", oopt.seeds, "paired realizations")->check(CLI::PositiveNumber);
  oracle->add_option("--T", oopt.T, "iterations")->check(CLI::Range(1, 3));

  ValidationOptions vopt;
  std::vector<int> criteria;
  auto* validate = app.add_subcommand("validate", "run the acceptance suite");
  validate->add_option("--seed", vopt.seed, "root seed");
  validate->add_option("--threads", vopt.threads, "worker threads")->check(CLI::PositiveNumber);
  validate->add_option("--only", criteria, "criterion ids (default: all)");
  bool verbose = false;
  validate->add_flag("-v,--verbose", verbose, "progress notes");

  Common gen_c;
  Index gen_l = 4096;
  double gen_l1 = 0.1, gen_l2 = 0.1, gen_s2 = 0.1;
  int gen_t = 10;
  auto* gen = app.add_subcommand("gen-config", "write the 2-location example config");
  gen->add_option("--out", gen_c.out, "output path (default: stdout)");
  gen->add_option("--L", gen_l);
  gen->add_option("--lambda1", gen_l1);
  gen->add_option("--lambda2", gen_l2);
  gen->add_option("--noise-var", gen_s2);
  gen->add_option("--T", gen_t);
  gen->add_option("--seed", gen_c.seed);
  gen->add_option("--dict", gen_c.dict)->check(CLI::IsMember({"haar", "fourier"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      spec.base = load_base(run_c);
      spec.threads = run_c.threads;
      spec.output = run_c.out;
      spec.with_genie = !no_genie;
      spec.lambda_mode = parse_lambda_mode(lambda_mode);
      if (run_c.dict == "both") spec.dict_kinds = {DictionaryKind::DenseHaar, DictionaryKind::SignedFourier};
      if (!nu_grid.empty()) {
        spec.axis = SweepAxis::Nu;
        spec.grid = nu_grid;
      } else if (!l_grid.empty()) {
        spec.axis = SweepAxis::L;
        spec.grid = l_grid;
      } else if (!lambda_grid.empty()) {
        spec.axis = SweepAxis::Lambda;
        spec.grid = lambda_grid;
      } else {
        // single point at the config as given
        spec.axis = SweepAxis::L;
        spec.grid = {static_cast<double>(spec.base.L)};
      }
      spec.validate();
      const auto rows = run_experiment(spec);
      Sink sink(spec.output);
      write_experiment_csv(sink.get(), spec, rows);
      if (!svg.empty()) {
        Sink plot(svg);
        write_rates_svg(plot.get(), rows);
      }
    } else if (*se) {
      const SystemConfig cfg = load_base(se_c);
      SeOptions opt;
      opt.mc_samples = se_mc;
      const TwoTimeCovariance result = run_state_evolution(cfg, opt);
      Sink sink(se_c.out);
      sink.get() << "# config=" << config_hash(cfg) << " version=" << library_version() << '\n';
      write_state_evolution_csv(sink.get(), result);
    } else if (*oracle) {
      SystemConfig cfg = load_base(or_c);
      cfg.T = oopt.T;
      oopt.seed = cfg.seed;
      oopt.threads = or_c.threads;
      const TwoTimeCovariance result = run_state_evolution(cfg);
      const auto rows = compare_dynamics(cfg, result, oopt);
      Sink sink(or_c.out);
      sink.get() << "# config=" << config_hash(cfg) << " version=" << library_version() << " seeds=" << oopt.seeds
                 << '\n';
      write_oracle_csv(sink.get(), rows);
    } else if (*validate) {
      if (verbose) vopt.log = &std::cerr;
      if (criteria.empty()) criteria = all_criteria();
      int failed = 0;
      for (int id : criteria) {
        const CriterionResult r = run_criterion(id, vopt);
        std::cout << format_result(r) << std::endl;
        if (!r.pass) ++failed;
      }
      std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
      return failed == 0 ? 0 : 1;
    } else if (*gen) {
      SystemConfig cfg = two_location_config(gen_l, gen_l1, gen_l2, gen_s2);
      cfg.T = gen_t;
      if (gen_c.seed) cfg.seed = *gen_c.seed;
      if (!gen_c.dict.empty()) cfg.dict_kind = parse_dictionary_kind(gen_c.dict);
      cfg.validate();
      Sink sink(gen_c.out);
      write_config(sink.get(), cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 0;
}
