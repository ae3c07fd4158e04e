#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "msamp/detection.hpp"
#include "msamp/dictionary.hpp"
#include "msamp/model.hpp"
#include "msamp/state_evolution.hpp"

namespace msamp {

/// Runs fn(0..n-1) on up to `threads` workers. Each index must write only its
/// own output slot, so results do not depend on the worker count.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// One random instance: dictionaries, signals and observation drawn from the
/// substreams "dictionary", "signal" and "noise" of `rng`.
struct TrialData {
  std::vector<SemiUnitaryDictionary> dictionaries;
  SignalRealization signals;
  Observation observation;
};
TrialData make_trial(const SystemConfig& config, const RandomStream& rng);

enum class SweepAxis { Lambda, Nu, L };
/// How a lambda-grid value becomes per-source activities.
///   product: every combination of grid values over the sources
///   uniform: all sources share one value
///   alternating: odd sources take the first value of a pair, even sources the second
enum class LambdaMode { Product, Uniform, Alternating };

SweepAxis parse_sweep_axis(const std::string& text);
LambdaMode parse_lambda_mode(const std::string& text);

struct ExperimentSpec {
  SystemConfig base;
  SweepAxis axis = SweepAxis::Lambda;
  std::vector<double> grid;                  // lambda, nu or L values
  LambdaMode lambda_mode = LambdaMode::Product;
  Index trials = 1;
  std::vector<DictionaryKind> dict_kinds;    // empty: base.dict_kind
  bool with_genie = true;
  Index asymptotic_mc = 100000;
  unsigned threads = 1;
  std::string output;                        // CSV path; empty writes to stdout

  void validate() const;
};

/// One grid point expanded into a full config.
struct GridPoint {
  std::string label;
  SystemConfig config;
};
std::vector<GridPoint> expand_grid(const ExperimentSpec& spec);

struct ExperimentRow {
  std::string point;
  DictionaryKind kind = DictionaryKind::DenseHaar;
  DetectionReport report;  // counts pooled over trials, genie averaged
};

/// SE once per grid point, then `trials` AMP instances per point and
/// dictionary kind. Point p, trial k uses substream ("trial", p, k) of the
/// base seed; the output is identical for any thread count.
std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec);

/// First line "# config=<hash> version=<version> ..." followed by the table.
void write_experiment_csv(std::ostream& os, const ExperimentSpec& spec, const std::vector<ExperimentRow>& rows);

/// Minimal SVG plot of empirical and asymptotic rates against the grid index.
void write_rates_svg(std::ostream& os, const std::vector<ExperimentRow>& rows);

const char* library_version();

}  // namespace msamp
