#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixer/types.hpp"

namespace mixer {

struct SolverConfig;

struct SyntheticSpec {
  int universe_size = 30;              // k
  int num_views = 10;                  // n
  double observation_probability = 0.5;
  double mismatch_fraction = 0.25;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (universe_size < 1)
      throw ValidationError("SyntheticSpec: universe_size must be >= 1");
    if (num_views < 2)
      throw ValidationError("SyntheticSpec: num_views must be >= 2");
    if (observation_probability < 0.0 || observation_probability > 1.0)
      throw ValidationError("SyntheticSpec: observation_probability out of [0,1]");
    if (mismatch_fraction < 0.0 || mismatch_fraction > 1.0)
      throw ValidationError("SyntheticSpec: mismatch_fraction out of [0,1]");
  }
};

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long long num_predicted_pairs = 0;
  long long num_true_pairs = 0;
  long long num_correct_pairs = 0;

  /// Rates from pair counts, with the zero-denominator-is-zero convention.
  static Metrics from_counts(long long correct, long long predicted,
                             long long truth);
};

struct Instance {
  AffinityMatrix affinity;
  std::vector<int> truth_labels;
};

/// s(a; theta) = (1 - theta) a + 0.5 theta for binary a.
double add_uncertainty(double a, double theta);

/// Draw a synthetic instance: per-view Bernoulli(p) observation of each
/// universe object (empty views re-drawn), symmetric mismatch flips, and
/// per-pair uncertainty. The optional forced_theta pins theta for every pair
/// (test hook; production draws theta ~ Uniform[0,1) per unordered pair).
Instance generate_instance(const SyntheticSpec& spec,
                           std::optional<double> forced_theta = std::nullopt);

/// Pairwise precision/recall/F1 between two labelings of the same rows.
Metrics precision_recall_f1(const std::vector<int>& predicted,
                            const std::vector<int>& truth);

/// Naive fusion: threshold cross-view affinities at tau, take connected
/// components. May violate distinctness; that is the point.
std::vector<int> baseline_threshold_cc(const AffinityMatrix& S, double tau);

struct SweepRow {
  SyntheticSpec spec;
  std::string algorithm;           // "mixer" or "baseline"
  double precision = 0.0;          // means over successful trials
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> gap;       // mean gap over trials with m <= 10
  double wall_ms = 0.0;
  std::string status = "ok";
  int trials_ok = 0;
};

/// Monte Carlo sweep: for every spec x trial, generate (seed = spec seed +
/// trial), run MIXER and the baseline, and aggregate. Solver failures are
/// recorded in the row status, never fatal.
std::vector<SweepRow> run_sweep(const std::vector<SyntheticSpec>& grid,
                                const SolverConfig& cfg, int trials);

}  // namespace mixer
