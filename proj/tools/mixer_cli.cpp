// mixer: fuse uncertain pairwise affinities into cycle-consistent, distinct,
// binary associations.
//
// Subcommands:
//   solve    read an affinity file, run the solver, write a result file
//   synth    generate a synthetic affinity file with ground-truth labels
//   eval     score a result file against ground-truth labels
//   bench    Monte Carlo sweep over a synthetic grid, CSV output
//   combine  weighted average of affinity files sharing one partition
//
// Exit codes: 0 success, 1 usage/input error, 2 solver non-convergence.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixer/core.hpp"
#include "mixer/evaluation.hpp"
#include "mixer/io.hpp"
#include "mixer/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNotConverged = 2;

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void print_metrics(const mixer::Metrics& met) {
  std::cout << "precision=" << format_full(met.precision)
            << " recall=" << format_full(met.recall)
            << " f1=" << format_full(met.f1)
            << " correct_pairs=" << met.num_correct_pairs
            << " predicted_pairs=" << met.num_predicted_pairs
            << " true_pairs=" << met.num_true_pairs << "\n";
}

// Best-effort labels for a non-binary iterate: per-row argmax column,
// relabeled in first-occurrence order. Only used on the non-convergence path.
std::vector<int> argmax_labels(const mixer::Matrix& U) {
  const int m = static_cast<int>(U.rows());
  std::vector<int> column(m);
  for (int r = 0; r < m; ++r) {
    int best = 0;
    for (int c = 1; c < m; ++c)
      if (U(r, c) > U(r, best)) best = c;
    column[r] = best;
  }
  std::vector<int> column_label(m, -1), labels(m);
  int next = 0;
  for (int r = 0; r < m; ++r) {
    if (column_label[column[r]] < 0) column_label[column[r]] = next++;
    labels[r] = column_label[column[r]];
  }
  return labels;
}

int cmd_solve(const std::string& input, const std::string& output,
              const mixer::SolverConfig& cfg) {
  const mixer::AffinityFile file = mixer::read_affinity_file(input);
  const mixer::AffinityMatrix S = file.validated();

  mixer::ResultFile result;
  result.config = cfg;
  try {
    const mixer::SolveResult solved = mixer::solve(S, cfg);
    result.labels = solved.clustering.labels;
    result.universe_estimate = solved.clustering.universe_estimate;
    result.report = solved.report;
  } catch (const mixer::NotConvergedError& e) {
    std::cerr << "mixer solve: " << e.what() << "\n";
    result.labels = argmax_labels(e.last_iterate);
    result.universe_estimate = e.report.universe_estimate;
    result.report = e.report;
    if (!output.empty()) mixer::write_result_file(output, result);
    return kExitNotConverged;
  }
  if (!output.empty()) mixer::write_result_file(output, result);
  if (file.labels)
    print_metrics(mixer::precision_recall_f1(result.labels, *file.labels));
  return kExitOk;
}

int cmd_synth(const mixer::SyntheticSpec& spec, const std::string& output,
              std::optional<double> forced_theta) {
  const mixer::Instance inst = mixer::generate_instance(spec, forced_theta);
  mixer::AffinityFile file;
  file.views = inst.affinity.partition().cardinalities();
  file.affinity = inst.affinity.values();
  file.labels = inst.truth_labels;
  mixer::write_affinity_file(output, file);
  return kExitOk;
}

int cmd_eval(const std::string& result_path, const std::string& truth_path) {
  const mixer::ResultFile result = mixer::read_result_file(result_path);
  const mixer::AffinityFile truth = mixer::read_affinity_file(truth_path);
  if (!truth.labels)
    throw mixer::ValidationError(truth_path + ": no \"labels\" field");
  if (truth.labels->size() != result.labels.size())
    throw mixer::ValidationError(
        "label length mismatch: " + std::to_string(result.labels.size()) +
        " in " + result_path + " vs " + std::to_string(truth.labels->size()) +
        " in " + truth_path);
  print_metrics(mixer::precision_recall_f1(result.labels, *truth.labels));
  return kExitOk;
}

int cmd_bench(const std::vector<int>& universes, const std::vector<int>& views,
              const std::vector<double>& obs_probs,
              const std::vector<double>& mismatches, std::uint64_t seed,
              int trials, const std::string& output,
              const mixer::SolverConfig& cfg) {
  std::vector<mixer::SyntheticSpec> grid;
  std::uint64_t cell = 0;
  for (int k : universes)
    for (int n : views)
      for (double p : obs_probs)
        for (double mismatch : mismatches) {
          mixer::SyntheticSpec spec;
          spec.universe_size = k;
          spec.num_views = n;
          spec.observation_probability = p;
          spec.mismatch_fraction = mismatch;
          spec.rng_seed = seed + 1000003ULL * cell++;
          spec.validate();
          grid.push_back(spec);
        }

  const std::vector<mixer::SweepRow> rows =
      mixer::run_sweep(grid, cfg, trials);

  std::FILE* out = std::fopen(output.c_str(), "w");
  if (!out) throw mixer::Error("cannot write file: " + output);
  std::fprintf(out, "k,n,obs_prob,mismatch,algorithm,precision,recall,f1,gap,wall_ms\n");
  for (const mixer::SweepRow& row : rows) {
    if (row.status != "ok")
      std::cerr << "mixer bench: cell (k=" << row.spec.universe_size
                << ", n=" << row.spec.num_views << ", p="
                << row.spec.observation_probability << ", mismatch="
                << row.spec.mismatch_fraction << "): " << row.status << "\n";
    const bool has_metrics = row.trials_ok > 0;
    std::fprintf(out, "%d,%d,%s,%s,%s,%s,%s,%s,%s,%s\n",
                 row.spec.universe_size, row.spec.num_views,
                 format_full(row.spec.observation_probability).c_str(),
                 format_full(row.spec.mismatch_fraction).c_str(),
                 row.algorithm.c_str(),
                 has_metrics ? format_full(row.precision).c_str() : "",
                 has_metrics ? format_full(row.recall).c_str() : "",
                 has_metrics ? format_full(row.f1).c_str() : "",
                 row.gap ? format_full(*row.gap).c_str() : "",
                 has_metrics ? format_full(row.wall_ms).c_str() : "");
  }
  std::fclose(out);
  return kExitOk;
}

int cmd_combine(const std::vector<std::string>& inputs,
                const std::vector<double>& weights,
                const std::string& output) {
  std::vector<mixer::AffinityFile> files;
  for (const std::string& path : inputs)
    files.push_back(mixer::read_affinity_file(path));
  for (std::size_t i = 1; i < files.size(); ++i)
    if (files[i].views != files[0].views)
      throw mixer::ValidationError("partition mismatch between " + inputs[0] +
                                   " and " + inputs[i]);

  std::vector<mixer::AffinityMatrix> matrices;
  for (const mixer::AffinityFile& f : files) matrices.push_back(f.validated());
  const mixer::AffinityMatrix combined =
      mixer::combine_affinities(matrices, weights);

  mixer::AffinityFile out;
  out.views = files[0].views;
  out.affinity = combined.values();
  // Labels pass through only when every input carries the same ones.
  if (files[0].labels) {
    bool all_agree = true;
    for (const mixer::AffinityFile& f : files)
      if (!f.labels || *f.labels != *files[0].labels) {
        all_agree = false;
        break;
      }
    if (all_agree) out.labels = files[0].labels;
  }
  mixer::write_affinity_file(output, out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MIXER: multiway fusion of uncertain pairwise affinities"};
  app.require_subcommand(1);

  mixer::SolverConfig cfg;

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "solve an affinity file");
  std::string solve_input, solve_output;
  solve_cmd->add_option("input", solve_input, "affinity file (JSON)")
      ->required();
  solve_cmd->add_option("--output", solve_output, "result file to write");
  solve_cmd->add_option("--seed", cfg.rng_seed, "solver RNG seed");
  solve_cmd->add_option("--tol", cfg.inner_tol, "inner loop relative tolerance");
  solve_cmd->add_option("--max-outer", cfg.max_outer_iters,
                        "maximum outer iterations");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic instance");
  mixer::SyntheticSpec spec;
  std::string synth_output;
  double forced_theta = -1.0;
  synth_cmd->add_option("--universe", spec.universe_size, "universe size k")
      ->required();
  synth_cmd->add_option("--views", spec.num_views, "number of views n")
      ->required();
  synth_cmd->add_option("--obs-prob", spec.observation_probability,
                        "observation probability");
  synth_cmd->add_option("--mismatch", spec.mismatch_fraction,
                        "association flip probability");
  synth_cmd->add_option("--seed", spec.rng_seed, "generator seed");
  synth_cmd->add_option("--force-theta", forced_theta,
                        "pin the uncertainty draw to a constant (test hook)");
  synth_cmd->add_option("--output", synth_output, "affinity file to write")
      ->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "score a result against truth");
  std::string eval_result, eval_truth;
  eval_cmd->add_option("result", eval_result, "result file (JSON)")->required();
  eval_cmd->add_option("truth", eval_truth, "affinity file with labels")
      ->required();

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Monte Carlo sweep to CSV");
  std::vector<int> bench_universes{30};
  std::vector<int> bench_views{10};
  std::vector<double> bench_probs{0.5};
  std::vector<double> bench_mismatches{0.25};
  std::uint64_t bench_seed = 0;
  int bench_trials = 10;
  std::string bench_output;
  bench_cmd->add_option("--universe", bench_universes, "universe sizes");
  bench_cmd->add_option("--views", bench_views, "view counts");
  bench_cmd->add_option("--obs-prob", bench_probs, "observation probabilities");
  bench_cmd->add_option("--mismatch", bench_mismatches, "mismatch fractions");
  bench_cmd->add_option("--seed", bench_seed, "base generator seed");
  bench_cmd->add_option("--trials", bench_trials, "trials per cell");
  bench_cmd->add_option("--max-outer", cfg.max_outer_iters,
                        "maximum outer iterations");
  bench_cmd->add_option("--tol", cfg.inner_tol, "inner loop relative tolerance");
  bench_cmd->add_option("--output", bench_output, "CSV file to write")
      ->required();

  // combine
  auto* combine_cmd =
      app.add_subcommand("combine", "weighted average of affinity files");
  std::vector<std::string> combine_inputs;
  std::vector<double> combine_weights;
  std::string combine_output;
  combine_cmd->add_option("inputs", combine_inputs, "affinity files")
      ->required();
  combine_cmd->add_option("--weights", combine_weights,
                          "one nonnegative weight per input");
  combine_cmd->add_option("--output", combine_output, "affinity file to write")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) return cmd_solve(solve_input, solve_output, cfg);
    if (*synth_cmd) {
      std::optional<double> theta;
      if (forced_theta >= 0.0) theta = forced_theta;
      return cmd_synth(spec, synth_output, theta);
    }
    if (*eval_cmd) return cmd_eval(eval_result, eval_truth);
    if (*bench_cmd)
      return cmd_bench(bench_universes, bench_views, bench_probs,
                       bench_mismatches, bench_seed, bench_trials,
                       bench_output, cfg);
    if (*combine_cmd) {
      std::vector<double> weights = combine_weights;
      if (weights.empty()) weights.assign(combine_inputs.size(), 1.0);
      return cmd_combine(combine_inputs, weights, combine_output);
    }
  } catch (const mixer::Error& e) {
    std::cerr << "mixer: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
