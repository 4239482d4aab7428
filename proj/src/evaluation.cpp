#include "mixer/evaluation.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "mixer/core.hpp"
#include "mixer/oracles.hpp"
#include "mixer/solver.hpp"

namespace mixer {

namespace {

long long pairs_in(long long count) { return count * (count - 1) / 2; }

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

Metrics Metrics::from_counts(long long correct, long long predicted,
                             long long truth) {
  Metrics m;
  m.num_correct_pairs = correct;
  m.num_predicted_pairs = predicted;
  m.num_true_pairs = truth;
  m.precision = predicted > 0 ? static_cast<double>(correct) / predicted : 0.0;
  m.recall = truth > 0 ? static_cast<double>(correct) / truth : 0.0;
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

double add_uncertainty(double a, double theta) {
  if (a != 0.0 && a != 1.0)
    throw ValidationError("add_uncertainty: a must be binary, got " +
                          std::to_string(a));
  if (theta < 0.0 || theta > 1.0)
    throw ValidationError("add_uncertainty: theta out of [0,1]: " +
                          std::to_string(theta));
  return (1.0 - theta) * a + 0.5 * theta;
}

Instance generate_instance(const SyntheticSpec& spec,
                           std::optional<double> forced_theta) {
  spec.validate();
  if (forced_theta && (*forced_theta < 0.0 || *forced_theta > 1.0))
    throw ValidationError("generate_instance: forced_theta out of [0,1]");
  std::mt19937_64 rng(spec.rng_seed);

  // Observations, view by view; a view that would come out empty is re-drawn
  // so the partition invariant m_i >= 1 holds.
  std::vector<int> truth_labels;
  std::vector<int> cardinalities;
  for (int v = 0; v < spec.num_views; ++v) {
    std::vector<int> observed;
    while (observed.empty()) {
      for (int obj = 0; obj < spec.universe_size; ++obj)
        if (detail::uniform01(rng) < spec.observation_probability)
          observed.push_back(obj);
      if (spec.observation_probability == 0.0 && observed.empty()) {
        // Guaranteed-empty draw; keep determinism by observing object 0.
        observed.push_back(0);
      }
    }
    cardinalities.push_back(static_cast<int>(observed.size()));
    truth_labels.insert(truth_labels.end(), observed.begin(), observed.end());
  }
  ViewPartition partition(cardinalities);
  const int m = partition.total();

  // Ground-truth associations, then symmetric mismatch flips, then the
  // uncertainty model, one unordered pair at a time in row-major order.
  Matrix S = Matrix::Zero(m, m);
  for (int a = 0; a < m; ++a) S(a, a) = 1.0;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      double assoc = truth_labels[a] == truth_labels[b] ? 1.0 : 0.0;
      if (detail::uniform01(rng) < spec.mismatch_fraction) assoc = 1.0 - assoc;
      const double theta =
          forced_theta ? *forced_theta : detail::uniform01(rng);
      const double s = add_uncertainty(assoc, theta);
      S(a, b) = s;
      S(b, a) = s;
    }

  return Instance{AffinityMatrix(partition, std::move(S)),
                  std::move(truth_labels)};
}

Metrics precision_recall_f1(const std::vector<int>& predicted,
                            const std::vector<int>& truth) {
  if (predicted.size() != truth.size())
    throw ValidationError("precision_recall_f1: label vectors differ in "
                          "length: " +
                          std::to_string(predicted.size()) + " vs " +
                          std::to_string(truth.size()));
  std::map<int, long long> truth_sizes, pred_sizes;
  std::map<std::pair<int, int>, long long> joint_sizes;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++truth_sizes[truth[i]];
    ++pred_sizes[predicted[i]];
    ++joint_sizes[{truth[i], predicted[i]}];
  }
  long long true_pairs = 0, predicted_pairs = 0, correct_pairs = 0;
  for (const auto& [label, count] : truth_sizes) true_pairs += pairs_in(count);
  for (const auto& [label, count] : pred_sizes)
    predicted_pairs += pairs_in(count);
  for (const auto& [labels, count] : joint_sizes)
    correct_pairs += pairs_in(count);
  return Metrics::from_counts(correct_pairs, predicted_pairs, true_pairs);
}

std::vector<int> baseline_threshold_cc(const AffinityMatrix& S, double tau) {
  const int m = S.size();
  const ViewPartition& partition = S.partition();
  std::vector<int> row_view(m);
  for (int v = 0; v < partition.num_views(); ++v)
    for (int r = partition.offset(v);
         r < partition.offset(v) + partition.cardinality(v); ++r)
      row_view[r] = v;

  DisjointSet components(m);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      if (row_view[a] != row_view[b] && S.values()(a, b) > tau)
        components.unite(a, b);

  std::vector<int> labels(m);
  std::map<int, int> root_label;
  for (int r = 0; r < m; ++r) {
    const int root = components.find(r);
    auto [it, inserted] =
        root_label.emplace(root, static_cast<int>(root_label.size()));
    labels[r] = it->second;
  }
  return labels;
}

std::vector<SweepRow> run_sweep(const std::vector<SyntheticSpec>& grid,
                                const SolverConfig& cfg, int trials) {
  if (trials < 1) throw ValidationError("run_sweep: trials must be >= 1");
  using clock = std::chrono::steady_clock;
  std::vector<SweepRow> rows;

  struct Accumulator {
    double precision = 0, recall = 0, f1 = 0, wall_ms = 0, gap = 0;
    int ok = 0, gap_count = 0;

    void add(const Metrics& met, double ms, std::optional<double> trial_gap) {
      precision += met.precision;
      recall += met.recall;
      f1 += met.f1;
      wall_ms += ms;
      ++ok;
      if (trial_gap) {
        gap += *trial_gap;
        ++gap_count;
      }
    }
    void finalize(SweepRow& row) const {
      row.trials_ok = ok;
      if (ok > 0) {
        row.precision = precision / ok;
        row.recall = recall / ok;
        row.f1 = f1 / ok;
        row.wall_ms = wall_ms / ok;
      }
      if (gap_count > 0) row.gap = gap / gap_count;
    }
  };

  for (const SyntheticSpec& spec : grid) {
    SweepRow mixer_row;
    mixer_row.spec = spec;
    mixer_row.algorithm = "mixer";
    SweepRow baseline_row;
    baseline_row.spec = spec;
    baseline_row.algorithm = "baseline";
    Accumulator mixer_acc, base_acc;
    int failures = 0;
    std::string failure_note;

    for (int t = 0; t < trials; ++t) {
      SyntheticSpec trial_spec = spec;
      trial_spec.rng_seed = spec.rng_seed + static_cast<std::uint64_t>(t);
      const Instance inst = generate_instance(trial_spec);
      const int m = inst.affinity.size();

      std::optional<double> optimum;
      if (m <= 10) optimum = brute_force_miqp(inst.affinity).second;

      // Baseline runs regardless of solver failures.
      {
        const auto t0 = clock::now();
        const std::vector<int> labels =
            baseline_threshold_cc(inst.affinity, 0.5);
        const double ms =
            std::chrono::duration<double, std::milli>(clock::now() - t0)
                .count();
        std::optional<double> trial_gap;
        if (optimum) {
          Matrix U = Matrix::Zero(m, m);
          for (int r = 0; r < m; ++r) U(r, labels[r]) = 1.0;
          trial_gap = optimality_gap(
              frobenius_form(AssignmentMatrix(inst.affinity.partition(), U),
                             inst.affinity),
              *optimum);
        }
        base_acc.add(precision_recall_f1(labels, inst.truth_labels), ms,
                     trial_gap);
      }

      try {
        const auto t0 = clock::now();
        const SolveResult result = solve(inst.affinity, cfg);
        const double ms =
            std::chrono::duration<double, std::milli>(clock::now() - t0)
                .count();
        std::optional<double> trial_gap;
        if (optimum)
          trial_gap = optimality_gap(result.report.miqp_objective, *optimum);
        mixer_acc.add(
            precision_recall_f1(result.clustering.labels, inst.truth_labels),
            ms, trial_gap);
      } catch (const Error& e) {
        ++failures;
        if (failure_note.empty()) failure_note = e.what();
      }
    }

    mixer_acc.finalize(mixer_row);
    base_acc.finalize(baseline_row);
    if (failures > 0)
      mixer_row.status = "error: " + failure_note + " (" +
                         std::to_string(failures) + "/" +
                         std::to_string(trials) + " trials failed)";
    rows.push_back(std::move(mixer_row));
    rows.push_back(std::move(baseline_row));
  }
  return rows;
}

}  // namespace mixer
