#include "mixer/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mixer {

namespace {

// Objective of the partition encoded by labels: sum_ab (same(a,b) - S_ab)^2.
double partition_objective(const std::vector<int>& labels, const Matrix& S) {
  const int m = static_cast<int>(labels.size());
  double obj = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const double target = labels[a] == labels[b] ? 1.0 : 0.0;
      const double r = target - S(a, b);
      obj += r * r;
    }
  return obj;
}

struct MiqpSearch {
  const Matrix& S;
  const ViewPartition& partition;
  std::vector<int> labels;        // restricted growth string under construction
  std::vector<int> cluster_view;  // scratch: view occupancy check per cluster
  std::vector<int> best_labels;
  double best = std::numeric_limits<double>::infinity();

  MiqpSearch(const Matrix& s, const ViewPartition& p)
      : S(s), partition(p), labels(p.total(), 0) {}

  bool cluster_has_view(int cluster, int row_limit, int view) const {
    for (int r = 0; r < row_limit; ++r)
      if (labels[r] == cluster && partition.view_of_row(r) == view) return true;
    return false;
  }

  void recurse(int row, int num_clusters) {
    const int m = partition.total();
    if (row == m) {
      // Enumerator sanity check: one label per row (one-to-one, binary by
      // construction) and no view may occupy a cluster twice (distinctness).
      for (int v = 0; v < partition.num_views(); ++v) {
        const int off = partition.offset(v);
        const int mi = partition.cardinality(v);
        for (int a = off; a < off + mi; ++a)
          for (int b = a + 1; b < off + mi; ++b)
            if (labels[a] == labels[b])
              throw Error("brute_force_miqp: enumerator produced an "
                          "indistinct partition");
      }
      const double obj = partition_objective(labels, S);
      if (obj < best) {  // strict: lexicographic enumeration keeps first tie
        best = obj;
        best_labels = labels;
      }
      return;
    }
    const int view = partition.view_of_row(row);
    for (int c = 0; c <= num_clusters; ++c) {
      if (c < num_clusters && cluster_has_view(c, row, view)) continue;
      labels[row] = c;
      recurse(row + 1, std::max(num_clusters, c + 1));
    }
  }
};

// Minimum-cost perfect assignment on an n x n cost matrix via the classical
// potentials method (O(n^3)). Returns the column assigned to each row.
std::vector<int> min_cost_assignment(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] >= 1) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

void exhaustive_mwm(const Matrix& benefit, int row, std::vector<int>& match,
                    std::vector<char>& col_used, double gain, double& best,
                    std::vector<int>& best_match) {
  const int rows = static_cast<int>(benefit.rows());
  const int cols = static_cast<int>(benefit.cols());
  if (row == rows) {
    if (gain > best) {
      best = gain;
      best_match = match;
    }
    return;
  }
  match[row] = -1;  // leave row unmatched
  exhaustive_mwm(benefit, row + 1, match, col_used, gain, best, best_match);
  for (int c = 0; c < cols; ++c) {
    if (col_used[c] || benefit(row, c) <= 0.0) continue;
    col_used[c] = 1;
    match[row] = c;
    exhaustive_mwm(benefit, row + 1, match, col_used, gain + benefit(row, c),
                   best, best_match);
    col_used[c] = 0;
  }
  match[row] = -1;
}

}  // namespace

std::pair<AssignmentMatrix, double> brute_force_miqp(const AffinityMatrix& S) {
  const int m = S.size();
  if (m > 10)
    throw ValidationError("brute_force_miqp: m = " + std::to_string(m) +
                          " exceeds the oracle guard (10)");
  MiqpSearch search(S.values(), S.partition());
  search.recurse(0, 0);

  Matrix U = Matrix::Zero(m, m);
  for (int r = 0; r < m; ++r) U(r, search.best_labels[r]) = 1.0;
  return {AssignmentMatrix(S.partition(), std::move(U)), search.best};
}

std::vector<std::pair<int, int>> hungarian_mwm(const Matrix& s_pair) {
  const int m1 = static_cast<int>(s_pair.rows());
  const int m2 = static_cast<int>(s_pair.cols());
  if (!s_pair.allFinite())
    throw ValidationError("hungarian_mwm: non-finite entry");
  if (m1 == 0 || m2 == 0) return {};

  // Benefit of selecting a pair; pairs at or below 0.5 are never beneficial.
  Matrix benefit(m1, m2);
  for (int i = 0; i < m1; ++i)
    for (int j = 0; j < m2; ++j) benefit(i, j) = 2.0 * s_pair(i, j) - 1.0;

  std::vector<std::pair<int, int>> selected;
  if (std::min(m1, m2) <= 6) {
    // Iterate over rows of the smaller side so the search tree stays tiny.
    const bool transpose = m1 > m2;
    const Matrix b = transpose ? Matrix(benefit.transpose()) : benefit;
    std::vector<int> match(b.rows(), -1), best_match(b.rows(), -1);
    std::vector<char> col_used(b.cols(), 0);
    double best = 0.0;
    exhaustive_mwm(b, 0, match, col_used, 0.0, best, best_match);
    for (int r = 0; r < static_cast<int>(best_match.size()); ++r)
      if (best_match[r] >= 0)
        selected.emplace_back(transpose ? best_match[r] : r,
                              transpose ? r : best_match[r]);
  } else {
    // Zero-padded square problem: a perfect assignment on the padded matrix
    // is an arbitrary partial matching on the original.
    const int n = std::max(m1, m2);
    Matrix cost = Matrix::Zero(n, n);
    for (int i = 0; i < m1; ++i)
      for (int j = 0; j < m2; ++j)
        cost(i, j) = -std::max(benefit(i, j), 0.0);
    const std::vector<int> row_to_col = min_cost_assignment(cost);
    for (int i = 0; i < m1; ++i) {
      const int j = row_to_col[i];
      if (j < m2 && benefit(i, j) > 0.0) selected.emplace_back(i, j);
    }
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

Vector simplex_qp_oracle(const Vector& v) {
  const int n = static_cast<int>(v.size());
  if (n < 1) throw ValidationError("simplex_qp_oracle: empty vector");
  if (n > 10)
    throw ValidationError("simplex_qp_oracle: length " + std::to_string(n) +
                          " exceeds the oracle guard (10)");
  double best = std::numeric_limits<double>::infinity();
  Vector best_x = Vector::Zero(n);
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    int size = 0;
    double support_sum = 0.0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) {
        ++size;
        support_sum += v[i];
      }
    const double shift = (1.0 - support_sum) / size;
    Vector x = Vector::Zero(n);
    bool feasible = true;
    for (int i = 0; i < n && feasible; ++i)
      if (mask & (1u << i)) {
        x[i] = v[i] + shift;
        if (x[i] < 0.0) feasible = false;
      }
    if (!feasible) continue;
    const double obj = (x - v).squaredNorm();
    if (obj < best) {
      best = obj;
      best_x = x;
    }
  }
  return best_x;
}

double optimality_gap(double f_solution, double f_optimum) {
  return f_solution - f_optimum;
}

}  // namespace mixer
