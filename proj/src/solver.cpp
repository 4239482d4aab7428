#include "mixer/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>

#include "mixer/projection.hpp"

namespace mixer {

namespace {

Matrix modified_affinity(const AffinityMatrix& S) {
  const int m = S.size();
  return Matrix::Ones(m, m) - 2.0 * S.values();
}

// Descent matrix: 1 - 2S with the self-affinity diagonal treated as absent
// (zero) rather than 1. On feasible binary points diag(UU^T) = 1, so the two
// conventions differ by a constant there and share the same optima; off the
// vertices, the -1 diagonal acts as a self-attraction that walls every row
// into its current column and locks the descent into the first vertex it
// touches. Reported objectives always use the unit-diagonal convention.
Matrix descent_affinity(const AffinityMatrix& S) {
  Matrix sbar = modified_affinity(S);
  sbar.diagonal().array() += 2.0;
  return sbar;
}

// One objective/gradient evaluation point. The three products are shared by
// F and grad F, so a line-search candidate costs exactly one evaluation.
// Simplex-projected iterates are row-sparse (a handful of nonzeros per row),
// so once the nonzero count drops the dense GEMMs switch to sparse-aware
// column accumulations costing O(m * nnz) instead of O(m^3).
struct EvalPoint {
  Matrix sbar_u;  // (1-2S) U
  Matrix u_po;    // U P_o
  Matrix pd_u;    // P_d U
  double value = 0.0;

  void resize(int m) {
    sbar_u.resize(m, m);
    u_po.resize(m, m);
    pd_u.resize(m, m);
  }
};

void evaluate(const Matrix& U, const Matrix& sbar, double d,
              const PenaltyPair& P, Matrix& scratch, EvalPoint& e) {
  const int m = static_cast<int>(U.rows());
  e.resize(m);

  // At d = 0 the penalty products drop out of both the value and the
  // gradient; zero them instead of computing them.
  const bool need_penalty = d != 0.0;

  long long nnz = 0;
  for (int c = 0; c < m; ++c)
    for (int r = 0; r < m; ++r)
      if (U(r, c) != 0.0) ++nnz;

  // The sparse path wins whenever the accumulation work m*nnz stays well
  // under the m^3 of a dense product.
  if (nnz * 4 < static_cast<long long>(m) * m) {
    e.sbar_u.setZero();
    scratch.resize(m, m);  // (U P_o)^T, accumulated column-wise
    if (need_penalty) {
      scratch.setZero();
      e.pd_u.setZero();
    }
    for (int c = 0; c < m; ++c)
      for (int r = 0; r < m; ++r) {
        const double u = U(r, c);
        if (u == 0.0) continue;
        e.sbar_u.col(c) += u * sbar.col(r);
        if (!need_penalty) continue;
        scratch.col(r) += u * P.p_orth.col(c);  // P_o symmetric
        const int view = P.partition.view_of_row(r);
        const int off = P.partition.offset(view);
        const int len = P.partition.cardinality(view);
        e.pd_u.col(c).segment(off, len) +=
            u * P.p_dist.col(r).segment(off, len);
      }
    if (need_penalty) {
      e.u_po = scratch.transpose();
    } else {
      e.u_po.setZero();
      e.pd_u.setZero();
    }
  } else {
    e.sbar_u.noalias() = sbar * U;
    if (need_penalty) {
      e.u_po.noalias() = U * P.p_orth;
      e.pd_u = detail::pdist_times(P.p_dist, U, P.partition);
    } else {
      e.u_po.setZero();
      e.pd_u.setZero();
    }
  }

  const double data = U.cwiseProduct(e.sbar_u).sum();
  e.value = data;
  if (need_penalty) {
    const double phi_o = U.cwiseProduct(e.u_po).sum();
    const double phi_d = U.cwiseProduct(e.pd_u).sum();
    e.value += d * (phi_o + phi_d);
  }
}

Matrix gradient_of(const EvalPoint& e, double d) {
  if (d == 0.0) return 2.0 * e.sbar_u;
  return 2.0 * e.sbar_u + (2.0 * d) * (e.u_po + e.pd_u);
}

// Snap near-binary entries exactly and verify feasibility: binary entries,
// exactly one 1 per row, no same-view rows sharing a column. Returns nullopt
// if the iterate is not actually snappable to a feasible point.
std::optional<Matrix> snap_to_binary(const Matrix& U,
                                     const ViewPartition& partition,
                                     double tol) {
  const int m = static_cast<int>(U.rows());
  Matrix snapped(m, m);
  for (int r = 0; r < m; ++r) {
    int ones = 0;
    for (int c = 0; c < m; ++c) {
      const double v = U(r, c);
      if (std::abs(v) <= tol) {
        snapped(r, c) = 0.0;
      } else if (std::abs(v - 1.0) <= tol) {
        snapped(r, c) = 1.0;
        ++ones;
      } else {
        return std::nullopt;
      }
    }
    if (ones != 1) return std::nullopt;
  }
  // Distinctness: within a view, a column may be used at most once.
  for (int v = 0; v < partition.num_views(); ++v) {
    std::vector<char> used(m, 0);
    const int off = partition.offset(v);
    for (int r = off; r < off + partition.cardinality(v); ++r) {
      int col = 0;
      while (snapped(r, col) != 1.0) ++col;
      if (used[col]) return std::nullopt;
      used[col] = 1;
    }
  }
  return snapped;
}

int count_nonzero_columns(const Matrix& U) {
  int count = 0;
  for (int c = 0; c < U.cols(); ++c)
    if ((U.col(c).array() != 0.0).any()) ++count;
  return count;
}

}  // namespace

namespace detail {

void pgd_inner_raw(Matrix& U, const Matrix& sbar, double d,
                   const PenaltyPair& P, const SolverConfig& cfg,
                   InnerStats& stats) {
  Matrix scratch;
  EvalPoint cur, trial_eval;
  evaluate(U, sbar, d, P, scratch, cur);
  if (!std::isfinite(cur.value))
    throw Error("pgd_inner: non-finite objective at the starting point");

  Matrix trial;
  for (int it = 0; it < cfg.max_inner_iters; ++it) {
    const Matrix grad = gradient_of(cur, d);
    double alpha = cfg.initial_step;
    bool accepted = false;
    for (int b = 0; b < cfg.max_backtracks; ++b) {
      trial = project_rows(U - alpha * grad);
      evaluate(trial, sbar, d, P, scratch, trial_eval);
      if (!std::isfinite(trial_eval.value))
        throw Error("pgd_inner: non-finite objective during line search");
      const double directional = grad.cwiseProduct(trial - U).sum();
      if (trial_eval.value <= cur.value + cfg.armijo_c * directional) {
        accepted = true;
        break;
      }
      alpha *= cfg.armijo_shrink;
      ++stats.backtracks;
    }
    if (!accepted) break;  // zero step: no acceptable direction remains

    ++stats.iterations;
    const double decrease = cur.value - trial_eval.value;
    const double rel = decrease / std::max(1.0, std::abs(cur.value));
    std::swap(U, trial);
    std::swap(cur, trial_eval);
    if (rel < cfg.inner_tol) break;
  }
}

}  // namespace detail

AssignmentMatrix initialize(const AffinityMatrix& S) {
  const Matrix sbar = modified_affinity(S);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sbar);
  if (es.info() != Eigen::Success)
    throw Error("initialize: eigendecomposition failed");
  Matrix W = es.eigenvectors();  // ascending eigenvalues
  // Orient each eigenvector toward the positive orthant so that the simplex
  // projection keeps its indicator-like structure.
  for (int c = 0; c < W.cols(); ++c) {
    double sum = W.col(c).sum();
    if (sum == 0.0) {
      for (int r = 0; r < W.rows(); ++r)
        if (W(r, c) != 0.0) {
          sum = W(r, c);
          break;
        }
    }
    if (sum < 0.0) W.col(c) = -W.col(c);
  }
  return project_simplex(W, S.partition());
}

namespace {

// Median of D = { -sbar_ij / G_ij : G_ij > 0, U_ij > 0 } with G the penalty
// gradient factor; 1 when D is empty, clamped to >= 0.
double penalty_weight_median(const Matrix& u, const Matrix& sbar,
                             const PenaltyPair& P) {
  Matrix G = u * P.p_orth;
  G += detail::pdist_times(P.p_dist, u, P.partition);
  std::vector<double> candidates;
  for (int r = 0; r < u.rows(); ++r)
    for (int c = 0; c < u.cols(); ++c)
      if (G(r, c) > 0.0 && u(r, c) > 0.0)
        candidates.push_back(-sbar(r, c) / G(r, c));
  if (candidates.empty()) return 1.0;
  std::sort(candidates.begin(), candidates.end());
  const std::size_t n = candidates.size();
  const double median = (n % 2 == 1)
                            ? candidates[n / 2]
                            : 0.5 * (candidates[n / 2 - 1] + candidates[n / 2]);
  return std::max(median, 0.0);
}

}  // namespace

double init_penalty_weight(const AssignmentMatrix& U, const AffinityMatrix& S,
                           const PenaltyPair& P) {
  return penalty_weight_median(U.values(), modified_affinity(S), P);
}

AssignmentMatrix pgd_inner(const AssignmentMatrix& U, const AffinityMatrix& S,
                           double d, const PenaltyPair& P,
                           const SolverConfig& cfg) {
  cfg.validate();
  if (d < 0) throw ValidationError("pgd_inner: penalty weight d must be >= 0");
  if (U.size() != S.size())
    throw ValidationError("pgd_inner: dimension mismatch between U and S");
  Matrix iterate = U.values();
  detail::InnerStats stats;
  detail::pgd_inner_raw(iterate, descent_affinity(S), d, P, cfg, stats);
  return AssignmentMatrix(U.partition(), std::move(iterate));
}

PenaltyPair perturb_penalties(const PenaltyPair& P, double scale,
                              std::mt19937_64& rng) {
  if (scale < 0) throw ValidationError("perturb_penalties: scale must be >= 0");
  PenaltyPair out{P.partition, P.p_orth, P.p_dist};
  for (Matrix* mat : {&out.p_orth, &out.p_dist}) {
    const int m = static_cast<int>(mat->rows());
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b)
        if ((*mat)(a, b) != 0.0) {
          const double factor = 1.0 + detail::uniform01(rng) * scale;
          const double v = (*mat)(a, b) * factor;
          (*mat)(a, b) = v;
          (*mat)(b, a) = v;
        }
  }
  return out;
}

SolveResult solve(const AffinityMatrix& S, const SolverConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const ViewPartition& partition = S.partition();
  const int m = partition.total();
  const Matrix sbar = modified_affinity(S);
  const Matrix sbar_descent = descent_affinity(S);
  const PenaltyPair P = build_penalties(partition);

  Matrix U = initialize(S).values();
  // The weight heuristic describes the landscape actually descended, so it
  // uses the descent matrix here (the public operation keeps the
  // unit-diagonal convention).
  double d = penalty_weight_median(U, sbar_descent, P);
  std::mt19937_64 rng(cfg.rng_seed);

  // Strict-saddle escape between outer iterations: exact ties (two empty
  // columns seen identically by a split row) survive the symmetric penalty
  // perturbation and leave the inner solve with nothing to do. A stalled,
  // infeasible iterate gets a small random push before the next inner
  // solve; per-entry amplitude keeps the expected push per row at a
  // twentieth of the row mass regardless of problem size.
  const double saddle_nudge = 0.1 / static_cast<double>(m);
  Matrix previous = U;

  SolveReport report;
  detail::InnerStats stats;
  const double d_feasible = static_cast<double>(m) + 1.0;

  for (int outer = 0; outer < cfg.max_outer_iters; ++outer) {
    const PenaltyPair active =
        cfg.perturb_scale > 0.0 ? perturb_penalties(P, cfg.perturb_scale, rng)
                                : P;
    detail::pgd_inner_raw(U, sbar_descent, d, active, cfg, stats);
    report.d_trajectory.push_back(d);
    ++report.outer_iterations;

    // Feasibility is always measured against the unperturbed penalties.
    const double phi_o = detail::phi_orth_raw(U, P.p_orth);
    const double phi_d = detail::phi_dist_raw(U, P.p_dist, partition);
    if (phi_o <= cfg.binary_tol && phi_d <= cfg.binary_tol) {
      auto snapped = snap_to_binary(U, partition, cfg.binary_tol);
      report.total_inner_iterations = stats.iterations;
      report.total_backtracks = stats.backtracks;
      report.wall_time =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        start)
              .count();
      if (!snapped) {
        report.phi_orth_final = phi_o;
        report.phi_dist_final = phi_d;
        report.final_objective = detail::objective_raw(U, sbar, d, P);
        report.miqp_objective =
            frobenius_form(AssignmentMatrix(partition, U), S);
        report.universe_estimate = count_nonzero_columns(U);
        report.converged_feasible = false;
        throw NotConvergedError(
            "solve: penalties vanished but the iterate does not snap to a "
            "feasible binary point",
            report, U);
      }
      AssignmentMatrix assignment(partition, std::move(*snapped));
      Clustering clustering = extract_clusters(assignment);
      report.phi_orth_final = 0.0;
      report.phi_dist_final = 0.0;
      report.final_objective =
          detail::objective_raw(assignment.values(), sbar, d, P);
      report.miqp_objective = frobenius_form(assignment, S);
      report.universe_estimate = clustering.universe_estimate;
      report.converged_feasible = true;
      return SolveResult{std::move(assignment), std::move(clustering),
                         std::move(report)};
    }

    const bool stalled = (U - previous).cwiseAbs().maxCoeff() <= 1e-12;
    if (stalled) {
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
          U(r, c) += saddle_nudge * detail::uniform01(rng);
      U = project_rows(U);
    }
    previous = U;

    // Doubling schedule. A zero start (fully clamped median) falls back to
    // d=1, and the last update is clamped so the final inner solve runs at
    // d >= m+1, the regime where feasibility of local minima is guaranteed.
    double next = 2.0 * d;
    if (next <= d) next = 1.0;
    if (outer == cfg.max_outer_iters - 2 && next < d_feasible)
      next = d_feasible;
    d = next;
  }

  report.total_inner_iterations = stats.iterations;
  report.total_backtracks = stats.backtracks;
  report.wall_time = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  report.phi_orth_final = detail::phi_orth_raw(U, P.p_orth);
  report.phi_dist_final = detail::phi_dist_raw(U, P.p_dist, partition);
  report.final_objective =
      detail::objective_raw(U, sbar, report.d_trajectory.back(), P);
  report.miqp_objective = frobenius_form(AssignmentMatrix(partition, U), S);
  report.universe_estimate = count_nonzero_columns(U);
  report.converged_feasible = false;
  throw NotConvergedError(
      "solve: exhausted max_outer_iters without a feasible binary point "
      "(phi_orth=" +
          std::to_string(report.phi_orth_final) +
          ", phi_dist=" + std::to_string(report.phi_dist_final) + ")",
      report, U);
}

Clustering extract_clusters(const AssignmentMatrix& U) {
  const Matrix& u = U.values();
  const int m = U.size();
  std::vector<int> column_label(m, -1);
  Clustering out;
  out.labels.resize(m);
  int next_label = 0;
  for (int r = 0; r < m; ++r) {
    int col = -1;
    for (int c = 0; c < m; ++c) {
      const double v = u(r, c);
      if (v == 1.0) {
        if (col >= 0)
          throw ValidationError("extract_clusters: row " + std::to_string(r) +
                                " has multiple unit entries");
        col = c;
      } else if (v != 0.0) {
        throw ValidationError("extract_clusters: non-binary entry at (" +
                              std::to_string(r) + "," + std::to_string(c) +
                              ")");
      }
    }
    if (col < 0)
      throw ValidationError("extract_clusters: row " + std::to_string(r) +
                            " has no unit entry");
    if (column_label[col] < 0) column_label[col] = next_label++;
    out.labels[r] = column_label[col];
  }
  out.universe_estimate = next_label;
  return out;
}

bool is_feasible(const AssignmentMatrix& U, double eps) {
  const Matrix& u = U.values();
  const int m = U.size();
  for (int r = 0; r < m; ++r) {
    double sum = 0.0;
    for (int c = 0; c < m; ++c) {
      const double v = u(r, c);
      if (std::min(std::abs(v), std::abs(v - 1.0)) > eps) return false;
      sum += v;
    }
    if (std::abs(sum - 1.0) > eps) return false;
  }
  const PenaltyPair P = build_penalties(U.partition());
  return detail::phi_orth_raw(u, P.p_orth) <= eps &&
         detail::phi_dist_raw(u, P.p_dist, U.partition()) <= eps;
}

}  // namespace mixer
