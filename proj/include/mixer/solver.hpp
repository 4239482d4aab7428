#pragma once

#include <random>
#include <vector>

#include "mixer/core.hpp"
#include "mixer/types.hpp"

namespace mixer {

struct SolveReport {
  double final_objective = 0.0;   // F at the returned U (unperturbed penalties)
  double miqp_objective = 0.0;    // ||UU^T - S||_F^2 at the returned U
  double phi_orth_final = 0.0;
  double phi_dist_final = 0.0;
  std::vector<double> d_trajectory;
  int outer_iterations = 0;
  int total_inner_iterations = 0;
  int total_backtracks = 0;
  double wall_time = 0.0;         // seconds
  int universe_estimate = 0;      // nonzero columns of the returned U
  bool converged_feasible = false;
};

struct Clustering {
  std::vector<int> labels;        // per observation row, in [0, universe_estimate)
  int universe_estimate = 0;
};

struct SolveResult {
  AssignmentMatrix assignment;
  Clustering clustering;
  SolveReport report;
};

/// Raised when no feasible binary point was reached. Carries the report and
/// the last (non-binary) iterate so callers can still inspect or persist it.
class NotConvergedError : public Error {
 public:
  NotConvergedError(const std::string& what, SolveReport report, Matrix last)
      : Error(what), report(std::move(report)), last_iterate(std::move(last)) {}
  SolveReport report;
  Matrix last_iterate;
};

/// Eigenvector initialization: project the eigenvector matrix of 1-2S
/// (columns ordered by ascending eigenvalue) onto the row simplex.
AssignmentMatrix initialize(const AffinityMatrix& S);

/// Initial penalty weight: median of D = { -(1-2S)_ij / G_ij : G_ij > 0,
/// U_ij > 0 } with G = U P_o + P_d U; 1 when D is empty; clamped to >= 0.
double init_penalty_weight(const AssignmentMatrix& U, const AffinityMatrix& S,
                           const PenaltyPair& P);

/// Projected gradient descent at fixed d with Armijo backtracking line
/// search. The descent treats the self-affinity diagonal as absent (it is
/// constant on every feasible binary point but creates self-attraction
/// barriers off them); accepted values of that descent objective are
/// non-increasing.
AssignmentMatrix pgd_inner(const AssignmentMatrix& U, const AffinityMatrix& S,
                           double d, const PenaltyPair& P,
                           const SolverConfig& cfg);

/// Multiply every originally-nonzero entry of P_o, P_d by (1 + u),
/// u ~ Uniform[0, scale), mirrored across the diagonal.
PenaltyPair perturb_penalties(const PenaltyPair& P, double scale,
                              std::mt19937_64& rng);

/// Full MIXER solve: eigenvector init, median-then-doubling d schedule,
/// perturbed-penalty inner solves, exact snap on feasibility.
SolveResult solve(const AffinityMatrix& S, const SolverConfig& cfg);

/// Labels from a binary assignment: nonzero columns enumerated in order of
/// first nonzero row.
Clustering extract_clusters(const AssignmentMatrix& U);

/// True iff every entry is within eps of {0,1}, row sums within eps of 1,
/// and both penalties (unperturbed) are <= eps.
bool is_feasible(const AssignmentMatrix& U, double eps);

namespace detail {

struct InnerStats {
  int iterations = 0;
  int backtracks = 0;
};

/// Workhorse behind pgd_inner, operating on the raw iterate in place.
void pgd_inner_raw(Matrix& U, const Matrix& sbar, double d,
                   const PenaltyPair& P, const SolverConfig& cfg,
                   InnerStats& stats);

/// Uniform double in [0,1) from the top 53 bits of the generator,
/// independent of any library distribution implementation.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

}  // namespace mixer
