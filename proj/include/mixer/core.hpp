#pragma once

#include "mixer/types.hpp"

namespace mixer {

/// Unperturbed penalty matrices for a partition: P_o = 1-I, P_d block diagonal.
PenaltyPair build_penalties(const ViewPartition& partition);

/// <U^T U, P_o>: zero iff the columns of U are mutually orthogonal.
double phi_orth(const AssignmentMatrix& U, const PenaltyPair& P);

/// <U U^T, P_d>: zero (for binary U) iff no two same-view rows share a column.
double phi_dist(const AssignmentMatrix& U, const PenaltyPair& P);

/// Relaxed objective F(U) = <UU^T, 1-2S> + d*(phi_orth + phi_dist).
double objective(const AssignmentMatrix& U, const AffinityMatrix& S, double d,
                 const PenaltyPair& P);

/// Gradient of F: 2(1-2S)U + 2d(U P_o + P_d U).
Matrix gradient(const AssignmentMatrix& U, const AffinityMatrix& S, double d,
                const PenaltyPair& P);

/// Original MIQP objective ||UU^T - S||_F^2.
double frobenius_form(const AssignmentMatrix& U, const AffinityMatrix& S);

/// Entrywise weighted average of affinity matrices sharing one partition.
AffinityMatrix combine_affinities(const std::vector<AffinityMatrix>& matrices,
                                  const std::vector<double>& weights);

/// Admit a raw matrix as an AffinityMatrix: symmetrize within 1e-9, clamp
/// entries to [0,1] within 1e-9, force unit diagonal. Throws ValidationError
/// with offending indices otherwise.
AffinityMatrix validate_affinity(const Matrix& values,
                                 const ViewPartition& partition);

// Raw-matrix workhorses. These evaluate the same formulas on arbitrary
// matrices (the objective extends naturally off the simplex, which the
// finite-difference tests and the solver's line search rely on).
namespace detail {

double phi_orth_raw(const Matrix& U, const Matrix& p_orth);
double phi_dist_raw(const Matrix& U, const Matrix& p_dist,
                    const ViewPartition& partition);
double objective_raw(const Matrix& U, const Matrix& sbar, double d,
                     const PenaltyPair& P);
Matrix gradient_raw(const Matrix& U, const Matrix& sbar, double d,
                    const PenaltyPair& P);

/// P_d * U using the block-diagonal structure of P_d (O(sum m_i^2 * m)).
Matrix pdist_times(const Matrix& p_dist, const Matrix& U,
                   const ViewPartition& partition);

}  // namespace detail

}  // namespace mixer
