#pragma once

#include <utility>
#include <vector>

#include "mixer/types.hpp"

namespace mixer {

/// Globally minimize ||UU^T - S||_F^2 over view-constrained partitions by
/// restricted-growth-string enumeration. Guard: m <= 10. Ties broken by the
/// lexicographically smallest growth string.
std::pair<AssignmentMatrix, double> brute_force_miqp(const AffinityMatrix& S);

/// Maximum-weight bipartite matching on pairwise scores: maximizes
/// sum(2 s_ij - 1) over one-to-one pairs, never selecting s <= 0.5.
/// Exhaustive over partial matchings when min(m1,m2) <= 6, classical O(n^3)
/// assignment on the zero-padded square problem otherwise.
std::vector<std::pair<int, int>> hungarian_mwm(const Matrix& s_pair);

/// Dense active-set reference for the simplex projection: enumerates all
/// 2^n - 1 support patterns. Guard: n <= 10.
Vector simplex_qp_oracle(const Vector& v);

/// f_solution - f_optimum (absolute gap under the Frobenius objective).
double optimality_gap(double f_solution, double f_optimum);

}  // namespace mixer
