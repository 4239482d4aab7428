#pragma once

#include "mixer/types.hpp"

namespace mixer {

/// Euclidean projection of v onto the standard simplex {x >= 0, sum x = 1},
/// by the sort-and-threshold method. O(m log m), non-iterative.
Vector project_row_simplex(const Vector& v);

/// Row-wise simplex projection of a raw matrix.
Matrix project_rows(const Matrix& M);

/// Row-wise simplex projection, returned as a typed AssignmentMatrix.
AssignmentMatrix project_simplex(const Matrix& M, const ViewPartition& partition);

}  // namespace mixer
