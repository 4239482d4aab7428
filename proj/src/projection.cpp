#include "mixer/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace mixer {

namespace {

// Sort-and-threshold projection of one row, writing into out[0..m).
// Scratch holds the index heap to avoid reallocating per row. Only the
// descending prefix up to rho = max { j : u_j - (sum_{i<=j} u_i - 1)/j > 0 }
// is needed, so a heap pop beats a full sort; ties break by original index,
// matching a stable descending sort bit for bit.
void project_into(const double* v, int m, double* out, std::vector<int>& order) {
  order.resize(m);
  std::iota(order.begin(), order.end(), 0);
  const auto before = [&](int a, int b) {
    return v[a] > v[b] || (v[a] == v[b] && a < b);
  };
  // std::*_heap keep the max element per `comp` at front when comp = less;
  // our "less" is the reverse of `before`.
  const auto heap_less = [&](int a, int b) { return before(b, a); };
  std::make_heap(order.begin(), order.end(), heap_less);

  double cumsum = 0.0;
  double theta = 0.0;
  auto end = order.end();
  for (int j = 0; j < m; ++j) {
    std::pop_heap(order.begin(), end, heap_less);
    --end;
    const double u = v[*end];
    cumsum += u;
    const double candidate = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u - candidate > 0.0)
      theta = candidate;
    else
      break;
  }
  for (int i = 0; i < m; ++i) out[i] = std::max(v[i] - theta, 0.0);
}

}  // namespace

Vector project_row_simplex(const Vector& v) {
  const int m = static_cast<int>(v.size());
  if (m == 0) throw ValidationError("project_row_simplex: empty vector");
  for (int i = 0; i < m; ++i)
    if (!std::isfinite(v[i]))
      throw ValidationError("project_row_simplex: non-finite entry at index " +
                            std::to_string(i));
  Vector out(m);
  std::vector<int> order;
  project_into(v.data(), m, out.data(), order);
  return out;
}

Matrix project_rows(const Matrix& M) {
  const int rows = static_cast<int>(M.rows());
  const int cols = static_cast<int>(M.cols());
  if (rows == 0 || cols == 0)
    throw ValidationError("project_rows: empty matrix");
  if (!M.allFinite())
    throw ValidationError("project_rows: non-finite entry");
  // Rows of a column-major matrix are strided; work on the transpose so each
  // row is projected from and into contiguous storage.
  Matrix transposed = M.transpose();
  std::vector<int> order;
  std::vector<double> proj(cols);
  for (int r = 0; r < rows; ++r) {
    double* column = transposed.col(r).data();
    project_into(column, cols, proj.data(), order);
    std::copy(proj.begin(), proj.end(), column);
  }
  return transposed.transpose();
}

AssignmentMatrix project_simplex(const Matrix& M,
                                 const ViewPartition& partition) {
  if (M.rows() != partition.total() || M.cols() != partition.total())
    throw ValidationError("project_simplex: matrix does not match partition");
  return AssignmentMatrix(partition, project_rows(M));
}

}  // namespace mixer
