#include "mixer/core.hpp"

#include <cmath>
#include <string>

namespace mixer {

namespace {

void require_same_shape(const Matrix& U, int m, const char* op) {
  if (U.rows() != m || U.cols() != m)
    throw ValidationError(std::string(op) + ": dimension mismatch, expected " +
                          std::to_string(m) + "x" + std::to_string(m) +
                          ", got " + std::to_string(U.rows()) + "x" +
                          std::to_string(U.cols()));
}

}  // namespace

PenaltyPair build_penalties(const ViewPartition& partition) {
  const int m = partition.total();
  Matrix p_orth = Matrix::Ones(m, m) - Matrix::Identity(m, m);
  Matrix p_dist = Matrix::Zero(m, m);
  for (int v = 0; v < partition.num_views(); ++v) {
    const int off = partition.offset(v);
    const int mi = partition.cardinality(v);
    p_dist.block(off, off, mi, mi) =
        Matrix::Ones(mi, mi) - Matrix::Identity(mi, mi);
  }
  return PenaltyPair{partition, std::move(p_orth), std::move(p_dist)};
}

namespace detail {

double phi_orth_raw(const Matrix& U, const Matrix& p_orth) {
  // <U^T U, P_o> = <U, U P_o>
  return (U.cwiseProduct(U * p_orth)).sum();
}

Matrix pdist_times(const Matrix& p_dist, const Matrix& U,
                   const ViewPartition& partition) {
  Matrix out = Matrix::Zero(U.rows(), U.cols());
  for (int v = 0; v < partition.num_views(); ++v) {
    const int off = partition.offset(v);
    const int mi = partition.cardinality(v);
    out.middleRows(off, mi).noalias() =
        p_dist.block(off, off, mi, mi) * U.middleRows(off, mi);
  }
  return out;
}

double phi_dist_raw(const Matrix& U, const Matrix& p_dist,
                    const ViewPartition& partition) {
  // <U U^T, P_d> = <U, P_d U>
  return (U.cwiseProduct(pdist_times(p_dist, U, partition))).sum();
}

double objective_raw(const Matrix& U, const Matrix& sbar, double d,
                     const PenaltyPair& P) {
  const double data = (U.cwiseProduct(sbar * U)).sum();
  return data + d * (phi_orth_raw(U, P.p_orth) +
                     phi_dist_raw(U, P.p_dist, P.partition));
}

Matrix gradient_raw(const Matrix& U, const Matrix& sbar, double d,
                    const PenaltyPair& P) {
  Matrix g = 2.0 * (sbar * U);
  g.noalias() += (2.0 * d) * (U * P.p_orth);
  g += (2.0 * d) * pdist_times(P.p_dist, U, P.partition);
  return g;
}

}  // namespace detail

double phi_orth(const AssignmentMatrix& U, const PenaltyPair& P) {
  require_same_shape(P.p_orth, U.size(), "phi_orth");
  return detail::phi_orth_raw(U.values(), P.p_orth);
}

double phi_dist(const AssignmentMatrix& U, const PenaltyPair& P) {
  require_same_shape(P.p_dist, U.size(), "phi_dist");
  if (P.partition != U.partition())
    throw ValidationError("phi_dist: partition mismatch");
  return detail::phi_dist_raw(U.values(), P.p_dist, P.partition);
}

double objective(const AssignmentMatrix& U, const AffinityMatrix& S, double d,
                 const PenaltyPair& P) {
  require_same_shape(S.values(), U.size(), "objective");
  require_same_shape(P.p_orth, U.size(), "objective");
  if (d < 0) throw ValidationError("objective: penalty weight d must be >= 0");
  const Matrix sbar =
      Matrix::Ones(U.size(), U.size()) - 2.0 * S.values();
  return detail::objective_raw(U.values(), sbar, d, P);
}

Matrix gradient(const AssignmentMatrix& U, const AffinityMatrix& S, double d,
                const PenaltyPair& P) {
  require_same_shape(S.values(), U.size(), "gradient");
  require_same_shape(P.p_orth, U.size(), "gradient");
  if (d < 0) throw ValidationError("gradient: penalty weight d must be >= 0");
  const Matrix sbar =
      Matrix::Ones(U.size(), U.size()) - 2.0 * S.values();
  return detail::gradient_raw(U.values(), sbar, d, P);
}

double frobenius_form(const AssignmentMatrix& U, const AffinityMatrix& S) {
  require_same_shape(S.values(), U.size(), "frobenius_form");
  const Matrix& u = U.values();
  return (u * u.transpose() - S.values()).squaredNorm();
}

AffinityMatrix combine_affinities(const std::vector<AffinityMatrix>& matrices,
                                  const std::vector<double>& weights) {
  if (matrices.empty())
    throw ValidationError("combine_affinities: no input matrices");
  if (weights.size() != matrices.size())
    throw ValidationError("combine_affinities: " +
                          std::to_string(matrices.size()) + " matrices but " +
                          std::to_string(weights.size()) + " weights");
  const ViewPartition& partition = matrices.front().partition();
  double total_weight = 0.0;
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    if (matrices[i].partition() != partition)
      throw ValidationError("combine_affinities: matrix " + std::to_string(i) +
                            " has a different partition");
    if (weights[i] < 0)
      throw ValidationError("combine_affinities: weight " + std::to_string(i) +
                            " is negative");
    total_weight += weights[i];
  }
  if (total_weight <= 0)
    throw ValidationError("combine_affinities: total weight is zero");

  const int m = partition.total();
  Matrix out = Matrix::Zero(m, m);
  for (std::size_t i = 0; i < matrices.size(); ++i)
    out += weights[i] * matrices[i].values();
  out /= total_weight;
  // Convex combination of valid affinities: symmetric, in [0,1]. Restore the
  // unit diagonal exactly and guard against last-bit drift.
  for (int a = 0; a < m; ++a) {
    out(a, a) = 1.0;
    for (int b = a + 1; b < m; ++b) {
      double v = std::min(1.0, std::max(0.0, out(a, b)));
      out(a, b) = v;
      out(b, a) = v;
    }
  }
  return AffinityMatrix(partition, std::move(out));
}

AffinityMatrix validate_affinity(const Matrix& values,
                                 const ViewPartition& partition) {
  constexpr double tol = 1e-9;
  const int m = partition.total();
  if (values.rows() != m || values.cols() != m)
    throw ValidationError("validate_affinity: dimension mismatch, expected " +
                          std::to_string(m) + "x" + std::to_string(m) +
                          ", got " + std::to_string(values.rows()) + "x" +
                          std::to_string(values.cols()));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      if (!std::isfinite(values(a, b)))
        throw ValidationError("validate_affinity: non-finite entry at (" +
                              std::to_string(a) + "," + std::to_string(b) +
                              ")");
      if (b > a && std::abs(values(a, b) - values(b, a)) > tol)
        throw ValidationError("validate_affinity: asymmetry at (" +
                              std::to_string(a) + "," + std::to_string(b) +
                              "): " + std::to_string(values(a, b)) + " vs " +
                              std::to_string(values(b, a)));
      if (values(a, b) < -tol || values(a, b) > 1.0 + tol)
        throw ValidationError("validate_affinity: entry at (" +
                              std::to_string(a) + "," + std::to_string(b) +
                              ") out of [0,1]: " + std::to_string(values(a, b)));
    }

  Matrix out(m, m);
  for (int a = 0; a < m; ++a) {
    out(a, a) = 1.0;
    for (int b = a + 1; b < m; ++b) {
      double v = 0.5 * (values(a, b) + values(b, a));
      v = std::min(1.0, std::max(0.0, v));
      out(a, b) = v;
      out(b, a) = v;
    }
  }
  return AffinityMatrix(partition, std::move(out));
}

}  // namespace mixer
