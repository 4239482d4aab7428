#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mixer {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input data failed validation (dimensions, symmetry, value ranges, ...).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Cardinalities m_1..m_n of the n views partitioning the m observation rows.
class ViewPartition {
 public:
  explicit ViewPartition(std::vector<int> cardinalities)
      : cardinalities_(std::move(cardinalities)) {
    if (cardinalities_.empty())
      throw ValidationError("ViewPartition: need at least one view");
    offsets_.reserve(cardinalities_.size());
    total_ = 0;
    for (std::size_t i = 0; i < cardinalities_.size(); ++i) {
      if (cardinalities_[i] < 1)
        throw ValidationError("ViewPartition: cardinality of view " +
                              std::to_string(i) + " must be >= 1, got " +
                              std::to_string(cardinalities_[i]));
      offsets_.push_back(total_);
      total_ += cardinalities_[i];
    }
  }

  int num_views() const { return static_cast<int>(cardinalities_.size()); }
  int total() const { return total_; }
  int cardinality(int view) const { return cardinalities_.at(view); }
  int offset(int view) const { return offsets_.at(view); }
  const std::vector<int>& cardinalities() const { return cardinalities_; }

  /// View index owning observation row r.
  int view_of_row(int r) const {
    if (r < 0 || r >= total_)
      throw ValidationError("ViewPartition: row " + std::to_string(r) +
                            " out of range [0," + std::to_string(total_) + ")");
    int v = num_views() - 1;
    while (offsets_[v] > r) --v;
    return v;
  }

  friend bool operator==(const ViewPartition& a, const ViewPartition& b) {
    return a.cardinalities_ == b.cardinalities_;
  }
  friend bool operator!=(const ViewPartition& a, const ViewPartition& b) {
    return !(a == b);
  }

 private:
  std::vector<int> cardinalities_;
  std::vector<int> offsets_;
  int total_;
};

/// Symmetric m x m matrix of pairwise affinities in [0,1], unit diagonal.
/// Construction enforces the invariants exactly; use validate_affinity()
/// (core.hpp) to admit raw data within tolerances.
class AffinityMatrix {
 public:
  AffinityMatrix(ViewPartition partition, Matrix values)
      : partition_(std::move(partition)), values_(std::move(values)) {
    const int m = partition_.total();
    if (values_.rows() != m || values_.cols() != m)
      throw ValidationError("AffinityMatrix: expected " + std::to_string(m) +
                            "x" + std::to_string(m) + " values, got " +
                            std::to_string(values_.rows()) + "x" +
                            std::to_string(values_.cols()));
    for (int a = 0; a < m; ++a) {
      if (values_(a, a) != 1.0)
        throw ValidationError("AffinityMatrix: diagonal entry (" +
                              std::to_string(a) + "," + std::to_string(a) +
                              ") must be 1");
      for (int b = a + 1; b < m; ++b) {
        if (values_(a, b) != values_(b, a))
          throw ValidationError("AffinityMatrix: asymmetry at (" +
                                std::to_string(a) + "," + std::to_string(b) +
                                ")");
        if (!(values_(a, b) >= 0.0 && values_(a, b) <= 1.0))
          throw ValidationError("AffinityMatrix: entry (" + std::to_string(a) +
                                "," + std::to_string(b) +
                                ") out of [0,1]: " +
                                std::to_string(values_(a, b)));
      }
    }
  }

  const ViewPartition& partition() const { return partition_; }
  const Matrix& values() const { return values_; }
  int size() const { return partition_.total(); }

 private:
  ViewPartition partition_;
  Matrix values_;
};

/// Nonnegative m x m matrix with unit row sums (row-wise standard simplex).
class AssignmentMatrix {
 public:
  static constexpr double kRowSumTol = 1e-9;

  AssignmentMatrix(ViewPartition partition, Matrix values)
      : partition_(std::move(partition)), values_(std::move(values)) {
    const int m = partition_.total();
    if (values_.rows() != m || values_.cols() != m)
      throw ValidationError("AssignmentMatrix: expected " + std::to_string(m) +
                            "x" + std::to_string(m) + " values, got " +
                            std::to_string(values_.rows()) + "x" +
                            std::to_string(values_.cols()));
    for (int r = 0; r < m; ++r) {
      double sum = 0.0;
      for (int c = 0; c < m; ++c) {
        if (!(values_(r, c) >= 0.0))
          throw ValidationError("AssignmentMatrix: negative entry at (" +
                                std::to_string(r) + "," + std::to_string(c) +
                                ")");
        sum += values_(r, c);
      }
      if (std::abs(sum - 1.0) > kRowSumTol)
        throw ValidationError("AssignmentMatrix: row " + std::to_string(r) +
                              " sums to " + std::to_string(sum));
    }
  }

  const ViewPartition& partition() const { return partition_; }
  const Matrix& values() const { return values_; }
  int size() const { return partition_.total(); }

 private:
  ViewPartition partition_;
  Matrix values_;
};

/// Orthogonality and distinctness penalty matrices P_o, P_d.
/// Unperturbed: P_o = 1 - I and P_d = blockdiag(1_{m_i x m_i} - I).
struct PenaltyPair {
  ViewPartition partition;
  Matrix p_orth;
  Matrix p_dist;
};

struct SolverConfig {
  double inner_tol = 1e-9;       // relative objective change per inner iterate
  int max_inner_iters = 2000;
  int max_outer_iters = 40;
  double armijo_c = 1e-4;
  double armijo_shrink = 0.5;
  int max_backtracks = 60;
  double initial_step = 1.0;
  double perturb_scale = 0.1;
  double binary_tol = 1e-6;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (!(inner_tol > 0)) throw ValidationError("SolverConfig: inner_tol must be > 0");
    if (!(binary_tol > 0)) throw ValidationError("SolverConfig: binary_tol must be > 0");
    if (!(armijo_c > 0 && armijo_c < 1))
      throw ValidationError("SolverConfig: armijo_c must be in (0,1)");
    if (!(armijo_shrink > 0 && armijo_shrink < 1))
      throw ValidationError("SolverConfig: armijo_shrink must be in (0,1)");
    if (!(initial_step > 0)) throw ValidationError("SolverConfig: initial_step must be > 0");
    if (max_inner_iters < 1 || max_outer_iters < 1 || max_backtracks < 1)
      throw ValidationError("SolverConfig: iteration limits must be >= 1");
    if (!(perturb_scale >= 0)) throw ValidationError("SolverConfig: perturb_scale must be >= 0");
  }
};

}  // namespace mixer
