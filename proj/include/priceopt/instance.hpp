#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace priceopt {

using Vector = Eigen::VectorXd;

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;

  bool operator==(const Triplet&) const = default;
};

/// Square sparse matrix in compressed row form. Columns are sorted within
/// each row, no explicit zeros are stored, and every row carries its diagonal.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Builds the matrix from unordered triplets. Throws StructuralError on
  /// out-of-range indices, duplicates, stored zeros, non-finite values or a
  /// missing diagonal entry.
  static SparseMatrix from_triplets(int n, std::vector<Triplet> entries);

  int size() const { return n_; }
  std::size_t nonzeros() const { return values_.size(); }

  /// y = D x
  void multiply(const Vector& x, Vector& y) const;
  /// y = D^T x
  void multiply_transpose(const Vector& x, Vector& y) const;

  Vector diagonal() const;

  std::span<const int> row_columns(int row) const {
    return {cols_.data() + row_start_[row], cols_.data() + row_start_[row + 1]};
  }
  std::span<const double> row_values(int row) const {
    return {values_.data() + row_start_[row], values_.data() + row_start_[row + 1]};
  }

  /// Entries in row-major order.
  std::vector<Triplet> triplets() const;

  bool operator==(const SparseMatrix&) const = default;

 private:
  int n_ = 0;
  std::vector<int> row_start_{0};
  std::vector<int> cols_;
  std::vector<double> values_;
};

/// Off-diagonal and diagonal entries of S = D + D^T, row-major, exact zeros
/// from cancellation dropped.
std::vector<Triplet> symmetric_part(const SparseMatrix& d);

struct PriceBounds {
  Vector lower;
  Vector upper;
};

/// One price-optimization problem: linear demand v(p) = a - D p, unit costs c,
/// baseline prices p0, minimum change thresholds delta, at most k changes, and
/// optionally per-product price bounds.
///
/// Construction checks structure only (lengths, finiteness, sparse layout,
/// 1 <= k <= n). Modelling assumptions such as positive thresholds are
/// reported by validate() and enforced by the operations that need them.
class Instance {
 public:
  Instance(int k, Vector a, SparseMatrix d, Vector c, Vector p0, Vector delta,
           std::optional<PriceBounds> bounds = std::nullopt);

  int n() const { return static_cast<int>(a_.size()); }
  int k() const { return k_; }
  const Vector& a() const { return a_; }
  const SparseMatrix& d() const { return d_; }
  const Vector& c() const { return c_; }
  const Vector& p0() const { return p0_; }
  const Vector& delta() const { return delta_; }
  const std::optional<PriceBounds>& bounds() const { return bounds_; }
  bool has_bounds() const { return bounds_.has_value(); }

  /// f = a + D^T c, the linear coefficient of the minimization objective.
  const Vector& linear_coef() const { return f_; }

  double min_delta() const;

  /// S p computed as D p + D^T p.
  Vector symmetric_multiply(const Vector& p) const;

  /// Same data with a different change budget.
  Instance with_k(int k) const;

  bool operator==(const Instance& other) const;

 private:
  int k_;
  Vector a_;
  SparseMatrix d_;
  Vector c_;
  Vector p0_;
  Vector delta_;
  std::optional<PriceBounds> bounds_;
  Vector f_;
};

}  // namespace priceopt
