#include "priceopt/instance.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "priceopt/errors.hpp"

namespace priceopt {

namespace {

void require_length(const Vector& v, int n, const char* name) {
  if (v.size() != n) {
    throw StructuralError(std::string("field '") + name + "' has length " +
                          std::to_string(v.size()) + ", expected " + std::to_string(n));
  }
}

void require_finite(const Vector& v, const char* name) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw StructuralError(std::string("field '") + name + "' has a non-finite entry at index " +
                            std::to_string(i));
    }
  }
}

}  // namespace

SparseMatrix SparseMatrix::from_triplets(int n, std::vector<Triplet> entries) {
  if (n < 1) throw StructuralError("matrix dimension must be positive");
  for (const Triplet& t : entries) {
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n) {
      throw StructuralError("matrix entry (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                            ") out of range for n = " + std::to_string(n));
    }
    if (!std::isfinite(t.value)) {
      throw StructuralError("matrix entry (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                            ") is not finite");
    }
    if (t.value == 0.0) {
      throw StructuralError("matrix entry (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                            ") is an explicitly stored zero");
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& x, const Triplet& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });

  SparseMatrix m;
  m.n_ = n;
  m.row_start_.assign(static_cast<std::size_t>(n) + 1, 0);
  m.cols_.reserve(entries.size());
  m.values_.reserve(entries.size());
  for (std::size_t e = 0; e < entries.size(); ++e) {
    if (e > 0 && entries[e].row == entries[e - 1].row && entries[e].col == entries[e - 1].col) {
      throw StructuralError("duplicate matrix entry (" + std::to_string(entries[e].row) + ", " +
                            std::to_string(entries[e].col) + ")");
    }
    m.row_start_[entries[e].row + 1]++;
    m.cols_.push_back(entries[e].col);
    m.values_.push_back(entries[e].value);
  }
  for (int i = 0; i < n; ++i) m.row_start_[i + 1] += m.row_start_[i];

  for (int i = 0; i < n; ++i) {
    auto cols = m.row_columns(i);
    if (!std::binary_search(cols.begin(), cols.end(), i)) {
      throw StructuralError("matrix row " + std::to_string(i) + " has no diagonal entry");
    }
  }
  return m;
}

void SparseMatrix::multiply(const Vector& x, Vector& y) const {
  y.resize(n_);
  for (int i = 0; i < n_; ++i) {
    double sum = 0.0;
    for (int e = row_start_[i]; e < row_start_[i + 1]; ++e) sum += values_[e] * x[cols_[e]];
    y[i] = sum;
  }
}

void SparseMatrix::multiply_transpose(const Vector& x, Vector& y) const {
  y.setZero(n_);
  for (int i = 0; i < n_; ++i) {
    const double xi = x[i];
    for (int e = row_start_[i]; e < row_start_[i + 1]; ++e) y[cols_[e]] += values_[e] * xi;
  }
}

Vector SparseMatrix::diagonal() const {
  Vector diag(n_);
  for (int i = 0; i < n_; ++i) {
    auto cols = row_columns(i);
    auto it = std::lower_bound(cols.begin(), cols.end(), i);
    diag[i] = values_[row_start_[i] + (it - cols.begin())];
  }
  return diag;
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(values_.size());
  for (int i = 0; i < n_; ++i) {
    for (int e = row_start_[i]; e < row_start_[i + 1]; ++e) out.push_back({i, cols_[e], values_[e]});
  }
  return out;
}

std::vector<Triplet> symmetric_part(const SparseMatrix& d) {
  std::vector<Triplet> both = d.triplets();
  const std::size_t m = both.size();
  both.reserve(2 * m);
  for (std::size_t e = 0; e < m; ++e) both.push_back({both[e].col, both[e].row, both[e].value});
  std::sort(both.begin(), both.end(), [](const Triplet& x, const Triplet& y) {
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });
  std::vector<Triplet> out;
  out.reserve(both.size());
  for (const Triplet& t : both) {
    if (!out.empty() && out.back().row == t.row && out.back().col == t.col) {
      out.back().value += t.value;
    } else {
      out.push_back(t);
    }
  }
  std::erase_if(out, [](const Triplet& t) { return t.value == 0.0; });
  return out;
}

Instance::Instance(int k, Vector a, SparseMatrix d, Vector c, Vector p0, Vector delta,
                   std::optional<PriceBounds> bounds)
    : k_(k),
      a_(std::move(a)),
      d_(std::move(d)),
      c_(std::move(c)),
      p0_(std::move(p0)),
      delta_(std::move(delta)),
      bounds_(std::move(bounds)) {
  const int n = static_cast<int>(a_.size());
  if (n < 1) throw StructuralError("instance must have at least one product");
  if (k_ < 1 || k_ > n) {
    throw StructuralError("field 'k' = " + std::to_string(k_) + " must lie in [1, " + std::to_string(n) + "]");
  }
  if (d_.size() != n) {
    throw StructuralError("field 'D' has dimension " + std::to_string(d_.size()) + ", expected " +
                          std::to_string(n));
  }
  require_length(c_, n, "c");
  require_length(p0_, n, "p0");
  require_length(delta_, n, "delta");
  require_finite(a_, "a");
  require_finite(c_, "c");
  require_finite(p0_, "p0");
  require_finite(delta_, "delta");
  if (bounds_) {
    require_length(bounds_->lower, n, "l");
    require_length(bounds_->upper, n, "u");
    require_finite(bounds_->lower, "l");
    require_finite(bounds_->upper, "u");
  }
  Vector dtc;
  d_.multiply_transpose(c_, dtc);
  f_ = a_ + dtc;
}

double Instance::min_delta() const { return delta_.minCoeff(); }

Vector Instance::symmetric_multiply(const Vector& p) const {
  Vector dp;
  Vector dtp;
  d_.multiply(p, dp);
  d_.multiply_transpose(p, dtp);
  return dp + dtp;
}

Instance Instance::with_k(int k) const {
  return Instance(k, a_, d_, c_, p0_, delta_, bounds_);
}

bool Instance::operator==(const Instance& other) const {
  if (k_ != other.k_ || n() != other.n()) return false;
  if (a_ != other.a_ || c_ != other.c_ || p0_ != other.p0_ || delta_ != other.delta_) return false;
  if (!(d_ == other.d_)) return false;
  if (bounds_.has_value() != other.bounds_.has_value()) return false;
  if (bounds_ && (bounds_->lower != other.bounds_->lower || bounds_->upper != other.bounds_->upper)) {
    return false;
  }
  return true;
}

}  // namespace priceopt
