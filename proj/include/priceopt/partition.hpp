#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "priceopt/instance.hpp"

namespace priceopt {

enum class Move : std::uint8_t { Unchanged = 0, Raised = 1, Lowered = 2 };

/// Index triple (alpha, beta, gamma): coordinates held at baseline, raised by
/// at least delta, lowered by at least delta. Stored as one label per product.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<Move> labels) : labels_(std::move(labels)) {}

  /// Classifies p: |p_i - p0_i| < delta_i / 2 counts as unchanged, otherwise
  /// the side of p0 decides.
  static Partition of(const Instance& instance, const Vector& p);

  static Partition from_sets(int n, const std::vector<int>& alpha, const std::vector<int>& beta,
                             const std::vector<int>& gamma);

  int size() const { return static_cast<int>(labels_.size()); }
  Move operator[](int i) const { return labels_[i]; }
  const std::vector<Move>& labels() const { return labels_; }

  std::vector<int> alpha() const { return indices(Move::Unchanged); }
  std::vector<int> beta() const { return indices(Move::Raised); }
  std::vector<int> gamma() const { return indices(Move::Lowered); }
  int changes() const;

  /// One character per product: '0' unchanged, '+' raised, '-' lowered.
  std::string encode() const;

  bool operator==(const Partition&) const = default;

 private:
  std::vector<int> indices(Move m) const;
  std::vector<Move> labels_;
};

}  // namespace priceopt
