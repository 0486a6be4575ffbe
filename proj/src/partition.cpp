#include "priceopt/partition.hpp"

#include <algorithm>
#include <cmath>

#include "priceopt/errors.hpp"

namespace priceopt {

Partition Partition::of(const Instance& instance, const Vector& p) {
  const int n = instance.n();
  std::vector<Move> labels(n, Move::Unchanged);
  for (int i = 0; i < n; ++i) {
    const double t = p[i] - instance.p0()[i];
    if (std::abs(t) < 0.5 * instance.delta()[i]) continue;
    labels[i] = t > 0.0 ? Move::Raised : Move::Lowered;
  }
  return Partition(std::move(labels));
}

Partition Partition::from_sets(int n, const std::vector<int>& alpha, const std::vector<int>& beta,
                               const std::vector<int>& gamma) {
  std::vector<int> seen(n, 0);
  std::vector<Move> labels(n, Move::Unchanged);
  auto assign = [&](const std::vector<int>& set, Move m) {
    for (int i : set) {
      if (i < 0 || i >= n) throw ContractError("partition index out of range");
      if (seen[i]++) throw ContractError("partition sets must be disjoint");
      labels[i] = m;
    }
  };
  assign(alpha, Move::Unchanged);
  assign(beta, Move::Raised);
  assign(gamma, Move::Lowered);
  if (std::count(seen.begin(), seen.end(), 0) != 0) throw ContractError("partition sets must cover all indices");
  return Partition(std::move(labels));
}

int Partition::changes() const {
  return static_cast<int>(labels_.size()) -
         static_cast<int>(std::count(labels_.begin(), labels_.end(), Move::Unchanged));
}

std::string Partition::encode() const {
  std::string s(labels_.size(), '0');
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == Move::Raised) s[i] = '+';
    if (labels_[i] == Move::Lowered) s[i] = '-';
  }
  return s;
}

std::vector<int> Partition::indices(Move m) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == m) out.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace priceopt
