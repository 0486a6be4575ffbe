#pragma once

#include <cstdint>

#include "priceopt/instance.hpp"
#include "priceopt/partition.hpp"

namespace priceopt {

inline constexpr int kOracleMaxN = 20;
inline constexpr std::uint64_t kOracleMaxPartitions = 1000000;
inline constexpr int kBruteProjectionMaxN = 10;

/// Number of partitions with between 1 and k changes: sum_{i=1..k} C(n, i) 2^i.
/// Requires 1 <= k <= n <= 20.
std::uint64_t count_partitions(int n, int k);

struct RestrictedSolution {
  Vector p;
  double q_value = 0.0;
};

/// Exact minimizer of Q over the piece of the feasible set fixed by `partition`,
/// by enumerating which interval ends are active and solving the free system
/// with a dense LDL^T factorization. Requires n <= 20.
RestrictedSolution solve_restricted(const Instance& instance, const Partition& partition);

struct GlobalOptimum {
  Vector p;
  double q_value = 0.0;
  Partition partition;
  std::uint64_t pieces_evaluated = 0;  // partitions solved, baseline included
};

/// Minimum of Q over every partition plus the unchanged baseline. Equal values
/// resolve to the lexicographically smallest partition encoding. Throws
/// CapacityError when n > 20 or the partition count exceeds 10^6.
GlobalOptimum global_optimum(const Instance& instance);

/// Euclidean projection of q by enumerating every support of size <= k and the
/// three candidate intervals per supported coordinate. Requires n <= 10.
Vector brute_projection(const Instance& instance, const Vector& q);

}  // namespace priceopt
