#include "priceopt/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "priceopt/errors.hpp"
#include "priceopt/model.hpp"

namespace priceopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DenseProblem {
  Eigen::MatrixXd S;
  Vector f;
};

DenseProblem dense_problem(const Instance& instance) {
  const int n = instance.n();
  DenseProblem dp{Eigen::MatrixXd::Zero(n, n), instance.linear_coef()};
  for (const Triplet& t : symmetric_part(instance.d())) dp.S(t.row, t.col) = t.value;
  return dp;
}

double dense_q(const DenseProblem& dp, const Vector& p) { return 0.5 * p.dot(dp.S * p) - dp.f.dot(p); }

// Interval of coordinate i inside the piece of `partition`.
void piece_interval(const Instance& instance, const Partition& partition, int i, double& lo, double& hi) {
  const double p0 = instance.p0()[i];
  const double d = instance.delta()[i];
  const double l = instance.has_bounds() ? instance.bounds()->lower[i] : -kInf;
  const double u = instance.has_bounds() ? instance.bounds()->upper[i] : kInf;
  switch (partition[i]) {
    case Move::Unchanged:
      lo = hi = p0;
      break;
    case Move::Raised:
      lo = p0 + d;
      hi = u;
      break;
    case Move::Lowered:
      lo = l;
      hi = p0 - d;
      break;
  }
}

RestrictedSolution solve_restricted_dense(const Instance& instance, const DenseProblem& dp,
                                          const Partition& partition) {
  const int n = instance.n();
  std::vector<double> lo(n), hi(n);
  std::vector<int> movable;
  for (int i = 0; i < n; ++i) {
    piece_interval(instance, partition, i, lo[i], hi[i]);
    if (lo[i] < hi[i]) movable.push_back(i);
  }
  const int m = static_cast<int>(movable.size());
  // Per movable coordinate: 0 free, 1 at lower end, 2 at upper end (finite ends only).
  std::vector<int> choices(m);
  for (int j = 0; j < m; ++j) {
    const int i = movable[j];
    choices[j] = 1 + (std::isfinite(lo[i]) ? 1 : 0) + (std::isfinite(hi[i]) ? 1 : 0);
  }
  std::uint64_t patterns = 1;
  for (int c : choices) patterns *= static_cast<std::uint64_t>(c);

  const double scale = std::max(1.0, dp.f.lpNorm<Eigen::Infinity>() + dp.S.lpNorm<Eigen::Infinity>());
  const double feas_tol = 1e-11 * scale;
  const double kkt_tol = 1e-9 * scale;

  RestrictedSolution best;
  best.q_value = kInf;
  std::vector<int> state(m);
  Vector p(n);
  for (std::uint64_t code = 0; code < patterns; ++code) {
    std::uint64_t rest = code;
    for (int j = 0; j < m; ++j) {
      state[j] = static_cast<int>(rest % choices[j]);
      rest /= choices[j];
    }
    std::vector<int> free_idx;
    for (int i = 0; i < n; ++i) p[i] = lo[i];  // fixed coordinates have lo == hi
    for (int j = 0; j < m; ++j) {
      const int i = movable[j];
      int s = state[j];
      if (s > 0 && !std::isfinite(lo[i])) ++s;  // only the upper end exists
      if (s == 0) {
        free_idx.push_back(i);
      } else {
        p[i] = s == 1 ? lo[i] : hi[i];
      }
    }
    const int nf = static_cast<int>(free_idx.size());
    if (nf > 0) {
      Eigen::MatrixXd A(nf, nf);
      Vector b(nf);
      for (int r = 0; r < nf; ++r) {
        const int i = free_idx[r];
        double rhs = dp.f[i];
        for (int c = 0; c < n; ++c) {
          if (std::find(free_idx.begin(), free_idx.end(), c) == free_idx.end()) rhs -= dp.S(i, c) * p[c];
        }
        b[r] = rhs;
        for (int c = 0; c < nf; ++c) A(r, c) = dp.S(i, free_idx[c]);
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw NumericError("restricted system is not positive definite");
      }
      const Vector x = ldlt.solve(b);
      bool inside = true;
      for (int r = 0; r < nf && inside; ++r) {
        const int i = free_idx[r];
        inside = x[r] >= lo[i] - feas_tol && x[r] <= hi[i] + feas_tol;
        p[i] = std::clamp(x[r], lo[i], hi[i]);
      }
      if (!inside) continue;
    }
    // Multiplier signs: at a lower end the gradient must be >= 0, at an upper end <= 0.
    const Vector g = dp.S * p - dp.f;
    bool kkt = true;
    for (int j = 0; j < m && kkt; ++j) {
      const int i = movable[j];
      if (std::find(free_idx.begin(), free_idx.end(), i) != free_idx.end()) continue;
      if (p[i] == lo[i]) kkt = g[i] >= -kkt_tol;
      else kkt = g[i] <= kkt_tol;
    }
    if (!kkt) continue;
    const double value = dense_q(dp, p);
    if (value < best.q_value) {
      best.q_value = value;
      best.p = p;
    }
  }
  if (!std::isfinite(best.q_value)) {
    throw NumericError("no active-set pattern satisfies the optimality conditions");
  }
  return best;
}

void require_oracle_size(const Instance& instance) {
  if (instance.n() > kOracleMaxN) {
    throw CapacityError("oracle is limited to n <= " + std::to_string(kOracleMaxN) + ", got n = " +
                        std::to_string(instance.n()));
  }
}

}  // namespace

std::uint64_t count_partitions(int n, int k) {
  if (k < 1 || k > n || n > kOracleMaxN) {
    throw ContractError("count_partitions requires 1 <= k <= n <= " + std::to_string(kOracleMaxN));
  }
  std::uint64_t total = 0;
  std::uint64_t binom = 1;  // C(n, i)
  for (int i = 1; i <= k; ++i) {
    binom = binom * static_cast<std::uint64_t>(n - i + 1) / static_cast<std::uint64_t>(i);
    total += binom << i;
  }
  return total;
}

RestrictedSolution solve_restricted(const Instance& instance, const Partition& partition) {
  require_oracle_size(instance);
  if (partition.size() != instance.n()) throw StructuralError("partition must have length n");
  return solve_restricted_dense(instance, dense_problem(instance), partition);
}

GlobalOptimum global_optimum(const Instance& instance) {
  require_oracle_size(instance);
  const std::uint64_t count = count_partitions(instance.n(), instance.k());
  if (count > kOracleMaxPartitions) {
    throw CapacityError("oracle would enumerate " + std::to_string(count) + " partitions, limit is " +
                        std::to_string(kOracleMaxPartitions));
  }
  const int n = instance.n();
  const int k = instance.k();
  const DenseProblem dp = dense_problem(instance);

  GlobalOptimum best;
  best.p = instance.p0();
  best.q_value = dense_q(dp, best.p);
  best.pieces_evaluated = 1;
  best.partition = Partition(std::vector<Move>(n, Move::Unchanged));
  std::string best_code = best.partition.encode();

  std::vector<Move> labels(n, Move::Unchanged);
  auto visit = [&](auto&& self, int i, int changes) -> void {
    if (i == n) {
      if (changes == 0) return;
      Partition part(labels);
      const RestrictedSolution r = solve_restricted_dense(instance, dp, part);
      ++best.pieces_evaluated;
      std::string code = part.encode();
      if (r.q_value < best.q_value || (r.q_value == best.q_value && code < best_code)) {
        best.p = r.p;
        best.q_value = r.q_value;
        best.partition = std::move(part);
        best_code = std::move(code);
      }
      return;
    }
    labels[i] = Move::Unchanged;
    self(self, i + 1, changes);
    if (changes < k) {
      labels[i] = Move::Raised;
      self(self, i + 1, changes + 1);
      labels[i] = Move::Lowered;
      self(self, i + 1, changes + 1);
      labels[i] = Move::Unchanged;
    }
  };
  visit(visit, 0, 0);
  return best;
}

Vector brute_projection(const Instance& instance, const Vector& q) {
  const int n = instance.n();
  if (n > kBruteProjectionMaxN) {
    throw CapacityError("brute_projection is limited to n <= " + std::to_string(kBruteProjectionMaxN));
  }
  if (q.size() != n) throw StructuralError("query point must have length n");
  const Vector& p0 = instance.p0();
  const Vector& delta = instance.delta();

  // Best value for coordinate i when it is allowed to change.
  std::vector<double> changed_value(n), changed_dist(n);
  for (int i = 0; i < n; ++i) {
    const double l = instance.has_bounds() ? instance.bounds()->lower[i] : -kInf;
    const double u = instance.has_bounds() ? instance.bounds()->upper[i] : kInf;
    const double candidates[3] = {std::clamp(q[i], p0[i] + delta[i], u), std::clamp(q[i], l, p0[i] - delta[i]),
                                  p0[i]};
    changed_value[i] = p0[i];
    changed_dist[i] = (q[i] - p0[i]) * (q[i] - p0[i]);
    for (double v : candidates) {
      const double d = (q[i] - v) * (q[i] - v);
      if (d < changed_dist[i]) {
        changed_dist[i] = d;
        changed_value[i] = v;
      }
    }
  }

  Vector best = p0;
  double best_dist = kInf;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) > instance.k()) continue;
    double dist = 0.0;
    for (int i = 0; i < n; ++i) {
      dist += (mask >> i & 1u) ? changed_dist[i] : (q[i] - p0[i]) * (q[i] - p0[i]);
    }
    if (dist < best_dist) {
      best_dist = dist;
      for (int i = 0; i < n; ++i) best[i] = (mask >> i & 1u) ? changed_value[i] : p0[i];
    }
  }
  return best;
}

}  // namespace priceopt
