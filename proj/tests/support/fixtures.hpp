#pragma once

#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "priceopt/instance.hpp"

namespace testing {

using priceopt::Instance;
using priceopt::Vector;

/// Small random draws for property tests.
struct Gen {
  std::mt19937_64 rng;

  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uni(double lo, double hi) { return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool coin(double p = 0.5) { return uni(0.0, 1.0) < p; }
  Vector vec(int n, double lo, double hi) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = uni(lo, hi);
    return v;
  }
};

/// Builds an instance from a dense D, dropping zero off-diagonals.
Instance from_dense(int k, const Eigen::MatrixXd& D, const Vector& a, const Vector& c, const Vector& p0,
                    const Vector& delta, std::optional<priceopt::PriceBounds> bounds = std::nullopt);

/// D = I, a = [6, 1], c = 0, p0 = 0, delta = 0.5, k = 1, so S = 2I and f = [6, 1].
Instance worked_example();

Eigen::MatrixXd dense_d(const Instance& instance);
Eigen::MatrixXd dense_s(const Instance& instance);

/// 1/2 p'Sp - (a + D'c)'p from dense matrices.
double dense_objective(const Instance& instance, const Vector& p);

double lambda_min(const Instance& instance);
double lambda_max(const Instance& instance);

struct SmallOptions {
  bool bounded = false;
  bool mixed_signs = false;
  double coupling = 0.3;  // off-diagonal magnitude relative to the diagonal
  double density = 0.5;
};

/// Random instance with S positive definite (redrawn until it is).
Instance random_small(Gen& g, int n, int k, const SmallOptions& opt = {});

/// Random instance with nonpositive cross effects, S positive definite,
/// a > 0, c > 0, a - Dc >= 0 and p0 - delta >= c.
Instance random_profitable(Gen& g, int n, int k);

/// Random feasible point: a random support of size <= k, moves of at least delta, inside the bounds.
Vector random_feasible(Gen& g, const Instance& instance);

}  // namespace testing
