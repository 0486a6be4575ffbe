#include "fixtures.hpp"

#include <algorithm>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace testing {

using priceopt::PriceBounds;
using priceopt::SparseMatrix;
using priceopt::Triplet;

Instance from_dense(int k, const Eigen::MatrixXd& D, const Vector& a, const Vector& c, const Vector& p0,
                    const Vector& delta, std::optional<PriceBounds> bounds) {
  const int n = static_cast<int>(D.rows());
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || D(i, j) != 0.0) t.push_back({i, j, D(i, j)});
    }
  }
  return Instance(k, a, SparseMatrix::from_triplets(n, t), c, p0, delta, std::move(bounds));
}

Instance worked_example() {
  Vector a(2), zero = Vector::Zero(2), delta = Vector::Constant(2, 0.5);
  a << 6.0, 1.0;
  return from_dense(1, Eigen::MatrixXd::Identity(2, 2), a, zero, zero, delta);
}

Eigen::MatrixXd dense_d(const Instance& instance) {
  const int n = instance.n();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (const Triplet& t : instance.d().triplets()) D(t.row, t.col) = t.value;
  return D;
}

Eigen::MatrixXd dense_s(const Instance& instance) {
  const Eigen::MatrixXd D = dense_d(instance);
  return D + D.transpose();
}

double dense_objective(const Instance& instance, const Vector& p) {
  const Eigen::MatrixXd D = dense_d(instance);
  const Eigen::MatrixXd S = D + D.transpose();
  const Vector f = instance.a() + D.transpose() * instance.c();
  return 0.5 * p.dot(S * p) - f.dot(p);
}

double lambda_min(const Instance& instance) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_s(instance), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double lambda_max(const Instance& instance) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_s(instance), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

Instance random_small(Gen& g, int n, int k, const SmallOptions& opt) {
  for (;;) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) D(i, i) = g.uni(1.0, 5.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j || !g.coin(opt.density)) continue;
        double v = -g.uni(0.01, opt.coupling) * D(i, i);
        if (opt.mixed_signs && g.coin()) v = -v;
        D(i, j) = v;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D + D.transpose(), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < 0.05) continue;
    const Vector c = g.vec(n, 0.5, 3.0);
    const Vector a = g.vec(n, 2.0, 20.0);
    const Vector p0 = g.vec(n, 1.0, 8.0);
    const Vector delta = g.vec(n, 0.1, 1.0);
    std::optional<PriceBounds> bounds;
    if (opt.bounded) {
      Vector l(n), u(n);
      for (int i = 0; i < n; ++i) {
        l[i] = p0[i] - delta[i] - g.uni(0.0, 2.0);
        u[i] = p0[i] + delta[i] + g.uni(0.0, 2.0);
      }
      bounds = PriceBounds{l, u};
    }
    return from_dense(k, D, a, c, p0, delta, bounds);
  }
}

Instance random_profitable(Gen& g, int n, int k) {
  for (;;) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) D(i, i) = g.uni(1.0, 5.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && g.coin(0.5)) D(i, j) = -g.uni(0.01, 0.3) * D(i, i);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D + D.transpose(), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < 0.05) continue;
    const Vector c = g.vec(n, 0.5, 3.0);
    const Vector dc = D * c;
    Vector a(n);
    for (int i = 0; i < n; ++i) a[i] = std::max(dc[i], 0.0) + g.uni(0.5, 10.0);
    const Vector delta = g.vec(n, 0.1, 1.0);
    Vector p0(n);
    for (int i = 0; i < n; ++i) p0[i] = c[i] + delta[i] + g.uni(0.0, 3.0);
    return from_dense(k, D, a, c, p0, delta);
  }
}

Vector random_feasible(Gen& g, const Instance& instance) {
  const int n = instance.n();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), g.rng);
  const int m = g.integer(0, instance.k());
  Vector p = instance.p0();
  for (int j = 0; j < m; ++j) {
    const int i = order[j];
    const double p0 = instance.p0()[i];
    const double d = instance.delta()[i];
    const bool up = g.coin();
    if (instance.has_bounds()) {
      const double l = instance.bounds()->lower[i];
      const double u = instance.bounds()->upper[i];
      p[i] = up ? g.uni(p0 + d, u) : g.uni(l, p0 - d);
    } else {
      p[i] = up ? p0 + d + g.uni(0.0, 3.0) : p0 - d - g.uni(0.0, 3.0);
    }
  }
  return p;
}

}  // namespace testing
