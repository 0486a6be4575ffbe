#include "priceopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "priceopt/errors.hpp"

namespace priceopt {

namespace {

constexpr int kDenseFactorizationLimit = 2000;
constexpr int kPowerMaxIters = 10000;
constexpr double kPowerRelTol = 1e-8;
constexpr int kInverseMaxIters = 300;

void require_length(const Instance& instance, const Vector& p) {
  if (p.size() != instance.n()) {
    throw StructuralError("price vector has length " + std::to_string(p.size()) + ", expected " +
                          std::to_string(instance.n()));
  }
}

double checked(double value, const char* what) {
  if (!std::isfinite(value)) throw NumericError(std::string(what) + " is not finite");
  return value;
}

// Deterministic start vector for the eigenvalue iterations.
Vector start_vector(int n) {
  std::mt19937_64 engine(0x5eedf00dULL);
  Vector x(n);
  for (int i = 0; i < n; ++i) x[i] = 0.5 + static_cast<double>(engine() >> 11) * 0x1.0p-53;
  return x / x.norm();
}

template <typename Pred>
int first_violation(int n, Pred bad) {
  for (int i = 0; i < n; ++i) {
    if (bad(i)) return i;
  }
  return -1;
}

bool dense_cholesky_ok(const Instance& instance, const std::vector<Triplet>& sym) {
  const int n = instance.n();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (const Triplet& t : sym) s(t.row, t.col) = t.value;
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  return llt.info() == Eigen::Success;
}

bool strictly_diagonally_dominant(int n, const std::vector<Triplet>& sym) {
  std::vector<double> diag(n, 0.0);
  std::vector<double> off(n, 0.0);
  for (const Triplet& t : sym) {
    if (t.row == t.col) {
      diag[t.row] = t.value;
    } else {
      off[t.row] += std::abs(t.value);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!(diag[i] > 0.0 && off[i] < diag[i])) return false;
  }
  return true;
}

}  // namespace

const char* to_string(PdCheck check) {
  switch (check) {
    case PdCheck::Factorization: return "factorization";
    case PdCheck::DiagonalDominance: return "diagonal-dominance";
    case PdCheck::SolverProbable: return "probable";
    case PdCheck::Failed: return "failed";
  }
  return "unknown";
}

const char* to_string(LMode mode) { return mode == LMode::Power ? "power" : "gershgorin"; }

ValidationReport validate(const Instance& instance) {
  const int n = instance.n();
  ValidationReport report;
  const std::vector<Triplet> sym = symmetric_part(instance.d());

  auto note = [&report](const std::string& flag, const std::string& detail) {
    report.messages.push_back(flag + ": " + detail);
  };

  report.a1_sign_pattern = true;
  for (const Triplet& t : sym) {
    if (t.row != t.col && t.value > 0.0) {
      report.a1_sign_pattern = false;
      std::ostringstream os;
      os << "s(" << t.row << "," << t.col << ") = " << t.value << " > 0";
      note("a1_sign_pattern", os.str());
      break;
    }
  }

  if (n <= kDenseFactorizationLimit) {
    report.a1_positive_definite = dense_cholesky_ok(instance, sym);
    report.pd_check = report.a1_positive_definite ? PdCheck::Factorization : PdCheck::Failed;
  } else if (strictly_diagonally_dominant(n, sym)) {
    report.a1_positive_definite = true;
    report.pd_check = PdCheck::DiagonalDominance;
  } else {
    const CgResult cg = solve_spd(instance, Vector::Ones(n), 1e-10, 10 * n + 1000);
    report.a1_positive_definite = cg.converged;
    report.pd_check = cg.converged ? PdCheck::SolverProbable : PdCheck::Failed;
  }
  if (!report.a1_positive_definite) note("a1_positive_definite", "S = D + D^T is not positive definite");

  const Vector& a = instance.a();
  const Vector& c = instance.c();
  Vector dc;
  instance.d().multiply(c, dc);
  const Vector demand_at_cost = a - dc;
  const int bad_a = first_violation(n, [&](int i) { return !(a[i] > 0.0); });
  const int bad_c = first_violation(n, [&](int i) { return !(c[i] > 0.0); });
  const int bad_dc = first_violation(n, [&](int i) { return demand_at_cost[i] < 0.0; });
  report.a2_nonneg = bad_a < 0 && bad_c < 0 && bad_dc < 0;
  if (bad_a >= 0) note("a2_nonneg", "a[" + std::to_string(bad_a) + "] <= 0");
  if (bad_c >= 0) note("a2_nonneg", "c[" + std::to_string(bad_c) + "] <= 0");
  if (bad_dc >= 0) note("a2_nonneg", "(a - D c)[" + std::to_string(bad_dc) + "] < 0");

  const Vector& p0 = instance.p0();
  const Vector& delta = instance.delta();
  const int bad_a3 = first_violation(n, [&](int i) { return p0[i] - delta[i] < c[i]; });
  report.a3_profitable_baseline = bad_a3 < 0;
  if (bad_a3 >= 0) note("a3_profitable_baseline", "p0 - delta < c at index " + std::to_string(bad_a3));

  const int bad_a4 = first_violation(n, [&](int i) { return !(delta[i] > 0.0); });
  report.a4_positive_delta = bad_a4 < 0;
  if (bad_a4 >= 0) note("a4_positive_delta", "delta[" + std::to_string(bad_a4) + "] <= 0");

  report.bounds_consistent = true;
  if (instance.has_bounds()) {
    const PriceBounds& b = *instance.bounds();
    const int bad_b = first_violation(n, [&](int i) {
      return b.lower[i] > p0[i] - delta[i] || b.upper[i] < p0[i] + delta[i];
    });
    report.bounds_consistent = bad_b < 0;
    if (bad_b >= 0) {
      note("bounds_consistent", "l > p0 - delta or u < p0 + delta at index " + std::to_string(bad_b));
    }
  }
  return report;
}

double objective_q(const Instance& instance, const Vector& p) {
  require_length(instance, p);
  Vector dp;
  instance.d().multiply(p, dp);
  // 1/2 p^T (D + D^T) p = p^T D p
  return checked(p.dot(dp) - instance.linear_coef().dot(p), "objective");
}

Vector gradient_q(const Instance& instance, const Vector& p) {
  require_length(instance, p);
  Vector g = instance.symmetric_multiply(p) - instance.linear_coef();
  checked(g.sum(), "gradient");
  return g;
}

double profit_z(const Instance& instance, const Vector& p) {
  require_length(instance, p);
  Vector dp;
  instance.d().multiply(p, dp);
  return checked((p - instance.c()).dot(instance.a() - dp), "profit");
}

CgResult solve_spd(const Instance& instance, const Vector& rhs, double rel_tol, int max_iters,
                   const Vector* x0) {
  const int n = instance.n();
  CgResult out;
  const double rhs_norm = rhs.norm();
  out.x = x0 ? *x0 : Vector::Zero(n);
  if (rhs_norm == 0.0) {
    out.x.setZero();
    out.converged = true;
    return out;
  }
  Vector inv_diag = 2.0 * instance.d().diagonal();
  for (int i = 0; i < n; ++i) inv_diag[i] = inv_diag[i] > 0.0 ? 1.0 / inv_diag[i] : 1.0;

  Vector r = rhs - instance.symmetric_multiply(out.x);
  Vector z = inv_diag.cwiseProduct(r);
  Vector dir = z;
  double rz = r.dot(z);
  double res = r.norm();
  for (int it = 0; it < max_iters; ++it) {
    if (res <= rel_tol * rhs_norm) {
      out.converged = true;
      break;
    }
    const Vector sd = instance.symmetric_multiply(dir);
    const double curvature = dir.dot(sd);
    if (!(curvature > 0.0)) break;
    const double alpha = rz / curvature;
    out.x += alpha * dir;
    r -= alpha * sd;
    res = r.norm();
    out.iterations = it + 1;
    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    dir = z + (rz_next / rz) * dir;
    rz = rz_next;
  }
  if (!out.converged && res <= rel_tol * rhs_norm) out.converged = true;
  out.relative_residual = res / rhs_norm;
  if (!std::isfinite(out.relative_residual)) out.converged = false;
  return out;
}

UnconstrainedSolution unconstrained_minimizer(const Instance& instance, double rel_tol) {
  const int n = instance.n();
  const int cap = std::min(10 * n + 1000, 200000);
  const CgResult cg = solve_spd(instance, instance.linear_coef(), rel_tol, cap);
  if (!cg.converged) {
    throw NumericError("SPD solve for the unconstrained minimizer did not converge (relative residual " +
                       std::to_string(cg.relative_residual) + "); S is likely not positive definite");
  }
  UnconstrainedSolution out;
  out.p_hat = cg.x;
  out.q_hat = objective_q(instance, out.p_hat);
  out.iterations = cg.iterations;
  return out;
}

double gershgorin_radius(const Instance& instance) {
  std::vector<double> row_sum(instance.n(), 0.0);
  for (const Triplet& t : symmetric_part(instance.d())) row_sum[t.row] += std::abs(t.value);
  return *std::max_element(row_sum.begin(), row_sum.end());
}

SpectralBounds spectral_bounds(const Instance& instance, LMode mode, bool want_lambda_min) {
  const int n = instance.n();
  SpectralBounds out;
  const double radius = gershgorin_radius(instance);
  out.L = kGershgorinMargin * radius;
  out.lambda1_est = radius;
  out.mode_used = LMode::Gershgorin;

  if (mode == LMode::Power) {
    Vector x = start_vector(n);
    double lambda = 0.0;
    bool converged = false;
    for (int it = 0; it < kPowerMaxIters; ++it) {
      const Vector y = instance.symmetric_multiply(x);
      const double next = x.dot(y);
      const double norm = y.norm();
      if (!(next > 0.0) || !(norm > 0.0) || !std::isfinite(norm)) break;
      if (it > 0 && std::abs(next - lambda) <= kPowerRelTol * std::abs(next)) {
        lambda = next;
        converged = true;
        break;
      }
      lambda = next;
      x = y / norm;
    }
    if (converged) {
      out.lambda1_est = lambda;
      out.L = std::min(kPowerMargin * lambda, kGershgorinMargin * radius);
      out.mode_used = LMode::Power;
    } else {
      out.power_fell_back = true;
    }
  }

  if (want_lambda_min) {
    Vector x = start_vector(n);
    double estimate = 0.0;
    bool converged = false;
    for (int it = 0; it < kInverseMaxIters; ++it) {
      Vector guess = estimate > 0.0 ? Vector(x / estimate) : Vector::Zero(n);
      const CgResult cg = solve_spd(instance, x, 1e-12, 10 * n + 1000, &guess);
      if (!cg.converged) break;
      const double yy = cg.x.squaredNorm();
      if (!(yy > 0.0)) break;
      // y = S^{-1} x, so the Rayleigh quotient of y is (x . y) / (y . y).
      const double next = x.dot(cg.x) / yy;
      if (it > 0 && std::abs(next - estimate) <= kPowerRelTol * std::abs(next)) {
        estimate = next;
        converged = true;
        break;
      }
      estimate = next;
      x = cg.x / std::sqrt(yy);
    }
    if (converged && estimate > 0.0) out.lambdan_est = estimate;
  }
  return out;
}

}  // namespace priceopt
