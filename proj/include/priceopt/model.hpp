#pragma once

#include <optional>
#include <string>
#include <vector>

#include "priceopt/instance.hpp"

namespace priceopt {

/// How positive definiteness of S was established.
enum class PdCheck {
  Factorization,      // dense Cholesky on S succeeded (n <= 2000)
  DiagonalDominance,  // strictly diagonally dominant with positive diagonal
  SolverProbable,     // SPD iterative solve converged; PD is probable, not proven
  Failed,
};

const char* to_string(PdCheck check);

struct ValidationReport {
  bool a1_sign_pattern = false;         // s_ij <= 0 for all i != j
  bool a1_positive_definite = false;    // S = D + D^T positive definite
  bool a2_nonneg = false;               // a > 0, c > 0, a - D c >= 0
  bool a3_profitable_baseline = false;  // p0 - delta >= c
  bool a4_positive_delta = false;       // delta > 0
  bool bounds_consistent = false;       // l <= p0 - delta, u >= p0 + delta (true when unbounded)
  PdCheck pd_check = PdCheck::Failed;
  std::vector<std::string> messages;

  bool operator==(const ValidationReport&) const = default;
};

/// Evaluates each modelling assumption independently. Never throws on a
/// failed assumption; only structural problems are errors (and those are
/// already ruled out by Instance construction).
ValidationReport validate(const Instance& instance);

/// Q(p) = 1/2 p^T S p - f^T p with f = a + D^T c.
double objective_q(const Instance& instance, const Vector& p);

/// grad Q(p) = S p - f.
Vector gradient_q(const Instance& instance, const Vector& p);

/// Z(p) = (p - c)^T (a - D p). Satisfies Z(p) = -Q(p) - c^T a.
double profit_z(const Instance& instance, const Vector& p);

struct CgResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients on S x = rhs. Stops early, not
/// converged, when a non-positive curvature direction shows S is not PD.
CgResult solve_spd(const Instance& instance, const Vector& rhs, double rel_tol, int max_iters,
                   const Vector* x0 = nullptr);

struct UnconstrainedSolution {
  Vector p_hat;
  double q_hat = 0.0;
  int iterations = 0;
};

/// p_hat = S^{-1} f to relative residual <= rel_tol. Throws NumericError when
/// the solve does not converge, which signals S is likely not PD.
UnconstrainedSolution unconstrained_minimizer(const Instance& instance, double rel_tol = 1e-10);

enum class LMode { Gershgorin, Power };

const char* to_string(LMode mode);

struct SpectralBounds {
  double L = 0.0;
  /// Power mode: Rayleigh-quotient estimate of the largest eigenvalue.
  /// Gershgorin mode: the Gershgorin upper bound max_i sum_j |s_ij|.
  double lambda1_est = 0.0;
  std::optional<double> lambdan_est;
  LMode mode_used = LMode::Gershgorin;
  bool power_fell_back = false;
};

inline constexpr double kGershgorinMargin = 1.001;
inline constexpr double kPowerMargin = 1.01;

/// Step constant L > lambda_1(S). Optionally estimates lambda_n(S) by inverse
/// iteration; the estimate is omitted when it does not converge or is not positive.
SpectralBounds spectral_bounds(const Instance& instance, LMode mode, bool want_lambda_min);

/// max_i sum_j |s_ij|.
double gershgorin_radius(const Instance& instance);

}  // namespace priceopt
