#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "priceopt/instance.hpp"
#include "priceopt/model.hpp"
#include "priceopt/partition.hpp"

namespace priceopt {

struct SolverParams {
  LMode l_mode = LMode::Gershgorin;
  /// Stop when Q(p^t) - Q(p^{t+1}) <= eps, scaled by max(1, |Q(p^1)|) when eps_relative.
  double eps = 1e-9;
  bool eps_relative = true;
  int max_iters = 50000;
  bool refine = true;
  /// Consecutive iterations with an unchanged partition before refinement triggers.
  int stab_window = 5;
  /// Step multiplier for the long-step start.
  double long_step_factor = 10.0;
  std::uint64_t seed = 20240601;
  double refine_tol = 1e-10;
  int refine_max_iters = 100000;
  double certify_tol = 1e-8;
  /// Estimate lambda_n and attach suboptimality bounds to stationary reports.
  bool bounds_report = false;
  /// How many of the five standard starts multi_start uses, in order.
  int starts = 5;
  /// Number of starts run concurrently by multi_start; 1 is sequential.
  int parallel_starts = 1;
};

void check_params(const SolverParams& params);

enum class StepKind : std::uint8_t { Gradient, Refine };

/// One transition p^t -> p^{t+1} of a run.
struct StepRecord {
  double step_sq = 0.0;            // ||p^{t+1} - p^t||^2
  bool partition_changed = false;  // partition of p^{t+1} differs from that of p^t
  bool feasible = true;            // p^{t+1} is feasible
  StepKind kind = StepKind::Gradient;
};

struct SolveReport {
  std::string start_id;
  Vector final_p;
  double final_q_obj = 0.0;
  double final_profit = 0.0;
  int iterations = 0;  // gradient projection steps taken
  /// Q(p^1), Q(p^2), ...; steps[t] takes objective_trace[t] to objective_trace[t + 1].
  std::vector<double> objective_trace;
  std::vector<StepRecord> steps;
  double stationarity_residual = 0.0;
  bool stationary = false;
  bool converged = false;  // stopping rule met before max_iters
  Partition partition;
  int kappa = 0;  // number of changed prices
  std::optional<double> bound_i;
  std::optional<double> bound_ii;
  bool bounds_estimated = false;  // bounds use an estimated lambda_n
  bool refined = false;
  double L = 0.0;
  double wall_time_s = 0.0;
};

/// Gradient projection from `start` with a fixed step constant L > lambda_1.
/// An infeasible start is projected first. With params.refine, once the step is
/// small and the partition has been stable for stab_window iterations the run
/// solves the restricted convex problem on that partition and stops if the
/// result certifies as stationary; otherwise gradient projection resumes.
SolveReport gpa_solve(const Instance& instance, const Vector& start, const SolverParams& params, double L);

/// Same, with L from spectral_bounds(params.l_mode).
SolveReport gpa_solve(const Instance& instance, const Vector& start, const SolverParams& params);

struct StationarityCheck {
  bool ok = false;
  double residual = 0.0;
};

/// Fixed-point test p in H(p - grad Q(p) / L). The residual is the max-norm
/// distance from p to the closest member of that projection set.
StationarityCheck certify_stationary(const Instance& instance, const Vector& p, double L,
                                     double tol = 1e-8);

struct RefineResult {
  Vector p;
  bool converged = false;
  int iterations = 0;
};

/// Minimizes Q over the polyhedral piece of `partition` (alpha fixed at p0,
/// beta in [p0 + delta, u], gamma in [l, p0 - delta]) by projected gradient with
/// step 1/L, stopping when the projected step is <= tol in the max norm.
/// Returns the best iterate, flagged not converged, at the iteration cap.
RefineResult refine_on_partition(const Instance& instance, const Partition& partition, const Vector& p,
                                 double L, double tol = 1e-10, int max_iters = 100000);

struct PerformanceBound {
  double bound_i = 0.0;   // bound on ||grad Q(p)||^2
  double bound_ii = 0.0;  // bound on Q(p) - Q*
  double tail_sum = 0.0;  // sum of the n - kappa smallest scores at q = p - grad Q(p) / L
  int kappa = 0;
  bool reduced = false;   // fewer than k changes: delta-only form
};

/// Suboptimality bounds at a stationary point of an instance without price
/// bounds. Throws ContractError for bounded instances, non-positive lambda_n,
/// or when kappa < k but the score tail is not (numerically) zero.
PerformanceBound performance_bound(const Instance& instance, const Vector& p, double L, double lambda_n,
                                   double tol = 1e-8);

struct MultiStartResult {
  std::vector<SolveReport> reports;
  std::size_t best = 0;

  const SolveReport& best_report() const { return reports[best]; }
};

/// Runs gpa_solve from p0, three seeded random feasible points, the long-step
/// point, and any extra starts, in that order. Best is the lowest final Q,
/// earliest start on ties.
MultiStartResult multi_start(const Instance& instance, const SolverParams& params,
                             const std::vector<Vector>& extra_starts = {});

/// The three random starts used by multi_start, for inspection.
std::vector<Vector> random_starts(const Instance& instance, std::uint64_t seed, int count);

/// One projection of p0 - factor * grad Q(p0) / L.
Vector long_step_start(const Instance& instance, double factor, double L);

}  // namespace priceopt
