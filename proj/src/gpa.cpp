#include "priceopt/gpa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <numeric>
#include <string>

#include "priceopt/errors.hpp"
#include "priceopt/projection.hpp"
#include "priceopt/rng.hpp"

namespace priceopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// After this many refinements that fail to certify, a stalled run stops.
constexpr int kMaxFailedRefinements = 20;

struct Box {
  Vector lower;
  Vector upper;
};

Box partition_box(const Instance& instance, const Partition& partition) {
  const int n = instance.n();
  Box box{Vector(n), Vector(n)};
  const Vector& p0 = instance.p0();
  const Vector& delta = instance.delta();
  for (int i = 0; i < n; ++i) {
    const double l = instance.has_bounds() ? instance.bounds()->lower[i] : -kInf;
    const double u = instance.has_bounds() ? instance.bounds()->upper[i] : kInf;
    switch (partition[i]) {
      case Move::Unchanged:
        box.lower[i] = box.upper[i] = p0[i];
        break;
      case Move::Raised:
        box.lower[i] = p0[i] + delta[i];
        box.upper[i] = u;
        break;
      case Move::Lowered:
        box.lower[i] = l;
        box.upper[i] = p0[i] - delta[i];
        break;
    }
  }
  return box;
}

}  // namespace

void check_params(const SolverParams& params) {
  if (!(params.eps > 0.0)) throw ContractError("eps must be positive");
  if (!(params.long_step_factor > 1.0)) throw ContractError("long_step_factor must exceed 1");
  if (params.max_iters < 1) throw ContractError("max_iters must be positive");
  if (params.stab_window < 1) throw ContractError("stab_window must be positive");
  if (!(params.refine_tol > 0.0) || !(params.certify_tol > 0.0)) {
    throw ContractError("tolerances must be positive");
  }
  if (params.refine_max_iters < 1) throw ContractError("refine_max_iters must be positive");
  if (params.starts < 1 || params.starts > 5) throw ContractError("starts must lie in 1..5");
  if (params.parallel_starts < 1) throw ContractError("parallel_starts must be positive");
}

StationarityCheck certify_stationary(const Instance& instance, const Vector& p, double L, double tol) {
  if (!(L > 0.0)) throw ContractError("L must be positive");
  const Vector q = p - gradient_q(instance, p) / L;
  const double residual = distance_to_H(instance, q, p, tol);
  return {residual <= tol, residual};
}

RefineResult refine_on_partition(const Instance& instance, const Partition& partition, const Vector& p,
                                 double L, double tol, int max_iters) {
  if (partition.size() != instance.n() || p.size() != instance.n()) {
    throw StructuralError("partition and price vector must have length n");
  }
  if (!(L > 0.0)) throw ContractError("L must be positive");
  const Box box = partition_box(instance, partition);
  RefineResult out;
  out.p = p.cwiseMax(box.lower).cwiseMin(box.upper);
  if (partition.changes() == 0) {
    out.converged = true;
    return out;
  }
  Vector next;
  for (int it = 0; it < max_iters; ++it) {
    next = (out.p - gradient_q(instance, out.p) / L).cwiseMax(box.lower).cwiseMin(box.upper);
    const double step = (next - out.p).lpNorm<Eigen::Infinity>();
    if (step <= tol) {
      out.converged = true;
      return out;
    }
    out.p.swap(next);
    out.iterations = it + 1;
  }
  return out;
}

SolveReport gpa_solve(const Instance& instance, const Vector& start, const SolverParams& params, double L) {
  check_params(params);
  if (!(L > 0.0) || !std::isfinite(L)) throw ContractError("L must be positive and finite");
  if (start.size() != instance.n()) {
    throw StructuralError("start vector has length " + std::to_string(start.size()) + ", expected " +
                          std::to_string(instance.n()));
  }
  const auto t0 = std::chrono::steady_clock::now();

  SolveReport report;
  report.L = L;
  Projector projector(instance);
  Vector p = start;
  if (!is_feasible(instance, p)) {
    Vector projected;
    projector.project(start, projected);
    p = projected;
  }
  double Q = objective_q(instance, p);
  report.objective_trace.push_back(Q);
  const double eps = params.eps_relative ? params.eps * std::max(1.0, std::abs(Q)) : params.eps;
  const double small_step = 0.5 * instance.min_delta() * instance.min_delta();

  Partition partition = Partition::of(instance, p);
  int stable = 0;
  int since_attempt = params.stab_window;
  int failed_refinements = 0;
  bool certified = false;
  StationarityCheck check;
  Vector q, next;

  auto record = [&](const Vector& np, double nq, StepKind kind) {
    Partition npart = Partition::of(instance, np);
    StepRecord s;
    s.step_sq = (np - p).squaredNorm();
    s.partition_changed = !(npart == partition);
    s.feasible = is_feasible(instance, np);
    s.kind = kind;
    report.steps.push_back(s);
    report.objective_trace.push_back(nq);
    p = np;
    Q = nq;
    partition = std::move(npart);
    return s;
  };

  while (report.iterations < params.max_iters) {
    q = p - gradient_q(instance, p) / L;
    projector.project(q, next);
    const double next_q = objective_q(instance, next);
    const double decrease = Q - next_q;
    const StepRecord s = record(next, next_q, StepKind::Gradient);
    ++report.iterations;
    ++since_attempt;
    stable = s.partition_changed ? 0 : stable + 1;
    const bool stalled = decrease <= eps;

    if (!params.refine) {
      if (stalled) {
        report.converged = true;
        break;
      }
      continue;
    }

    const bool trigger = s.step_sq <= small_step && stable >= params.stab_window;
    if ((trigger || stalled) && since_attempt >= params.stab_window) {
      since_attempt = 0;
      check = certify_stationary(instance, p, L, params.certify_tol);
      if (!check.ok) {
        const RefineResult refined =
            refine_on_partition(instance, partition, p, L, params.refine_tol, params.refine_max_iters);
        const double refined_q = objective_q(instance, refined.p);
        if (refined_q <= Q) {
          record(refined.p, refined_q, StepKind::Refine);
          report.refined = true;
        }
        check = certify_stationary(instance, p, L, params.certify_tol);
      }
      if (check.ok) {
        certified = true;
        report.converged = true;
        break;
      }
      ++failed_refinements;
      stable = 0;
    }
    if (stalled && failed_refinements >= kMaxFailedRefinements) {
      report.converged = true;
      break;
    }
  }

  if (!certified) check = certify_stationary(instance, p, L, params.certify_tol);
  report.final_p = p;
  report.final_q_obj = Q;
  report.final_profit = profit_z(instance, p);
  report.stationarity_residual = check.residual;
  report.stationary = check.ok;
  report.partition = partition;
  report.kappa = partition.changes();
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

SolveReport gpa_solve(const Instance& instance, const Vector& start, const SolverParams& params) {
  check_params(params);
  const SpectralBounds sb = spectral_bounds(instance, params.l_mode, false);
  return gpa_solve(instance, start, params, sb.L);
}

PerformanceBound performance_bound(const Instance& instance, const Vector& p, double L, double lambda_n,
                                   double tol) {
  if (instance.has_bounds()) {
    throw ContractError("performance bounds apply only to instances without price bounds");
  }
  if (!(lambda_n > 0.0)) throw ContractError("lambda_n must be positive");
  if (!(L > 0.0)) throw ContractError("L must be positive");
  const Vector q = p - gradient_q(instance, p) / L;
  const ProjectionScores s = score(instance, q);
  std::vector<double> gains(s.delta_score.data(), s.delta_score.data() + s.delta_score.size());
  std::sort(gains.begin(), gains.end(), std::greater<>());

  PerformanceBound out;
  out.kappa = Partition::of(instance, p).changes();
  out.tail_sum = std::accumulate(gains.begin() + out.kappa, gains.end(), 0.0);
  const double delta_sq = instance.delta().squaredNorm();
  double tail = out.tail_sum;
  if (out.kappa < instance.k()) {
    if (tail > tol * std::max(1.0, delta_sq)) {
      throw ContractError("point is not stationary: fewer than k changes but positive scores remain");
    }
    out.reduced = true;
    tail = 0.0;
  }
  const double L2 = L * L;
  out.bound_i = L2 * tail + 0.25 * L2 * delta_sq;
  out.bound_ii = L2 / (2.0 * lambda_n) * tail + L2 / (8.0 * lambda_n) * delta_sq;
  return out;
}

std::vector<Vector> random_starts(const Instance& instance, std::uint64_t seed, int count) {
  const int n = instance.n();
  const int k = instance.k();
  const Vector& p0 = instance.p0();
  const Vector& delta = instance.delta();
  Engine rng(seed);
  std::vector<Vector> starts;
  std::vector<int> order(n);
  for (int r = 0; r < count; ++r) {
    std::iota(order.begin(), order.end(), 0);
    Vector p = p0;
    for (int j = 0; j < k; ++j) {
      const auto pick = static_cast<int>(uniform_int(rng, j, n - 1));
      std::swap(order[j], order[pick]);
      const int i = order[j];
      const bool up = (rng() >> 63) != 0;
      const double magnitude = delta[i] * (1.0 + uniform01(rng));
      p[i] = up ? p0[i] + magnitude : p0[i] - magnitude;
      if (instance.has_bounds()) {
        p[i] = std::clamp(p[i], instance.bounds()->lower[i], instance.bounds()->upper[i]);
      }
    }
    starts.push_back(std::move(p));
  }
  return starts;
}

Vector long_step_start(const Instance& instance, double factor, double L) {
  const Vector q = instance.p0() - factor * gradient_q(instance, instance.p0()) / L;
  return project_feasible(instance, q);
}

MultiStartResult multi_start(const Instance& instance, const SolverParams& params,
                             const std::vector<Vector>& extra_starts) {
  check_params(params);
  const SpectralBounds sb = spectral_bounds(instance, params.l_mode, params.bounds_report);
  const double L = sb.L;

  std::vector<std::pair<std::string, Vector>> starts;
  starts.emplace_back("p0", instance.p0());
  const std::vector<Vector> randoms = random_starts(instance, params.seed, 3);
  for (std::size_t r = 0; r < randoms.size(); ++r) {
    starts.emplace_back("random" + std::to_string(r + 1), randoms[r]);
  }
  starts.emplace_back("long_step", long_step_start(instance, params.long_step_factor, L));
  starts.resize(static_cast<std::size_t>(params.starts));
  for (std::size_t e = 0; e < extra_starts.size(); ++e) {
    starts.emplace_back("warm" + std::to_string(e + 1), extra_starts[e]);
  }

  MultiStartResult result;
  result.reports.resize(starts.size());
  auto run = [&](std::size_t idx) {
    SolveReport r = gpa_solve(instance, starts[idx].second, params, L);
    r.start_id = starts[idx].first;
    return r;
  };
  if (params.parallel_starts <= 1) {
    for (std::size_t i = 0; i < starts.size(); ++i) result.reports[i] = run(i);
  } else {
    const auto batch = static_cast<std::size_t>(params.parallel_starts);
    for (std::size_t first = 0; first < starts.size(); first += batch) {
      std::vector<std::future<SolveReport>> running;
      const std::size_t last = std::min(starts.size(), first + batch);
      for (std::size_t i = first; i < last; ++i) running.push_back(std::async(std::launch::async, run, i));
      for (std::size_t i = first; i < last; ++i) result.reports[i] = running[i - first].get();
    }
  }

  if (params.bounds_report && !instance.has_bounds() && sb.lambdan_est) {
    for (SolveReport& r : result.reports) {
      if (!r.stationary) continue;
      try {
        const PerformanceBound b = performance_bound(instance, r.final_p, L, *sb.lambdan_est);
        r.bound_i = b.bound_i;
        r.bound_ii = b.bound_ii;
        r.bounds_estimated = true;
      } catch (const ContractError&) {
      }
    }
  }

  for (std::size_t i = 1; i < result.reports.size(); ++i) {
    if (result.reports[i].final_q_obj < result.reports[result.best].final_q_obj) result.best = i;
  }
  return result;
}

}  // namespace priceopt
