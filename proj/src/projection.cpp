#include "priceopt/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "priceopt/errors.hpp"

namespace priceopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CoordResult {
  double primary;
  double secondary;  // NaN unless the 1-D projection is two-valued
  double dist_sq;
  double gain;
  bool tie;
};

// Closed-form 1-D projection. The gain is computed inside the branch that
// picks the projection so that it is exactly zero on the no-change window.
CoordResult project_coord(double p0, double delta, double lo, double hi, double q) {
  if (!(delta > 0.0)) {
    throw ContractError("minimum change threshold must be positive, got " + std::to_string(delta));
  }
  if (lo > p0 - delta || hi < p0 + delta) {
    throw ContractError("price bounds must satisfy l <= p0 - delta and u >= p0 + delta");
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double t = q - p0;
  const double half = 0.5 * delta;
  if (t > half) {
    if (q > hi) {
      const double w = hi - p0;
      return {hi, nan, (q - hi) * (q - hi), w * (2.0 * t - w), false};
    }
    if (t >= delta) return {q, nan, 0.0, t * t, false};
    const double gap = p0 + delta - q;
    return {p0 + delta, nan, gap * gap, delta * (2.0 * t - delta), false};
  }
  if (t == half) return {p0, p0 + delta, t * t, 0.0, true};
  if (t > -half) return {p0, nan, t * t, 0.0, false};
  if (t == -half) return {p0, p0 - delta, t * t, 0.0, true};
  if (q < lo) {
    const double w = p0 - lo;
    return {lo, nan, (lo - q) * (lo - q), w * (-2.0 * t - w), false};
  }
  if (t <= -delta) return {q, nan, 0.0, t * t, false};
  const double gap = q - (p0 - delta);
  return {p0 - delta, nan, gap * gap, delta * (-2.0 * t - delta), false};
}

double lower_of(const Instance& instance, int i) {
  return instance.has_bounds() ? instance.bounds()->lower[i] : -kInf;
}
double upper_of(const Instance& instance, int i) {
  return instance.has_bounds() ? instance.bounds()->upper[i] : kInf;
}

CoordResult project_coord(const Instance& instance, int i, double q) {
  return project_coord(instance.p0()[i], instance.delta()[i], lower_of(instance, i),
                       upper_of(instance, i), q);
}

void require_length(const Instance& instance, const Vector& v, const char* name) {
  if (v.size() != instance.n()) {
    throw StructuralError(std::string(name) + " has length " + std::to_string(v.size()) +
                          ", expected " + std::to_string(instance.n()));
  }
}

struct SupportCheck {
  bool valid;          // changed set satisfies the cardinality and score-ordering conditions
  double coord_error;  // max distance from p to its per-coordinate admissible values
};

SupportCheck check_support(const Instance& instance, const Vector& q, const Vector& p, double tol) {
  const int n = instance.n();
  const int k = instance.k();
  const Vector& p0 = instance.p0();
  const Vector& delta = instance.delta();

  int changed = 0;
  double min_selected = kInf;
  double max_unselected = -kInf;
  double coord_error = 0.0;
  for (int i = 0; i < n; ++i) {
    const CoordResult r = project_coord(instance, i, q[i]);
    const double t = q[i] - p0[i];
    // Scores are Lipschitz in q with constant 2 max(|t|, delta) near q.
    const double slack = 2.0 * tol * std::max(std::abs(t), delta[i]) + tol * tol;
    if (std::abs(p[i] - p0[i]) > tol) {
      ++changed;
      min_selected = std::min(min_selected, r.gain + slack);
      double err = std::abs(p[i] - r.primary);
      if (r.tie) err = std::min(err, std::abs(p[i] - r.secondary));
      const double half = 0.5 * delta[i];
      if (std::abs(t - half) <= tol) err = std::min(err, std::abs(p[i] - (p0[i] + delta[i])));
      if (std::abs(t + half) <= tol) err = std::min(err, std::abs(p[i] - (p0[i] - delta[i])));
      coord_error = std::max(coord_error, err);
    } else {
      max_unselected = std::max(max_unselected, r.gain - slack);
      coord_error = std::max(coord_error, std::abs(p[i] - p0[i]));
    }
  }
  bool valid = changed <= k;
  if (valid && changed == k) valid = min_selected >= max_unselected;
  if (valid && changed < k) valid = max_unselected <= 0.0;
  return {valid, coord_error};
}

}  // namespace

std::optional<CoordBounds> coord_bounds(const Instance& instance, int i) {
  if (!instance.has_bounds()) return std::nullopt;
  return CoordBounds{instance.bounds()->lower[i], instance.bounds()->upper[i]};
}

Projection1D project_1d(double p0, double delta, std::optional<CoordBounds> bounds, double q) {
  const CoordResult r = project_coord(p0, delta, bounds ? bounds->lower : -kInf,
                                      bounds ? bounds->upper : kInf, q);
  Projection1D out{r.primary, std::nullopt};
  if (r.tie) out.secondary = r.secondary;
  return out;
}

double distance_sq_1d(double p0, double delta, std::optional<CoordBounds> bounds, double q) {
  return project_coord(p0, delta, bounds ? bounds->lower : -kInf, bounds ? bounds->upper : kInf, q)
      .dist_sq;
}

ProjectionScores score(const Instance& instance, const Vector& q) {
  require_length(instance, q, "query point");
  const int n = instance.n();
  ProjectionScores s;
  s.q = q;
  s.proj.resize(n);
  s.dist_sq.resize(n);
  s.delta_score.resize(n);
  s.tie.assign(n, false);
  for (int i = 0; i < n; ++i) {
    const CoordResult r = project_coord(instance, i, q[i]);
    s.proj[i] = r.primary;
    s.dist_sq[i] = r.dist_sq;
    s.delta_score[i] = r.gain;
    s.tie[i] = r.tie;
  }
  return s;
}

Projector::Projector(const Instance& instance)
    : instance_(&instance), primary_(instance.n()), gain_(instance.n()) {
  candidates_.reserve(instance.n());
}

void Projector::project(const Vector& q, Vector& out) {
  const Instance& instance = *instance_;
  require_length(instance, q, "query point");
  const int n = instance.n();
  const int k = instance.k();
  candidates_.clear();
  for (int i = 0; i < n; ++i) {
    const CoordResult r = project_coord(instance, i, q[i]);
    primary_[i] = r.primary;
    gain_[i] = r.gain;
    if (r.gain > 0.0) candidates_.push_back(i);
  }
  if (static_cast<int>(candidates_.size()) > k) {
    const Vector& gain = gain_;
    std::nth_element(candidates_.begin(), candidates_.begin() + k, candidates_.end(),
                     [&gain](int x, int y) { return gain[x] != gain[y] ? gain[x] > gain[y] : x < y; });
    candidates_.resize(k);
  }
  out = instance.p0();
  for (int i : candidates_) out[i] = primary_[i];
}

Vector project_feasible(const Instance& instance, const Vector& q) {
  Projector projector(instance);
  Vector out;
  projector.project(q, out);
  return out;
}

bool certify_in_H(const Instance& instance, const Vector& q, const Vector& p, double tol) {
  require_length(instance, q, "query point");
  require_length(instance, p, "price vector");
  const SupportCheck check = check_support(instance, q, p, tol);
  return check.valid && check.coord_error <= tol;
}

double distance_to_H(const Instance& instance, const Vector& q, const Vector& p, double tol) {
  require_length(instance, q, "query point");
  require_length(instance, p, "price vector");
  const double to_deterministic = (p - project_feasible(instance, q)).lpNorm<Eigen::Infinity>();
  const SupportCheck check = check_support(instance, q, p, tol);
  return check.valid ? std::min(check.coord_error, to_deterministic) : to_deterministic;
}

bool is_feasible(const Instance& instance, const Vector& p, double tol) {
  if (p.size() != instance.n()) return false;
  const Vector& p0 = instance.p0();
  const Vector& delta = instance.delta();
  int changed = 0;
  for (int i = 0; i < instance.n(); ++i) {
    if (!std::isfinite(p[i])) return false;
    const double move = std::abs(p[i] - p0[i]);
    if (move > tol) {
      ++changed;
      // p0 + delta is rarely representable; allow the rounding of that sum.
      const double rounding = 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(p0[i]) + delta[i]);
      if (move < delta[i] - tol - rounding) return false;
    }
    if (p[i] < lower_of(instance, i) - tol || p[i] > upper_of(instance, i) + tol) return false;
  }
  return changed <= instance.k();
}

}  // namespace priceopt
