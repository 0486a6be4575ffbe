#pragma once

#include <optional>
#include <vector>

#include "priceopt/instance.hpp"

namespace priceopt {

struct CoordBounds {
  double lower;
  double upper;
};

/// Minimizers of (p - q)^2 over the per-product feasible set
/// {p0} U (-inf, p0 - delta] U [p0 + delta, +inf), intersected with [l, u]
/// when bounds are given. At the two half-threshold points the set of
/// minimizers has two members; `primary` is then p0 and `secondary` the
/// changed price.
struct Projection1D {
  double primary;
  std::optional<double> secondary;
};

Projection1D project_1d(double p0, double delta, std::optional<CoordBounds> bounds, double q);
double distance_sq_1d(double p0, double delta, std::optional<CoordBounds> bounds, double q);

/// Per-coordinate projection data for one query point.
///
/// delta_score[i] = (p0_i - q_i)^2 - dist_sq[i] is the gain of spending one
/// change slot on coordinate i. It is exactly zero iff |q_i - p0_i| <= delta_i / 2.
struct ProjectionScores {
  Vector q;
  Vector proj;
  Vector dist_sq;
  Vector delta_score;
  std::vector<bool> tie;
};

ProjectionScores score(const Instance& instance, const Vector& q);

/// A Euclidean projection of q onto the feasible set: the k largest positive
/// scores (lower index wins ties) take their 1-D projection, all other
/// coordinates stay at p0.
Vector project_feasible(const Instance& instance, const Vector& q);

/// Reusable buffers for repeated projections of the same dimension.
class Projector {
 public:
  explicit Projector(const Instance& instance);

  /// Writes project_feasible(q) into out.
  void project(const Vector& q, Vector& out);

 private:
  const Instance* instance_;
  Vector primary_;
  Vector gain_;
  std::vector<int> candidates_;
};

inline constexpr double kDefaultCertifyTol = 1e-8;

/// True iff p is (within tol) a member of the projection set of q: at most k
/// changed coordinates, each within tol of a 1-D projection of q_i, and the
/// score ordering of the selected support is optimal.
bool certify_in_H(const Instance& instance, const Vector& q, const Vector& p,
                  double tol = kDefaultCertifyTol);

/// Distance, in the max norm, from p to the closest member of the projection
/// set of q. Near-ties within tol (half-threshold points, equal scores at the
/// k-th position) may be broken in favour of p.
double distance_to_H(const Instance& instance, const Vector& q, const Vector& p,
                     double tol = kDefaultCertifyTol);

/// p has at most k changed coordinates, each changed coordinate moves by at
/// least delta_i (less tol and the rounding of p0_i + delta_i), and bounds
/// hold (within tol) when present.
bool is_feasible(const Instance& instance, const Vector& p, double tol = 0.0);

std::optional<CoordBounds> coord_bounds(const Instance& instance, int i);

}  // namespace priceopt
