#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "priceopt/instance.hpp"

namespace priceopt {

struct DeltaMode {
  enum class Kind { Const, Fraction };
  Kind kind = Kind::Const;
  double value = 0.5;  // the constant, or the fraction of p0

  static DeltaMode constant(double x) { return {Kind::Const, x}; }
  static DeltaMode fraction(double r) { return {Kind::Fraction, r}; }
};

struct BoundsRange {
  double l_lo, l_hi, u_lo, u_hi;
};

struct Range {
  double lo, hi;
};

struct GenConfig {
  int n = 100;
  double k_fraction = 0.10;
  DeltaMode delta_mode;
  std::optional<BoundsRange> bounds_mode;
  Range f_range{1.0, 10.0};
  Range diag_range{1.0, 10.0};
  int offdiag_max_count = 5;
  double offdiag_rel_mag = 0.2;
  Range cost_range{1.0, 5.0};
  bool dominance_fix = true;
  bool allow_mixed_signs = false;
  /// Take a = -f - D^T c instead of a = f - D^T c.
  bool literal_sign = false;
  std::uint64_t seed = 1;

  int k() const;
};

/// Throws ContractError on unordered ranges or out-of-range parameters.
void check_config(const GenConfig& config);

/// Draw order, all from one MT19937-64 stream seeded with config.seed:
/// bounds (l_i, u_i) for every i; then row by row d_ii, the off-diagonal count,
/// the distinct off-diagonal columns, and their values; then p0; then f_i and
/// c_i per product. Delta takes no draws.
Instance generate(const GenConfig& config);

/// "const:0.5" / "frac:0.1".
std::string describe(const DeltaMode& mode);
/// "none" / "l_lo,l_hi,u_lo,u_hi".
std::string describe(const std::optional<BoundsRange>& bounds);

DeltaMode parse_delta_mode(const std::string& text);
std::optional<BoundsRange> parse_bounds_mode(const std::string& text);

enum class SuiteScale { Desk, Full };

struct SuiteEntry {
  std::string id;
  GenConfig config;
};

/// Sizes x {delta 0.5, 1.0} x {no bounds, l in [1,5] with u in [5,10], [10,15], [15,20]}.
/// Desk sizes are 200, 1000, 5000; full sizes 10000 to 100000. Seeds derive from base_seed.
std::vector<SuiteEntry> benchmark_suite(SuiteScale scale, std::uint64_t base_seed);

}  // namespace priceopt
