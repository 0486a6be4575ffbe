#include "priceopt/gen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <unordered_set>

#include "priceopt/errors.hpp"
#include "priceopt/rng.hpp"

namespace priceopt {

namespace {

void check_range(const Range& r, const char* name) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
    throw ContractError(std::string(name) + " must be an ordered finite range");
  }
}

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double parse_number(const std::string& text, const std::string& context) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || text.empty()) {
    throw ContractError("cannot parse number '" + text + "' in " + context);
  }
  return v;
}

}  // namespace

int GenConfig::k() const {
  const auto k = static_cast<int>(std::lround(k_fraction * n));
  return std::clamp(k, 1, n);
}

void check_config(const GenConfig& config) {
  if (config.n < 1) throw ContractError("n must be positive");
  if (!(config.k_fraction > 0.0 && config.k_fraction <= 1.0)) {
    throw ContractError("k_fraction must lie in (0, 1]");
  }
  if (!(config.delta_mode.value > 0.0) || !std::isfinite(config.delta_mode.value)) {
    throw ContractError("delta value must be positive");
  }
  check_range(config.f_range, "f_range");
  check_range(config.diag_range, "diag_range");
  check_range(config.cost_range, "cost_range");
  if (!(config.diag_range.lo > 0.0)) throw ContractError("diag_range must be positive");
  if (config.offdiag_max_count < 0) throw ContractError("offdiag_max_count must be nonnegative");
  if (!(config.offdiag_rel_mag >= 0.0)) throw ContractError("offdiag_rel_mag must be nonnegative");
  if (config.bounds_mode) {
    const BoundsRange& b = *config.bounds_mode;
    check_range({b.l_lo, b.l_hi}, "lower bound range");
    check_range({b.u_lo, b.u_hi}, "upper bound range");
    if (b.l_hi > b.u_lo) throw ContractError("lower bound range must lie below the upper bound range");
  }
}

Instance generate(const GenConfig& config) {
  check_config(config);
  const int n = config.n;
  Engine rng(config.seed);

  Vector lower, upper;
  if (config.bounds_mode) {
    const BoundsRange& b = *config.bounds_mode;
    lower.resize(n);
    upper.resize(n);
    for (int i = 0; i < n; ++i) {
      lower[i] = uniform(rng, b.l_lo, b.l_hi);
      upper[i] = uniform(rng, b.u_lo, b.u_hi);
    }
  }

  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(n) * (1 + config.offdiag_max_count));
  Vector diag(n);
  std::unordered_set<int> used;
  for (int i = 0; i < n; ++i) {
    diag[i] = uniform(rng, config.diag_range.lo, config.diag_range.hi);
    entries.push_back({i, i, diag[i]});
    const auto m = std::min<std::int64_t>(uniform_int(rng, 0, config.offdiag_max_count), n - 1);
    used.clear();
    std::vector<int> cols;
    while (static_cast<std::int64_t>(cols.size()) < m) {
      const auto j = static_cast<int>(uniform_int(rng, 0, n - 1));
      if (j == i || !used.insert(j).second) continue;
      cols.push_back(j);
    }
    for (int j : cols) {
      // U(0, rel * d_ii], never an exact zero unless the magnitude is zero.
      double v = -config.offdiag_rel_mag * diag[i] * (1.0 - uniform01(rng));
      if (config.allow_mixed_signs && (rng() >> 63) != 0) v = -v;
      if (v != 0.0) entries.push_back({i, j, v});
    }
  }

  if (config.dominance_fix) {
    std::vector<double> spread(n, 0.0);
    for (const Triplet& t : entries) {
      if (t.row == t.col) continue;
      spread[t.row] += std::abs(t.value);
      spread[t.col] += std::abs(t.value);
    }
    std::vector<double> factor(n, 1.0);
    for (int i = 0; i < n; ++i) {
      const double target = 2.0 * diag[i] * (1.0 - 1e-3);
      if (spread[i] >= target) factor[i] = target / spread[i] * (1.0 - 1e-12);
    }
    for (Triplet& t : entries) {
      if (t.row != t.col) t.value *= std::min(factor[t.row], factor[t.col]);
    }
  }
  SparseMatrix d = SparseMatrix::from_triplets(n, std::move(entries));

  Vector p0(n);
  for (int i = 0; i < n; ++i) {
    p0[i] = config.bounds_mode ? uniform(rng, lower[i], upper[i]) : uniform(rng, 1.0, 10.0);
  }
  Vector f(n), c(n);
  for (int i = 0; i < n; ++i) {
    f[i] = uniform(rng, config.f_range.lo, config.f_range.hi);
    c[i] = uniform(rng, config.cost_range.lo, config.cost_range.hi);
  }
  Vector delta(n);
  for (int i = 0; i < n; ++i) {
    delta[i] = config.delta_mode.kind == DeltaMode::Kind::Const ? config.delta_mode.value
                                                                : config.delta_mode.value * p0[i];
  }

  Vector dtc(n);
  d.multiply_transpose(c, dtc);
  Vector a = config.literal_sign ? Vector(-f - dtc) : Vector(f - dtc);

  std::optional<PriceBounds> bounds;
  if (config.bounds_mode) {
    for (int i = 0; i < n; ++i) {
      lower[i] = std::min(lower[i], p0[i] - delta[i]);
      upper[i] = std::max(upper[i], p0[i] + delta[i]);
    }
    bounds = PriceBounds{std::move(lower), std::move(upper)};
  }
  return Instance(config.k(), std::move(a), std::move(d), std::move(c), std::move(p0), std::move(delta),
                  std::move(bounds));
}

std::string describe(const DeltaMode& mode) {
  return (mode.kind == DeltaMode::Kind::Const ? "const:" : "frac:") + fmt_g(mode.value);
}

std::string describe(const std::optional<BoundsRange>& bounds) {
  if (!bounds) return "none";
  return fmt_g(bounds->l_lo) + "," + fmt_g(bounds->l_hi) + "," + fmt_g(bounds->u_lo) + "," +
         fmt_g(bounds->u_hi);
}

DeltaMode parse_delta_mode(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ContractError("delta mode must be const:X or frac:R, got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const double value = parse_number(text.substr(colon + 1), "delta mode");
  if (kind == "const") return DeltaMode::constant(value);
  if (kind == "frac") return DeltaMode::fraction(value);
  throw ContractError("delta mode must be const:X or frac:R, got '" + text + "'");
}

std::optional<BoundsRange> parse_bounds_mode(const std::string& text) {
  if (text == "none") return std::nullopt;
  double v[4];
  std::size_t start = 0;
  for (int idx = 0; idx < 4; ++idx) {
    const auto comma = text.find(',', start);
    const bool last = idx == 3;
    if (last != (comma == std::string::npos)) {
      throw ContractError("bounds mode must be none or l_lo,l_hi,u_lo,u_hi, got '" + text + "'");
    }
    v[idx] = parse_number(text.substr(start, last ? std::string::npos : comma - start), "bounds mode");
    start = comma + 1;
  }
  return BoundsRange{v[0], v[1], v[2], v[3]};
}

std::vector<SuiteEntry> benchmark_suite(SuiteScale scale, std::uint64_t base_seed) {
  const std::vector<int> sizes = scale == SuiteScale::Desk ? std::vector<int>{200, 1000, 5000}
                                                           : std::vector<int>{10000, 25000, 50000, 75000, 100000};
  const std::vector<std::optional<BoundsRange>> regimes = {
      std::nullopt, BoundsRange{1, 5, 5, 10}, BoundsRange{1, 5, 10, 15}, BoundsRange{1, 5, 15, 20}};
  std::vector<SuiteEntry> out;
  for (int n : sizes) {
    for (double delta : {0.5, 1.0}) {
      for (const auto& regime : regimes) {
        SuiteEntry e;
        e.config.n = n;
        e.config.delta_mode = DeltaMode::constant(delta);
        e.config.bounds_mode = regime;
        e.config.seed = derive_seed(base_seed, out.size());
        e.id = "n" + std::to_string(n) + "_d" + fmt_g(delta) + "_" +
               (regime ? "u" + fmt_g(regime->u_lo) + "-" + fmt_g(regime->u_hi) : std::string("nobounds"));
        out.push_back(std::move(e));
      }
    }
  }
  return out;
}

}  // namespace priceopt
