#pragma once

#include <optional>
#include <string>
#include <vector>

#include "priceopt/gpa.hpp"
#include "priceopt/instance.hpp"

namespace priceopt {

/// Instance files are JSON objects with fields n, k, a, c, p0, delta, optional
/// l and u, and D as a list of [row, col, value] triples with 0-based indices.
/// Doubles are written with enough digits to round-trip exactly.
Instance parse_instance(const std::string& text, const std::string& source = "<string>");
Instance read_instance(const std::string& path);
std::string format_instance(const Instance& instance);
/// Writes through a temporary file and a rename, so a failed write leaves no partial file.
void write_instance(const Instance& instance, const std::string& path);

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& content);

/// 10 * max_i (p0_i + delta_i).
double default_big_m(const Instance& instance);

/// The mixed-integer model in LP file syntax: big-M rows without price bounds,
/// rows using l and u when bounds are present. The objective is profit
/// without the constant -c^T a.
std::string format_mip_lp(const Instance& instance, std::optional<double> big_m = std::nullopt);
void export_mip_lp(const Instance& instance, std::optional<double> big_m, const std::string& path);

/// 100 (z_b - z_a) / |z_base|. Throws ContractError when z_base is zero.
double adjusted_gap(double z_base, double z_a, double z_b);

struct ReportRow {
  std::string instance_id;
  int n = 0;
  int k = 0;
  std::string delta_mode;
  std::string bounds_mode;
  std::string start_id;
  double final_profit = 0.0;
  std::optional<double> improvement_pct;
  int iterations = 0;
  std::optional<double> wall_time_s;
  bool stationary = false;
  std::optional<double> bound_ii;
};

/// Row for one solve. The baseline profit Z(p0) is taken from the instance.
/// Wall time is left empty unless with_timing, so repeated runs compare equal.
ReportRow make_row(const Instance& instance, const SolveReport& report, const std::string& instance_id,
                   const std::string& delta_mode, const std::string& bounds_mode, bool with_timing);

/// 100 (Z(p) - Z(p0)) / |Z(p0)|, empty when Z(p0) is zero.
std::optional<double> improvement_pct(double z_base, double z);

enum class ReportFormat { Csv, Lines };

std::string format_report(const std::vector<ReportRow>& rows, ReportFormat format);
void write_report(const std::vector<ReportRow>& rows, const std::string& path, ReportFormat format);

struct SweepRow {
  double k_fraction = 0.0;
  int k = 0;
  std::string best_start_id;
  double best_profit = 0.0;
  std::optional<double> improvement_pct;
  bool stationary = false;
};

std::string format_sweep(const std::vector<SweepRow>& rows);

/// Number formatting shared by the report writers.
std::string format_double(double v);

}  // namespace priceopt
