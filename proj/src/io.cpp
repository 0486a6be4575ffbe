#include "priceopt/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "priceopt/errors.hpp"
#include "priceopt/model.hpp"

namespace priceopt {

namespace {

using nlohmann::json;

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the first occurrence of the quoted key, or 0 when not found.
int line_of_field(const std::string& text, const std::string& name) {
  const auto pos = text.find("\"" + name + "\"");
  return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

struct FieldContext {
  const std::string& text;
  const std::string& source;

  std::string where(const std::string& field) const {
    const int line = line_of_field(text, field);
    return source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": field '" + field + "'";
  }
};

const json& require_field(const json& doc, const FieldContext& ctx, const std::string& name) {
  const auto it = doc.find(name);
  if (it == doc.end()) throw ParseError(ctx.source + ": missing field '" + name + "'");
  return *it;
}

int read_int(const json& doc, const FieldContext& ctx, const std::string& name) {
  const json& v = require_field(doc, ctx, name);
  if (!v.is_number_integer()) throw ParseError(ctx.where(name) + ": expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < 0 || x > 1'000'000'000) throw ValidationError(ctx.where(name) + ": value out of range");
  return static_cast<int>(x);
}

Vector read_vector(const json& v, const FieldContext& ctx, const std::string& name, int n) {
  if (!v.is_array()) throw ParseError(ctx.where(name) + ": expected an array of numbers");
  if (static_cast<int>(v.size()) != n) {
    throw ValidationError(ctx.where(name) + ": has length " + std::to_string(v.size()) + ", expected n = " +
                          std::to_string(n));
  }
  Vector out(n);
  for (int i = 0; i < n; ++i) {
    if (!v[i].is_number()) {
      throw ParseError(ctx.where(name) + ": entry " + std::to_string(i) + " is not a number");
    }
    out[i] = v[i].get<double>();
  }
  return out;
}

std::string dump_vector(const Vector& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size())).dump();
}

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Accumulates LP terms, wrapping lines well below the 510-character limit.
class LpTerms {
 public:
  explicit LpTerms(std::string& out) : out_(out) {}

  void add(double coef, const std::string& var) {
    if (coef == 0.0) return;
    std::string term;
    if (first_) {
      term = (coef < 0.0 ? "- " : "") + fmt12(std::abs(coef)) + " " + var;
    } else {
      term = (coef < 0.0 ? " - " : " + ") + fmt12(std::abs(coef)) + " " + var;
    }
    push(term);
  }

  void raw(const std::string& piece) { push(piece); }

  bool empty() const { return first_; }

 private:
  void push(const std::string& piece) {
    if (width_ + piece.size() > 200) {
      out_ += "\n  ";
      width_ = 2;
    }
    out_ += piece;
    width_ += piece.size();
    first_ = false;
  }

  std::string& out_;
  std::size_t width_ = 0;
  bool first_ = true;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string opt_number(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

std::string format_double(double v) { return fmt12(v); }

Instance parse_instance(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source + ":" + std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError(source + ": expected a JSON object");
  const FieldContext ctx{text, source};

  const int n = read_int(doc, ctx, "n");
  if (n < 1) throw ValidationError(ctx.where("n") + ": must be positive");
  const int k = read_int(doc, ctx, "k");
  if (k < 1 || k > n) throw ValidationError(ctx.where("k") + ": must satisfy 1 <= k <= n");
  Vector a = read_vector(require_field(doc, ctx, "a"), ctx, "a", n);
  Vector c = read_vector(require_field(doc, ctx, "c"), ctx, "c", n);
  Vector p0 = read_vector(require_field(doc, ctx, "p0"), ctx, "p0", n);
  Vector delta = read_vector(require_field(doc, ctx, "delta"), ctx, "delta", n);
  for (int i = 0; i < n; ++i) {
    if (!(delta[i] > 0.0)) {
      throw ValidationError(ctx.where("delta") + ": entry " + std::to_string(i) + " must be positive");
    }
  }

  std::optional<PriceBounds> bounds;
  const bool has_l = doc.contains("l");
  const bool has_u = doc.contains("u");
  if (has_l != has_u) throw ValidationError(ctx.where(has_l ? "l" : "u") + ": l and u must be given together");
  if (has_l) {
    PriceBounds b{read_vector(doc["l"], ctx, "l", n), read_vector(doc["u"], ctx, "u", n)};
    for (int i = 0; i < n; ++i) {
      if (b.lower[i] > p0[i] - delta[i]) {
        throw ValidationError(ctx.where("l") + ": entry " + std::to_string(i) + " exceeds p0 - delta");
      }
      if (b.upper[i] < p0[i] + delta[i]) {
        throw ValidationError(ctx.where("u") + ": entry " + std::to_string(i) + " is below p0 + delta");
      }
    }
    bounds = std::move(b);
  }

  const json& jd = require_field(doc, ctx, "D");
  if (!jd.is_array()) throw ParseError(ctx.where("D") + ": expected a list of [row, col, value] triples");
  std::vector<Triplet> entries;
  entries.reserve(jd.size());
  for (std::size_t e = 0; e < jd.size(); ++e) {
    const json& t = jd[e];
    if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() || !t[1].is_number_integer() ||
        !t[2].is_number()) {
      throw ParseError(ctx.where("D") + ": entry " + std::to_string(e) + " is not a [row, col, value] triple");
    }
    const auto row = t[0].get<std::int64_t>();
    const auto col = t[1].get<std::int64_t>();
    if (row < 0 || row >= n || col < 0 || col >= n) {
      throw ValidationError(ctx.where("D") + ": entry " + std::to_string(e) + " has an index out of range");
    }
    entries.push_back({static_cast<int>(row), static_cast<int>(col), t[2].get<double>()});
  }
  SparseMatrix d;
  try {
    d = SparseMatrix::from_triplets(n, std::move(entries));
  } catch (const StructuralError& e) {
    throw ValidationError(ctx.where("D") + ": " + e.what());
  }
  try {
    return Instance(k, std::move(a), std::move(d), std::move(c), std::move(p0), std::move(delta),
                    std::move(bounds));
  } catch (const StructuralError& e) {
    throw ValidationError(source + ": " + e.what());
  }
}

Instance read_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str(), path);
}

std::string format_instance(const Instance& instance) {
  std::string out = "{\n";
  out += "  \"n\": " + std::to_string(instance.n()) + ",\n";
  out += "  \"k\": " + std::to_string(instance.k()) + ",\n";
  out += "  \"a\": " + dump_vector(instance.a()) + ",\n";
  out += "  \"c\": " + dump_vector(instance.c()) + ",\n";
  out += "  \"p0\": " + dump_vector(instance.p0()) + ",\n";
  out += "  \"delta\": " + dump_vector(instance.delta()) + ",\n";
  if (instance.has_bounds()) {
    out += "  \"l\": " + dump_vector(instance.bounds()->lower) + ",\n";
    out += "  \"u\": " + dump_vector(instance.bounds()->upper) + ",\n";
  }
  out += "  \"D\": [";
  const std::vector<Triplet> entries = instance.d().triplets();
  for (std::size_t e = 0; e < entries.size(); ++e) {
    out += e == 0 ? "\n    " : ",\n    ";
    out += json::array({entries[e].row, entries[e].col, entries[e].value}).dump();
  }
  out += "\n  ]\n}\n";
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("write to " + tmp + " failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename " + tmp + " to " + path);
  }
}

void write_instance(const Instance& instance, const std::string& path) {
  write_file_atomic(path, format_instance(instance));
}

double default_big_m(const Instance& instance) {
  return 10.0 * (instance.p0() + instance.delta()).maxCoeff();
}

std::string format_mip_lp(const Instance& instance, std::optional<double> big_m) {
  const int n = instance.n();
  const double M = big_m.value_or(default_big_m(instance));
  if (!instance.has_bounds() && !(M > 0.0 && std::isfinite(M))) {
    throw ContractError("big-M must be positive and finite");
  }
  const Vector& p0 = instance.p0();
  const Vector& delta = instance.delta();
  const Vector& f = instance.linear_coef();
  auto p = [](int i) { return "p_" + std::to_string(i + 1); };
  auto z = [](const char* kind, int i) { return std::string("z") + kind + "_" + std::to_string(i + 1); };

  std::string out;
  out += "\\ Price optimization: maximize profit with at most " + std::to_string(instance.k()) +
         " price changes, each of at least delta.\n";
  out += instance.has_bounds() ? "\\ Changed prices are limited by per-product bounds l and u.\n"
                               : "\\ Changed prices are limited by big-M = " + fmt12(M) + ".\n";
  out += "\\ The objective omits the constant -c'a = " + fmt12(-instance.c().dot(instance.a())) +
         "; profit = objective + (-c'a).\n";

  out += "Maximize\n obj: ";
  {
    LpTerms terms(out);
    for (int i = 0; i < n; ++i) terms.add(f[i], p(i));
    std::vector<std::string> quad;
    for (const Triplet& t : symmetric_part(instance.d())) {
      if (t.col < t.row) continue;
      const double coef = t.row == t.col ? -t.value : -2.0 * t.value;
      const std::string var = t.row == t.col ? p(t.row) + " ^ 2" : p(t.row) + " * " + p(t.col);
      const std::string mag = fmt12(std::abs(coef)) + " " + var;
      if (quad.empty()) {
        quad.push_back((coef < 0.0 ? "- " : "") + mag);
      } else {
        quad.push_back((coef < 0.0 ? " - " : " + ") + mag);
      }
    }
    if (!quad.empty()) {
      terms.raw(terms.empty() ? "[ " : " + [ ");
      for (const std::string& q : quad) terms.raw(q);
      terms.raw(" ] / 2");
    }
    if (terms.empty()) terms.raw("0 " + p(0));
  }
  out += "\nSubject To\n";
  for (int i = 0; i < n; ++i) {
    const double low_coef = instance.has_bounds() ? -instance.bounds()->lower[i] : M;
    const double up_coef = instance.has_bounds() ? -instance.bounds()->upper[i] : -M;
    out += " lo_" + std::to_string(i + 1) + ": ";
    {
      LpTerms terms(out);
      terms.add(1.0, p(i));
      terms.add(-p0[i], z("P", i));
      terms.add(low_coef, z("L", i));
      terms.add(-(p0[i] + delta[i]), z("R", i));
    }
    out += " >= 0\n up_" + std::to_string(i + 1) + ": ";
    {
      LpTerms terms(out);
      terms.add(1.0, p(i));
      terms.add(-p0[i], z("P", i));
      terms.add(-(p0[i] - delta[i]), z("L", i));
      terms.add(up_coef, z("R", i));
    }
    out += " <= 0\n one_" + std::to_string(i + 1) + ": " + z("P", i) + " + " + z("L", i) + " + " + z("R", i) +
           " = 1\n";
  }
  out += " card: ";
  {
    LpTerms terms(out);
    for (int i = 0; i < n; ++i) {
      terms.add(1.0, z("L", i));
      terms.add(1.0, z("R", i));
    }
  }
  out += " <= " + std::to_string(instance.k()) + "\nBounds\n";
  for (int i = 0; i < n; ++i) out += " " + p(i) + " free\n";
  out += "Binary\n";
  for (int i = 0; i < n; ++i) out += " " + z("P", i) + " " + z("L", i) + " " + z("R", i) + "\n";
  out += "End\n";
  return out;
}

void export_mip_lp(const Instance& instance, std::optional<double> big_m, const std::string& path) {
  write_file_atomic(path, format_mip_lp(instance, big_m));
}

double adjusted_gap(double z_base, double z_a, double z_b) {
  if (z_base == 0.0) throw ContractError("adjusted gap is undefined for a zero baseline profit");
  const double gap = 100.0 * (z_b - z_a) / std::abs(z_base);
  if (!std::isfinite(gap)) throw NumericError("adjusted gap is not finite");
  return gap;
}

std::optional<double> improvement_pct(double z_base, double z) {
  if (z_base == 0.0) return std::nullopt;
  return 100.0 * (z - z_base) / std::abs(z_base);
}

ReportRow make_row(const Instance& instance, const SolveReport& report, const std::string& instance_id,
                   const std::string& delta_mode, const std::string& bounds_mode, bool with_timing) {
  ReportRow row;
  row.instance_id = instance_id;
  row.n = instance.n();
  row.k = instance.k();
  row.delta_mode = delta_mode;
  row.bounds_mode = bounds_mode;
  row.start_id = report.start_id;
  row.final_profit = report.final_profit;
  row.improvement_pct = improvement_pct(profit_z(instance, instance.p0()), report.final_profit);
  row.iterations = report.iterations;
  if (with_timing) row.wall_time_s = report.wall_time_s;
  row.stationary = report.stationary;
  row.bound_ii = report.bound_ii;
  return row;
}

std::string format_report(const std::vector<ReportRow>& rows, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::Csv) {
    out += "instance_id,n,k,delta_mode,bounds_mode,start_id,final_profit,improvement_pct_vs_base,iterations,"
           "wall_time_s,stationary,bound_ii\n";
    for (const ReportRow& r : rows) {
      out += csv_field(r.instance_id) + "," + std::to_string(r.n) + "," + std::to_string(r.k) + "," +
             csv_field(r.delta_mode) + "," + csv_field(r.bounds_mode) + "," + csv_field(r.start_id) + "," +
             format_double(r.final_profit) + "," + opt_number(r.improvement_pct) + "," +
             std::to_string(r.iterations) + "," + opt_number(r.wall_time_s) + "," + (r.stationary ? "1" : "0") +
             "," + opt_number(r.bound_ii) + "\n";
    }
    return out;
  }
  for (const ReportRow& r : rows) {
    out += "instance_id=" + r.instance_id + " n=" + std::to_string(r.n) + " k=" + std::to_string(r.k) +
           " delta_mode=" + r.delta_mode + " bounds_mode=" + r.bounds_mode + " start_id=" + r.start_id +
           " final_profit=" + format_double(r.final_profit) +
           " improvement_pct_vs_base=" + opt_number(r.improvement_pct) +
           " iterations=" + std::to_string(r.iterations) + " wall_time_s=" + opt_number(r.wall_time_s) +
           " stationary=" + (r.stationary ? "1" : "0") + " bound_ii=" + opt_number(r.bound_ii) + "\n";
  }
  return out;
}

void write_report(const std::vector<ReportRow>& rows, const std::string& path, ReportFormat format) {
  write_file_atomic(path, format_report(rows, format));
}

std::string format_sweep(const std::vector<SweepRow>& rows) {
  std::string out = "k_fraction,k,best_start_id,best_profit,improvement_pct_vs_base,stationary\n";
  for (const SweepRow& r : rows) {
    out += format_double(r.k_fraction) + "," + std::to_string(r.k) + "," + csv_field(r.best_start_id) + "," +
           format_double(r.best_profit) + "," + opt_number(r.improvement_pct) + "," + (r.stationary ? "1" : "0") +
           "\n";
  }
  return out;
}

}  // namespace priceopt
