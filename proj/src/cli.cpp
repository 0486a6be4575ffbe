#include "priceopt/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "priceopt/errors.hpp"
#include "priceopt/gen.hpp"
#include "priceopt/gpa.hpp"
#include "priceopt/io.hpp"
#include "priceopt/model.hpp"
#include "priceopt/oracle.hpp"
#include "priceopt/projection.hpp"

namespace priceopt::cli {

namespace {

using nlohmann::json;

std::uint64_t default_seed() {
  const char* env = std::getenv("SOLVER_SEED");
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  std::uint64_t v = 0;
  const char* end = env + std::char_traits<char>::length(env);
  const auto res = std::from_chars(env, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw CLI::ValidationError("SOLVER_SEED", "must be a nonnegative integer, got '" + std::string(env) + "'");
  }
  return v;
}

struct SolverOptions {
  std::string l_mode = "gershgorin";
  double eps = SolverParams{}.eps;
  bool abs_eps = false;
  int max_iters = SolverParams{}.max_iters;
  bool refine = true;
  int stab_window = SolverParams{}.stab_window;
  double long_step_factor = SolverParams{}.long_step_factor;
  bool bounds_report = false;
  int parallel_starts = 1;
  int starts = 5;
  std::uint64_t seed = kDefaultSeed;
  bool timing = false;

  SolverParams params() const {
    SolverParams p;
    p.l_mode = l_mode == "power" ? LMode::Power : LMode::Gershgorin;
    p.eps = eps;
    p.eps_relative = !abs_eps;
    p.max_iters = max_iters;
    p.refine = refine;
    p.stab_window = stab_window;
    p.long_step_factor = long_step_factor;
    p.bounds_report = bounds_report;
    p.parallel_starts = parallel_starts;
    p.starts = starts;
    p.seed = seed;
    return p;
  }
};

void add_solver_options(CLI::App* app, SolverOptions& o) {
  app->add_option("--l-mode", o.l_mode, "Step constant: gershgorin or power")
      ->check(CLI::IsMember({"gershgorin", "power"}))
      ->capture_default_str();
  app->add_option("--eps", o.eps, "Stop when the objective decrease is at most eps (relative by default)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_flag("--abs-eps", o.abs_eps, "Treat --eps as an absolute threshold");
  app->add_option("--max-iters", o.max_iters, "Iteration cap per start")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_flag("--refine,!--no-refine", o.refine, "Solve the restricted problem once the partition settles")
      ->capture_default_str();
  app->add_option("--stab-window", o.stab_window, "Stable iterations before refinement")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--long-step", o.long_step_factor, "Step multiplier of the long-step start")
      ->check(CLI::Range(1.0 + 1e-12, 1e12))
      ->capture_default_str();
  app->add_flag("--bounds-report", o.bounds_report, "Estimate lambda_n and report suboptimality bounds");
  app->add_option("--starts", o.starts, "Number of standard starts (p0, three random, long step)")
      ->check(CLI::Range(1, 5))
      ->capture_default_str();
  app->add_option("--parallel-starts", o.parallel_starts, "Starts run concurrently")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app->add_option("--seed", o.seed, "Seed of the random starts (default: SOLVER_SEED or built-in)");
  app->add_flag("--timing", o.timing, "Fill the wall_time_s column");
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

// Labels for instances read from files, where the generating config is unknown.
std::string delta_label(const Instance& instance) {
  const Vector& d = instance.delta();
  if ((d.array() == d[0]).all()) return "const:" + format_double(d[0]);
  return "per-product";
}

std::string bounds_label(const Instance& instance) { return instance.has_bounds() ? "per-product" : "none"; }

void require_solvable(const Instance& instance, std::ostream& err) {
  const ValidationReport report = validate(instance);
  if (!report.a1_positive_definite) {
    throw ValidationError("S = D + D^T is not positive definite; the objective has no minimum");
  }
  for (const std::string& m : report.messages) err << "warning: " << m << "\n";
}

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const CapacityError*>(&e)) return kExitCapacity;
  if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
  return kExitData;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Price optimization with a cap on price changes and minimum change sizes", "priceopt"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  std::uint64_t seed = kDefaultSeed;
  try {
    seed = default_seed();
  } catch (const CLI::Error& e) {
    err << e.what() << "\n";
    return kExitUsage;
  }

  // gen
  GenConfig gen_config;
  gen_config.seed = seed;
  std::string gen_delta = "const:0.5";
  std::string gen_bounds = "none";
  std::string gen_out;
  bool gen_no_fix = false;
  auto* gen = app.add_subcommand("gen", "Generate a random instance");
  gen->add_option("--n", gen_config.n, "Number of products")->required()->check(CLI::PositiveNumber);
  gen->add_option("--k-frac", gen_config.k_fraction, "Fraction of products allowed to change")
      ->check(CLI::Range(1e-12, 1.0))
      ->capture_default_str();
  gen->add_option("--delta", gen_delta, "const:X or frac:R")->capture_default_str();
  gen->add_option("--bounds", gen_bounds, "none or l_lo,l_hi,u_lo,u_hi")->capture_default_str();
  gen->add_option("--seed", gen_config.seed, "Generator seed");
  gen->add_flag("--mixed-signs", gen_config.allow_mixed_signs, "Allow positive cross effects");
  gen->add_flag("--no-dominance-fix", gen_no_fix, "Keep off-diagonals as drawn");
  gen->add_flag("--literal-sign", gen_config.literal_sign, "Use a = -f - D^T c");
  gen->add_option("--out", gen_out, "Instance file")->required();

  // solve
  SolverOptions solve_opts;
  solve_opts.seed = seed;
  std::string solve_instance, solve_report, solve_solution, solve_id, solve_format = "csv";
  auto* solve = app.add_subcommand("solve", "Run the gradient projection algorithm from several starts");
  solve->add_option("--instance", solve_instance, "Instance file")->required();
  add_solver_options(solve, solve_opts);
  solve->add_option("--report", solve_report, "Report file, one row per start")->required();
  solve->add_option("--format", solve_format, "csv or lines")
      ->check(CLI::IsMember({"csv", "lines"}))
      ->capture_default_str();
  solve->add_option("--solution", solve_solution, "Write the best price vector as JSON");
  solve->add_option("--id", solve_id, "Instance id for the report (default: file stem)");

  // oracle
  std::string oracle_instance, oracle_out;
  auto* oracle = app.add_subcommand("oracle", "Global optimum by enumerating every partition (small n)");
  oracle->add_option("--instance", oracle_instance, "Instance file")->required();
  oracle->add_option("--out", oracle_out, "Result JSON")->required();

  // project
  std::string project_instance, project_q, project_out;
  auto* project = app.add_subcommand("project", "Project a point onto the feasible set");
  project->add_option("--instance", project_instance, "Instance file")->required();
  project->add_option("--q", project_q, "JSON array, or object with field q")->required();
  project->add_option("--out", project_out, "Result JSON")->required();

  // compare
  double cmp_base = 0.0, cmp_a = 0.0, cmp_b = 0.0;
  auto* compare = app.add_subcommand("compare", "Adjusted objective gap 100 (Zb - Za) / |Z0|");
  compare->add_option("--base-profit", cmp_base, "Baseline profit Z0")->required();
  compare->add_option("--a", cmp_a, "Profit of the reference solution")->required();
  compare->add_option("--b", cmp_b, "Profit of the compared solution")->required();

  // export-mip
  std::string mip_instance, mip_out;
  std::optional<double> mip_big_m;
  auto* export_mip = app.add_subcommand("export-mip", "Write the mixed-integer model in LP file syntax");
  export_mip->add_option("--instance", mip_instance, "Instance file")->required();
  export_mip->add_option("--big-m", mip_big_m, "Big-M (default 10 max(p0 + delta))")->check(CLI::PositiveNumber);
  export_mip->add_option("--out", mip_out, "LP file")->required();

  // sweep
  SolverOptions sweep_opts;
  sweep_opts.seed = seed;
  std::string sweep_instance, sweep_out;
  std::vector<double> sweep_k{0.02, 0.05, 0.1, 0.2, 0.4, 1.0};
  auto* sweep = app.add_subcommand("sweep", "Best profit as the change budget k grows");
  sweep->add_option("--instance", sweep_instance, "Instance file")->required();
  sweep->add_option("--k-list", sweep_k, "Fractions of n")
      ->delimiter(',')
      ->check(CLI::Range(1e-12, 1.0))
      ->capture_default_str();
  add_solver_options(sweep, sweep_opts);
  sweep->add_option("--out", sweep_out, "CSV file")->required();

  // suite
  SolverOptions suite_opts;
  suite_opts.seed = seed;
  std::string suite_scale = "desk", suite_dir;
  bool suite_save = false;
  auto* suite = app.add_subcommand("suite", "Generate and solve the benchmark grid");
  suite->add_option("--scale", suite_scale, "desk or full")
      ->check(CLI::IsMember({"desk", "full"}))
      ->capture_default_str();
  suite->add_option("--out-dir", suite_dir, "Output directory")->required();
  suite->add_flag("--save-instances", suite_save, "Also write each generated instance");
  add_solver_options(suite, suite_opts);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      gen_config.delta_mode = parse_delta_mode(gen_delta);
      gen_config.bounds_mode = parse_bounds_mode(gen_bounds);
      gen_config.dominance_fix = !gen_no_fix;
      check_config(gen_config);
      const Instance instance = generate(gen_config);
      write_instance(instance, gen_out);
      out << "wrote " << gen_out << " (n=" << instance.n() << ", k=" << instance.k() << ")\n";
    } else if (solve->parsed()) {
      const Instance instance = read_instance(solve_instance);
      require_solvable(instance, err);
      const MultiStartResult result = multi_start(instance, solve_opts.params());
      const std::string id = solve_id.empty() ? stem_of(solve_instance) : solve_id;
      std::vector<ReportRow> rows;
      for (const SolveReport& r : result.reports) {
        rows.push_back(make_row(instance, r, id, delta_label(instance), bounds_label(instance), solve_opts.timing));
      }
      const SolveReport& best = result.best_report();
      std::string solution;
      if (!solve_solution.empty()) {
        json doc{{"start_id", best.start_id}, {"q_value", best.final_q_obj}, {"profit", best.final_profit},
                 {"stationary", best.stationary}, {"partition", best.partition.encode()},
                 {"p", to_std(best.final_p)}};
        solution = doc.dump(2) + "\n";
      }
      write_report(rows, solve_report, solve_format == "csv" ? ReportFormat::Csv : ReportFormat::Lines);
      if (!solve_solution.empty()) write_file_atomic(solve_solution, solution);
      out << "best start " << best.start_id << ": profit " << format_double(best.final_profit)
          << ", stationary " << (best.stationary ? "yes" : "no") << ", changes " << best.kappa << "\n";
    } else if (oracle->parsed()) {
      const Instance instance = read_instance(oracle_instance);
      require_solvable(instance, err);
      const GlobalOptimum opt = global_optimum(instance);
      const double L = spectral_bounds(instance, LMode::Gershgorin, false).L;
      const StationarityCheck check = certify_stationary(instance, opt.p, L);
      json doc{{"q_value", opt.q_value},
               {"profit", profit_z(instance, opt.p)},
               {"partition", opt.partition.encode()},
               {"pieces_evaluated", opt.pieces_evaluated},
               {"stationary", check.ok},
               {"p", to_std(opt.p)}};
      write_file_atomic(oracle_out, doc.dump(2) + "\n");
      out << "global optimum Q* = " << format_double(opt.q_value) << ", partition " << opt.partition.encode()
          << "\n";
    } else if (project->parsed()) {
      const Instance instance = read_instance(project_instance);
      json qdoc;
      try {
        qdoc = json::parse(read_text(project_q));
      } catch (const json::parse_error& e) {
        throw ParseError(project_q + ": " + e.what());
      }
      const json& arr = qdoc.is_object() && qdoc.contains("q") ? qdoc["q"] : qdoc;
      if (!arr.is_array() || static_cast<int>(arr.size()) != instance.n()) {
        throw ValidationError(project_q + ": field 'q' must be an array of n numbers");
      }
      Vector q(instance.n());
      for (int i = 0; i < instance.n(); ++i) {
        if (!arr[i].is_number()) throw ParseError(project_q + ": field 'q' entry " + std::to_string(i));
        q[i] = arr[i].get<double>();
      }
      const Vector p = project_feasible(instance, q);
      const ProjectionScores s = score(instance, q);
      json doc{{"p", to_std(p)},
               {"certified", certify_in_H(instance, q, p)},
               {"distance_sq", (p - q).squaredNorm()},
               {"delta_score", to_std(s.delta_score)}};
      write_file_atomic(project_out, doc.dump(2) + "\n");
      out << "projection written to " << project_out << "\n";
    } else if (compare->parsed()) {
      out << format_double(adjusted_gap(cmp_base, cmp_a, cmp_b)) << "\n";
    } else if (export_mip->parsed()) {
      const Instance instance = read_instance(mip_instance);
      export_mip_lp(instance, mip_big_m, mip_out);
      out << "wrote " << mip_out << "\n";
    } else if (sweep->parsed()) {
      const Instance instance = read_instance(sweep_instance);
      require_solvable(instance, err);
      std::sort(sweep_k.begin(), sweep_k.end());
      sweep_k.erase(std::unique(sweep_k.begin(), sweep_k.end()), sweep_k.end());
      const double z_base = profit_z(instance, instance.p0());
      std::vector<SweepRow> rows;
      std::optional<Vector> warm;
      for (double frac : sweep_k) {
        const int k = std::clamp(static_cast<int>(std::lround(frac * instance.n())), 1, instance.n());
        const Instance sized = instance.with_k(k);
        std::vector<Vector> extra;
        if (warm) extra.push_back(*warm);
        const MultiStartResult result = multi_start(sized, sweep_opts.params(), extra);
        const SolveReport& best = result.best_report();
        warm = best.final_p;
        rows.push_back({frac, k, best.start_id, best.final_profit, improvement_pct(z_base, best.final_profit),
                        best.stationary});
        out << "k=" << k << " profit " << format_double(best.final_profit) << "\n";
      }
      write_file_atomic(sweep_out, format_sweep(rows));
    } else if (suite->parsed()) {
      const auto entries = benchmark_suite(suite_scale == "desk" ? SuiteScale::Desk : SuiteScale::Full, suite_opts.seed);
      std::vector<ReportRow> rows;
      std::map<std::string, std::string> instances;
      for (const SuiteEntry& e : entries) {
        const Instance instance = generate(e.config);
        require_solvable(instance, err);
        const MultiStartResult result = multi_start(instance, suite_opts.params());
        for (const SolveReport& r : result.reports) {
          rows.push_back(make_row(instance, r, e.id, describe(e.config.delta_mode), describe(e.config.bounds_mode),
                                  suite_opts.timing));
        }
        if (suite_save) instances[e.id] = format_instance(instance);
        out << e.id << ": best profit " << format_double(result.best_report().final_profit) << "\n";
      }
      std::filesystem::create_directories(suite_dir);
      const std::filesystem::path dir(suite_dir);
      write_report(rows, (dir / "suite_report.csv").string(), ReportFormat::Csv);
      for (const auto& [id, text] : instances) write_file_atomic((dir / (id + ".json")).string(), text);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitOk;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace priceopt::cli
