#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace testing {

/// Parsed form of an LP file in the CPLEX LP syntax subset used for MIQPs:
/// objective with an optional bracketed quadratic part over 2, constraint
/// rows with a constant right-hand side, Bounds, Binary/General sections, End.
struct LpModel {
  bool maximize = true;
  std::map<std::string, double> objective;
  std::map<std::pair<std::string, std::string>, double> quadratic;  // inside [ ] before the / 2
  struct Row {
    std::string name;
    std::map<std::string, double> terms;
    std::string sense;  // "<=", ">=", "="
    double rhs = 0.0;
  };
  std::vector<Row> rows;
  std::map<std::string, std::pair<double, double>> bounds;  // explicit bounds only
  std::set<std::string> binaries;
  std::set<std::string> generals;
  std::set<std::string> variables;  // every name referenced in objective or rows
};

class LpSyntaxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checks the grammar and returns the model. Throws LpSyntaxError naming the line.
LpModel parse_lp(const std::string& text);

/// Objective value: linear part plus the quadratic bracket divided by 2.
double lp_objective(const LpModel& model, const std::map<std::string, double>& x);

/// Largest violation over rows, bounds (default lower bound 0) and binaries.
double lp_max_violation(const LpModel& model, const std::map<std::string, double>& x);

}  // namespace testing
