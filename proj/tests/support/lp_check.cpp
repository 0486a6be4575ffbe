#include "lp_check.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace testing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Token {
  enum Kind { Num, Ident, Op } kind;
  std::string text;
  double value = 0.0;
  int line = 0;
};

const std::string kNameSymbols = "!\"#$%&()/,.;?@_`'{}|~";

bool name_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || kNameSymbols.find(ch) != std::string::npos;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw LpSyntaxError("line " + std::to_string(line) + ": " + what);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void tokenize_line(const std::string& s, int line, std::vector<Token>& out) {
  std::size_t i = 0;
  while (i < s.size()) {
    const char ch = s[i];
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      std::size_t j = i;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
          j = k;
        }
      }
      const std::string text = s.substr(i, j - i);
      char* end = nullptr;
      const double v = std::strtod(text.c_str(), &end);
      if (end != text.c_str() + text.size()) fail(line, "malformed number '" + text + "'");
      if (j < s.size() && name_char(s[j]) && s[j] != '/') fail(line, "number runs into a name at '" + text + "'");
      out.push_back({Token::Num, text, v, line});
      i = j;
      continue;
    }
    if (ch == '<' || ch == '>' || ch == '=') {
      std::string op(1, ch);
      if (i + 1 < s.size() && (s[i + 1] == '=' || s[i + 1] == '<' || s[i + 1] == '>')) op += s[i + 1];
      if (op == "<>" || op == "><" || op == "==" || op == "<<" || op == ">>") fail(line, "bad operator " + op);
      out.push_back({Token::Op, op, 0.0, line});
      i += op.size();
      continue;
    }
    if (std::string("+-*^[]:").find(ch) != std::string::npos) {
      out.push_back({Token::Op, std::string(1, ch), 0.0, line});
      ++i;
      continue;
    }
    if (name_char(ch)) {
      std::size_t j = i;
      while (j < s.size() && name_char(s[j])) ++j;
      const std::string text = s.substr(i, j - i);
      if (text == "/") {
        out.push_back({Token::Op, text, 0.0, line});
      } else {
        if (text.size() > 255) fail(line, "name longer than 255 characters");
        out.push_back({Token::Ident, text, 0.0, line});
      }
      i = j;
      continue;
    }
    fail(line, std::string("unexpected character '") + ch + "'");
  }
}

enum class Section { None, Objective, Constraints, Bounds, Binary, General, End };

Section header_of(const std::string& line, bool& maximize) {
  const std::string l = lower(trim(line));
  if (l == "maximize" || l == "maximum" || l == "max") {
    maximize = true;
    return Section::Objective;
  }
  if (l == "minimize" || l == "minimum" || l == "min") {
    maximize = false;
    return Section::Objective;
  }
  if (l == "subject to" || l == "such that" || l == "st" || l == "s.t.") return Section::Constraints;
  if (l == "bounds" || l == "bound") return Section::Bounds;
  if (l == "binary" || l == "binaries" || l == "bin") return Section::Binary;
  if (l == "general" || l == "generals" || l == "gen") return Section::General;
  if (l == "end") return Section::End;
  return Section::None;
}

class Cursor {
 public:
  Cursor(const std::vector<Token>& t, int last_line) : t_(t), last_line_(last_line) {}
  bool done() const { return pos_ >= t_.size(); }
  const Token& peek(std::size_t ahead = 0) const {
    if (pos_ + ahead >= t_.size()) fail(last_line_, "unexpected end of section");
    return t_[pos_ + ahead];
  }
  bool has(std::size_t ahead) const { return pos_ + ahead < t_.size(); }
  Token next() {
    const Token& tok = peek();
    ++pos_;
    return tok;
  }
  bool is_op(const char* op, std::size_t ahead = 0) const {
    return has(ahead) && t_[pos_ + ahead].kind == Token::Op && t_[pos_ + ahead].text == op;
  }
  void expect_op(const char* op) {
    const Token tok = next();
    if (tok.kind != Token::Op || tok.text != op) fail(tok.line, std::string("expected '") + op + "', got '" + tok.text + "'");
  }
  bool at_sense() const {
    if (!has(0) || t_[pos_].kind != Token::Op) return false;
    const std::string& s = t_[pos_].text;
    return s == "<=" || s == ">=" || s == "=<" || s == "=>" || s == "<" || s == ">" || s == "=";
  }

 private:
  const std::vector<Token>& t_;
  std::size_t pos_ = 0;
  int last_line_;
};

void check_name(const Token& tok) {
  if (tok.kind != Token::Ident) fail(tok.line, "expected a variable name, got '" + tok.text + "'");
  const char first = tok.text[0];
  if (std::isdigit(static_cast<unsigned char>(first)) || first == '.') fail(tok.line, "bad name " + tok.text);
}

// [sign] [number] name ; returns false at a sense operator or end of input.
bool read_linear_term(Cursor& c, bool first, double& coef, std::string& name) {
  double sign = 1.0;
  if (c.is_op("+") || c.is_op("-")) {
    sign = c.next().text == "-" ? -1.0 : 1.0;
  } else if (!first) {
    fail(c.peek().line, "expected '+' or '-' between terms, got '" + c.peek().text + "'");
  }
  double value = 1.0;
  if (c.peek().kind == Token::Num) value = c.next().value;
  const Token tok = c.next();
  check_name(tok);
  coef = sign * value;
  name = tok.text;
  return true;
}

void read_quadratic(Cursor& c, LpModel& m) {
  c.expect_op("[");
  bool first = true;
  while (!c.is_op("]")) {
    double sign = 1.0;
    if (c.is_op("+") || c.is_op("-")) {
      sign = c.next().text == "-" ? -1.0 : 1.0;
    } else if (!first) {
      fail(c.peek().line, "expected '+' or '-' in quadratic part");
    }
    double value = 1.0;
    if (c.peek().kind == Token::Num) value = c.next().value;
    const Token x = c.next();
    check_name(x);
    std::string y;
    if (c.is_op("^")) {
      c.next();
      const Token two = c.next();
      if (two.kind != Token::Num || two.value != 2.0) fail(two.line, "only squares are allowed after '^'");
      y = x.text;
    } else {
      c.expect_op("*");
      const Token t = c.next();
      check_name(t);
      y = t.text;
    }
    m.variables.insert(x.text);
    m.variables.insert(y);
    const auto key = x.text < y ? std::make_pair(x.text, y) : std::make_pair(y, x.text);
    m.quadratic[key] += sign * value;
    first = false;
  }
  c.expect_op("]");
  c.expect_op("/");
  const Token two = c.next();
  if (two.kind != Token::Num || two.value != 2.0) fail(two.line, "quadratic objective part must be divided by 2");
}

double read_bound_value(const std::vector<Token>& t, std::size_t& i, int line) {
  double sign = 1.0;
  if (i < t.size() && t[i].kind == Token::Op && (t[i].text == "+" || t[i].text == "-")) {
    sign = t[i].text == "-" ? -1.0 : 1.0;
    ++i;
  }
  if (i >= t.size()) fail(line, "missing bound value");
  const Token& tok = t[i++];
  if (tok.kind == Token::Num) return sign * tok.value;
  const std::string l = lower(tok.text);
  if (tok.kind == Token::Ident && (l == "inf" || l == "infinity")) return sign * kInf;
  fail(line, "expected a bound value, got '" + tok.text + "'");
}

bool is_sense(const Token& t) {
  return t.kind == Token::Op && (t.text == "<=" || t.text == ">=" || t.text == "=<" || t.text == "=>" ||
                                 t.text == "<" || t.text == ">" || t.text == "=");
}

std::string norm_sense(const std::string& s) {
  if (s == "<=" || s == "=<" || s == "<") return "<=";
  if (s == ">=" || s == "=>" || s == ">") return ">=";
  return "=";
}

void parse_bound_line(const std::vector<Token>& t, int line, LpModel& m) {
  auto bound_of = [&](const std::string& name) -> std::pair<double, double>& {
    auto it = m.bounds.find(name);
    if (it == m.bounds.end()) it = m.bounds.emplace(name, std::make_pair(0.0, kInf)).first;
    return it->second;
  };
  if (t.size() == 2 && t[0].kind == Token::Ident && t[1].kind == Token::Ident && lower(t[1].text) == "free") {
    check_name(t[0]);
    bound_of(t[0].text) = {-kInf, kInf};
    return;
  }
  std::size_t i = 0;
  if (t[0].kind == Token::Ident && lower(t[0].text) != "inf" && lower(t[0].text) != "infinity") {
    // name sense value
    check_name(t[0]);
    i = 1;
    if (i >= t.size() || !is_sense(t[i])) fail(line, "expected a relation after the bounded name");
    const std::string sense = norm_sense(t[i++].text);
    const double v = read_bound_value(t, i, line);
    if (i != t.size()) fail(line, "trailing tokens in bound");
    auto& b = bound_of(t[0].text);
    if (sense == "<=") b.second = v;
    else if (sense == ">=") b.first = v;
    else b = {v, v};
    return;
  }
  // value sense name [sense value]
  const double lo = read_bound_value(t, i, line);
  if (i >= t.size() || !is_sense(t[i])) fail(line, "expected a relation in bound");
  const std::string s1 = norm_sense(t[i++].text);
  if (i >= t.size()) fail(line, "missing name in bound");
  check_name(t[i]);
  const std::string name = t[i++].text;
  auto& b = bound_of(name);
  if (s1 == "<=") b.first = lo;
  else if (s1 == ">=") b.second = lo;
  else b = {lo, lo};
  if (i == t.size()) return;
  if (!is_sense(t[i])) fail(line, "expected a relation in bound");
  const std::string s2 = norm_sense(t[i++].text);
  const double hi = read_bound_value(t, i, line);
  if (i != t.size() || s2 != s1 || s1 == "=") fail(line, "malformed double-sided bound");
  if (s2 == "<=") b.second = hi;
  else b.first = hi;
}

}  // namespace

LpModel parse_lp(const std::string& text) {
  LpModel m;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  Section current = Section::None;
  std::vector<int> order;
  std::map<Section, std::vector<Token>> body;
  std::vector<std::pair<int, std::vector<Token>>> bound_lines;
  int last_line = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    last_line = line_no;
    if (raw.size() > 510) fail(line_no, "line longer than 510 characters");
    const auto bs = raw.find('\\');
    const std::string line = bs == std::string::npos ? raw : raw.substr(0, bs);
    if (trim(line).empty()) continue;
    if (current == Section::End) fail(line_no, "content after End");
    bool maximize = m.maximize;
    const Section h = header_of(line, maximize);
    if (h != Section::None) {
      const int rank = static_cast<int>(h);
      if (h == Section::Objective) m.maximize = maximize;
      if (order.empty() && h != Section::Objective) fail(line_no, "the objective section must come first");
      if (!order.empty() && rank <= order.back() && !(h == Section::General || h == Section::Binary)) {
        fail(line_no, "section out of order");
      }
      if (std::find(order.begin(), order.end(), rank) != order.end()) fail(line_no, "repeated section");
      order.push_back(rank);
      current = h;
      continue;
    }
    if (current == Section::None) fail(line_no, "content before the objective section");
    std::vector<Token> toks;
    tokenize_line(line, line_no, toks);
    if (current == Section::Bounds) {
      bound_lines.emplace_back(line_no, toks);
    } else {
      auto& b = body[current];
      b.insert(b.end(), toks.begin(), toks.end());
    }
  }
  if (current != Section::End) fail(last_line, "missing End");
  if (std::find(order.begin(), order.end(), static_cast<int>(Section::Constraints)) == order.end()) {
    fail(last_line, "missing Subject To section");
  }

  {
    Cursor c(body[Section::Objective], last_line);
    if (c.has(1) && c.peek().kind == Token::Ident && c.is_op(":", 1)) {
      c.next();
      c.next();
    }
    bool first = true;
    while (!c.done()) {
      if (c.is_op("[") || ((c.is_op("+") || c.is_op("-")) && c.is_op("[", 1))) {
        if (c.is_op("-")) fail(c.peek().line, "quadratic bracket must be added, not subtracted");
        if (c.is_op("+")) c.next();
        else if (!first) fail(c.peek().line, "expected '+' before the quadratic part");
        read_quadratic(c, m);
      } else {
        double coef;
        std::string name;
        read_linear_term(c, first, coef, name);
        m.objective[name] += coef;
        m.variables.insert(name);
      }
      first = false;
    }
    if (first) fail(last_line, "empty objective");
  }

  {
    Cursor c(body[Section::Constraints], last_line);
    std::set<std::string> names;
    while (!c.done()) {
      LpModel::Row row;
      if (c.has(1) && c.peek().kind == Token::Ident && c.is_op(":", 1)) {
        row.name = c.next().text;
        c.next();
        if (!names.insert(row.name).second) fail(c.peek().line, "duplicate row name " + row.name);
      }
      bool first = true;
      while (!c.at_sense()) {
        double coef;
        std::string name;
        read_linear_term(c, first, coef, name);
        row.terms[name] += coef;
        m.variables.insert(name);
        first = false;
      }
      if (first) fail(c.peek().line, "constraint without terms");
      row.sense = norm_sense(c.next().text);
      double sign = 1.0;
      if (c.is_op("+") || c.is_op("-")) sign = c.next().text == "-" ? -1.0 : 1.0;
      const Token rhs = c.next();
      if (rhs.kind != Token::Num) fail(rhs.line, "right-hand side must be a number");
      row.rhs = sign * rhs.value;
      m.rows.push_back(std::move(row));
    }
  }

  for (const auto& [line, toks] : bound_lines) parse_bound_line(toks, line, m);

  for (Section s : {Section::Binary, Section::General}) {
    for (const Token& tok : body[s]) {
      check_name(tok);
      if (!m.variables.count(tok.text)) fail(tok.line, "integer variable " + tok.text + " is not used");
      (s == Section::Binary ? m.binaries : m.generals).insert(tok.text);
    }
  }
  for (const auto& [name, b] : m.bounds) {
    if (!m.variables.count(name)) throw LpSyntaxError("bound on unused variable " + name);
    if (b.first > b.second) throw LpSyntaxError("empty bound interval for " + name);
  }
  return m;
}

double lp_objective(const LpModel& model, const std::map<std::string, double>& x) {
  auto val = [&](const std::string& name) {
    const auto it = x.find(name);
    return it == x.end() ? 0.0 : it->second;
  };
  double lin = 0.0;
  for (const auto& [name, coef] : model.objective) lin += coef * val(name);
  double quad = 0.0;
  for (const auto& [key, coef] : model.quadratic) quad += coef * val(key.first) * val(key.second);
  return lin + quad / 2.0;
}

double lp_max_violation(const LpModel& model, const std::map<std::string, double>& x) {
  auto val = [&](const std::string& name) {
    const auto it = x.find(name);
    return it == x.end() ? 0.0 : it->second;
  };
  double worst = 0.0;
  for (const LpModel::Row& row : model.rows) {
    double lhs = 0.0;
    for (const auto& [name, coef] : row.terms) lhs += coef * val(name);
    double v = 0.0;
    if (row.sense == "<=") v = lhs - row.rhs;
    else if (row.sense == ">=") v = row.rhs - lhs;
    else v = std::abs(lhs - row.rhs);
    worst = std::max(worst, v);
  }
  for (const std::string& name : model.variables) {
    double lo = 0.0, hi = kInf;
    if (const auto it = model.bounds.find(name); it != model.bounds.end()) std::tie(lo, hi) = it->second;
    if (model.binaries.count(name)) {
      lo = std::max(lo, 0.0);
      hi = std::min(hi, 1.0);
    }
    const double v = val(name);
    worst = std::max({worst, lo - v, v - hi});
    if (model.binaries.count(name) || model.generals.count(name)) worst = std::max(worst, std::abs(v - std::round(v)));
  }
  return worst;
}

}  // namespace testing
