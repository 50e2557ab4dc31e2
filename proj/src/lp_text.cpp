#include "pvsizing/lp_text.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace pvsizing::lp {

namespace {

constexpr std::size_t kTermsPerLine = 6;

std::string number(double v) {
  if (v == kInf) return "+inf";
  if (v == -kInf) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_terms(std::ostream& out, std::span<const std::size_t> cols, std::span<const double> vals,
                 const std::vector<std::string>& names) {
  for (std::size_t p = 0; p < cols.size(); ++p) {
    if (p > 0 && p % kTermsPerLine == 0) out << "\n   ";
    out << (vals[p] < 0.0 ? " - " : " + ") << number(std::abs(vals[p])) << ' ' << names[cols[p]];
  }
}

void write_rows(std::ostream& out, const SparseMatrix& a, const std::vector<double>& b,
                const std::vector<std::string>& row_names, const char* prefix, const char* sense,
                const std::vector<std::string>& names) {
  for (std::size_t r = 0; r < b.size(); ++r) {
    const std::string name = r < row_names.size() ? row_names[r] : prefix + std::to_string(r + 1);
    out << ' ' << name << ':';
    if (a.row_cols(r).empty()) out << " 0 " << names.front();
    write_terms(out, a.row_cols(r), a.row_values(r), names);
    out << ' ' << sense << ' ' << number(b[r]) << '\n';
  }
}

}  // namespace

void write_lp_text(std::ostream& out, const StandardFormLP& lp, const std::vector<std::string>& names) {
  lp.validate();
  if (names.size() != lp.num_vars()) throw InvalidState("write_lp_text: one name per variable is required");
  if (names.empty()) throw InvalidState("write_lp_text: LP has no variables");
  out << "Minimize\n obj:";
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (lp.cost[j] != 0.0) {
      cols.push_back(j);
      vals.push_back(lp.cost[j]);
    }
  }
  if (cols.empty()) out << " 0 " << names.front();
  write_terms(out, cols, vals, names);
  out << "\nSubject To\n";
  write_rows(out, lp.a_eq, lp.b_eq, lp.eq_names, "e", "=", names);
  write_rows(out, lp.a_ub, lp.b_ub, lp.ub_names, "u", "<=", names);
  out << "Bounds\n";
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (lp.lower[j] == -kInf && lp.upper[j] == kInf) {
      out << ' ' << names[j] << " free\n";
    } else {
      out << ' ' << number(lp.lower[j]) << " <= " << names[j] << " <= " << number(lp.upper[j]) << '\n';
    }
  }
  out << "End\n";
}

void export_lp_text(const StandardFormLP& lp, const VariableMap& map, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_lp_text(out, lp, map.names());
  out.flush();
  if (!out) throw Error("cannot write " + path.string());
}

namespace {

struct Token {
  std::string text;
  std::size_t line;
};

bool parse_value(const std::string& s, double& v) {
  if (s == "+inf" || s == "inf" || s == "+infinity" || s == "infinity") {
    v = kInf;
    return true;
  }
  if (s == "-inf" || s == "-infinity") {
    v = -kInf;
    return true;
  }
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return !s.empty() && end == s.c_str() + s.size() && std::isfinite(v);
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw DataError("LP text line " + std::to_string(line) + ": " + what, line);
}

struct LinearExpr {
  std::vector<std::pair<std::string, double>> terms;
};

// Parses "[+|-] [coef] name ..." up to the first relational operator or end.
std::size_t parse_expr(const std::vector<Token>& t, std::size_t i, LinearExpr& e) {
  while (i < t.size()) {
    const std::string& s = t[i].text;
    if (s == "=" || s == "<=" || s == ">=" || s == "=<" || s == "=>") break;
    double sign = 1.0;
    if (s == "+" || s == "-") {
      sign = s == "-" ? -1.0 : 1.0;
      if (++i >= t.size()) fail(t.back().line, "dangling sign");
    }
    double coef = 1.0;
    double v = 0.0;
    if (parse_value(t[i].text, v)) {
      coef = v;
      if (++i >= t.size()) fail(t.back().line, "coefficient without a variable");
    }
    const std::string& name = t[i].text;
    double dummy = 0.0;
    if (name == "+" || name == "-" || parse_value(name, dummy)) fail(t[i].line, "expected a variable name");
    e.terms.emplace_back(name, sign * coef);
    ++i;
  }
  return i;
}

}  // namespace

ParsedLP read_lp_text(std::istream& in) {
  enum class Section { None, Objective, Constraints, Bounds, End };
  Section section = Section::None;
  std::vector<std::vector<Token>> objective_and_rows;  // statements, first is the objective
  std::vector<std::vector<Token>> bounds;
  std::string line;
  std::size_t line_no = 0;
  bool seen_end = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (const auto cut = line.find('\\'); cut != std::string::npos) line.erase(cut);
    std::istringstream ls(line);
    std::vector<Token> toks;
    std::string w;
    while (ls >> w) toks.push_back({w, line_no});
    if (toks.empty()) continue;

    std::string lower;
    for (const auto& tk : toks) lower += (lower.empty() ? "" : " ") + tk.text;
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower == "minimize" || lower == "minimise" || lower == "min") {
      section = Section::Objective;
      continue;
    }
    if (lower == "maximize" || lower == "maximise" || lower == "max") fail(line_no, "only minimization is supported");
    if (lower == "subject to" || lower == "such that" || lower == "st" || lower == "s.t.") {
      section = Section::Constraints;
      continue;
    }
    if (lower == "bounds" || lower == "bound") {
      section = Section::Bounds;
      continue;
    }
    if (lower == "end") {
      section = Section::End;
      seen_end = true;
      continue;
    }

    switch (section) {
      case Section::Objective:
      case Section::Constraints: {
        // A labelled statement starts a new row; other lines continue the last one.
        const bool labelled = toks.front().text.back() == ':' || toks.front().text.find(':') != std::string::npos;
        const bool starts_row = section == Section::Constraints ? labelled : objective_and_rows.empty();
        if (starts_row || objective_and_rows.empty()) {
          objective_and_rows.emplace_back();
        }
        auto& stmt = objective_and_rows.back();
        for (const auto& tk : toks) {
          // Split "name:" / "name:expr" and glued operators.
          const std::string& s = tk.text;
          const auto colon = s.find(':');
          if (colon != std::string::npos) {
            stmt.push_back({s.substr(0, colon + 1), tk.line});
            if (colon + 1 < s.size()) stmt.push_back({s.substr(colon + 1), tk.line});
          } else {
            stmt.push_back(tk);
          }
        }
        break;
      }
      case Section::Bounds:
        bounds.push_back(std::move(toks));
        break;
      case Section::None:
        fail(line_no, "content before the objective section");
      case Section::End:
        fail(line_no, "content after End");
    }
  }
  if (!seen_end) fail(line_no, "missing End");
  if (objective_and_rows.empty()) fail(line_no, "missing objective");

  ParsedLP out;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<double> lower;
  std::vector<double> upper;
  for (const auto& b : bounds) {
    std::string name;
    double lo = 0.0;
    double up = kInf;
    if (b.size() == 2 && (b[1].text == "free" || b[1].text == "Free" || b[1].text == "FREE")) {
      name = b[0].text;
      lo = -kInf;
    } else if (b.size() == 5 && b[1].text == "<=" && b[3].text == "<=") {
      name = b[2].text;
      if (!parse_value(b[0].text, lo) || !parse_value(b[4].text, up)) fail(b[0].line, "malformed bound values");
    } else if (b.size() == 3 && (b[1].text == ">=" || b[1].text == "<=")) {
      name = b[0].text;
      double v = 0.0;
      if (!parse_value(b[2].text, v)) fail(b[0].line, "malformed bound value");
      (b[1].text == ">=" ? lo : up) = v;
    } else {
      fail(b.front().line, "unsupported bound statement");
    }
    if (index.count(name)) fail(b.front().line, "variable '" + name + "' bounded twice");
    index.emplace(name, out.var_names.size());
    out.var_names.push_back(name);
    lower.push_back(lo);
    upper.push_back(up);
  }

  const auto column = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) {
      // Unlisted variables take the default bounds [0, +inf).
      it = index.emplace(name, out.var_names.size()).first;
      out.var_names.push_back(name);
      lower.push_back(0.0);
      upper.push_back(kInf);
    }
    return it->second;
  };

  // Resolve columns for every statement first so the column count is final.
  struct Parsed {
    std::string name;
    LinearExpr expr;
    std::string sense;
    double rhs = 0.0;
    std::size_t line = 0;
  };
  std::vector<Parsed> parsed;
  for (std::size_t s = 0; s < objective_and_rows.size(); ++s) {
    const auto& t = objective_and_rows[s];
    Parsed p;
    p.line = t.front().line;
    std::size_t i = 0;
    if (t[0].text.back() == ':') {
      p.name = t[0].text.substr(0, t[0].text.size() - 1);
      i = 1;
    }
    i = parse_expr(t, i, p.expr);
    if (s == 0) {
      if (i != t.size()) fail(p.line, "relational operator in the objective");
    } else {
      if (i + 2 != t.size()) fail(p.line, "expected 'expr <=|>=|= rhs'");
      p.sense = t[i].text;
      if (!parse_value(t[i + 1].text, p.rhs)) fail(p.line, "malformed right-hand side");
    }
    for (const auto& [name, coef] : p.expr.terms) column(name);
    parsed.push_back(std::move(p));
  }

  const std::size_t n = out.var_names.size();
  auto& lp = out.lp;
  lp.cost.assign(n, 0.0);
  lp.lower = lower;
  lp.upper = upper;
  lp.a_eq = SparseMatrix(n);
  lp.a_ub = SparseMatrix(n);
  for (const auto& [name, coef] : parsed[0].expr.terms) lp.cost[index.at(name)] += coef;
  for (std::size_t s = 1; s < parsed.size(); ++s) {
    const auto& p = parsed[s];
    std::vector<Entry> row;
    const double sign = (p.sense == ">=" || p.sense == "=>") ? -1.0 : 1.0;
    for (const auto& [name, coef] : p.expr.terms) row.push_back({index.at(name), sign * coef});
    const std::string name = p.name.empty() ? "r" + std::to_string(s) : p.name;
    if (p.sense == "=") {
      lp.a_eq.append_row(std::move(row));
      lp.b_eq.push_back(p.rhs);
      lp.eq_names.push_back(name);
    } else {
      lp.a_ub.append_row(std::move(row));
      lp.b_ub.push_back(sign * p.rhs);
      lp.ub_names.push_back(name);
    }
  }
  lp.validate();
  return out;
}

ParsedLP read_lp_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_lp_text(in);
}

}  // namespace pvsizing::lp
