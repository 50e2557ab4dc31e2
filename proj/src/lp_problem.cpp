#include "pvsizing/lp_problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pvsizing/model.hpp"

namespace pvsizing::lp {

void SparseMatrix::append_row(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.col < b.col; });
  std::size_t i = 0;
  while (i < entries.size()) {
    std::size_t c = entries[i].col;
    double sum = 0.0;
    for (; i < entries.size() && entries[i].col == c; ++i) sum += entries[i].value;
    if (sum != 0.0) {
      col_index_.push_back(c);
      value_.push_back(sum);
    }
  }
  row_start_.push_back(col_index_.size());
}

void SparseMatrix::append_raw(std::span<const std::size_t> cols, std::span<const double> values) {
  col_index_.insert(col_index_.end(), cols.begin(), cols.end());
  value_.insert(value_.end(), values.begin(), values.end());
  row_start_.push_back(col_index_.size());
}

double SparseMatrix::row_dot(std::size_t r, std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t p = row_start_[r]; p < row_start_[r + 1]; ++p) s += value_[p] * x[col_index_[p]];
  return s;
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  auto cols = row_cols(r);
  auto it = std::lower_bound(cols.begin(), cols.end(), c);
  if (it == cols.end() || *it != c) return 0.0;
  return row_values(r)[static_cast<std::size_t>(it - cols.begin())];
}

namespace {

void check_matrix(const SparseMatrix& a, std::size_t rows, std::size_t cols, const char* name) {
  if (a.rows() != rows) {
    std::ostringstream os;
    os << "LP: " << name << " has " << a.rows() << " rows, rhs has " << rows;
    throw InvalidState(os.str());
  }
  if (a.rows() > 0 && a.cols() != cols) throw InvalidState(std::string("LP: column count mismatch in ") + name);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto cs = a.row_cols(r);
    auto vs = a.row_values(r);
    for (std::size_t p = 0; p < cs.size(); ++p) {
      if (cs[p] >= cols) throw InvalidState(std::string("LP: column index out of range in ") + name);
      if (p > 0 && cs[p] <= cs[p - 1]) {
        throw InvalidState(std::string("LP: duplicate or unsorted entry in ") + name);
      }
      if (!std::isfinite(vs[p])) throw InvalidState(std::string("LP: non-finite coefficient in ") + name);
    }
  }
}

}  // namespace

void StandardFormLP::validate() const {
  const std::size_t n = cost.size();
  if (lower.size() != n || upper.size() != n) throw InvalidState("LP: bound vectors must match cost length");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(cost[j])) throw InvalidState("LP: non-finite objective coefficient");
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j] || lower[j] == kInf ||
        upper[j] == -kInf) {
      throw InvalidState("LP: invalid bounds on variable " + std::to_string(j));
    }
  }
  check_matrix(a_eq, b_eq.size(), n, "A_eq");
  check_matrix(a_ub, b_ub.size(), n, "A_ub");
  for (double b : b_eq) {
    if (!std::isfinite(b)) throw InvalidState("LP: non-finite b_eq");
  }
  for (double b : b_ub) {
    if (!std::isfinite(b)) throw InvalidState("LP: non-finite b_ub");
  }
  if (!eq_names.empty() && eq_names.size() != b_eq.size()) throw InvalidState("LP: eq_names size mismatch");
  if (!ub_names.empty() && ub_names.size() != b_ub.size()) throw InvalidState("LP: ub_names size mismatch");
}

double StandardFormLP::objective(std::span<const double> z) const {
  double s = 0.0;
  for (std::size_t j = 0; j < cost.size(); ++j) s += cost[j] * z[j];
  return s;
}

double StandardFormLP::max_violation(std::span<const double> z) const {
  double worst = 0.0;
  for (std::size_t r = 0; r < b_eq.size(); ++r) worst = std::max(worst, std::abs(a_eq.row_dot(r, z) - b_eq[r]));
  for (std::size_t r = 0; r < b_ub.size(); ++r) worst = std::max(worst, a_ub.row_dot(r, z) - b_ub[r]);
  for (std::size_t j = 0; j < cost.size(); ++j) {
    worst = std::max(worst, lower[j] - z[j]);
    worst = std::max(worst, z[j] - upper[j]);
  }
  return worst;
}

}  // namespace pvsizing::lp
