#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pvsizing::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Entry {
  std::size_t col;
  double value;
};

// Row-compressed sparse matrix. Rows are appended one at a time; columns
// within a row are kept sorted and unique.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  explicit SparseMatrix(std::size_t num_cols) : num_cols_(num_cols) {}

  std::size_t rows() const { return row_start_.size() - 1; }
  std::size_t cols() const { return num_cols_; }
  std::size_t nnz() const { return col_index_.size(); }

  // Sorts by column, sums duplicate columns and drops exact zeros.
  void append_row(std::vector<Entry> entries);
  // Appends a row verbatim (caller guarantees ordering); used by readers.
  void append_raw(std::span<const std::size_t> cols, std::span<const double> values);

  std::span<const std::size_t> row_cols(std::size_t r) const {
    return {col_index_.data() + row_start_[r], row_start_[r + 1] - row_start_[r]};
  }
  std::span<const double> row_values(std::size_t r) const {
    return {value_.data() + row_start_[r], row_start_[r + 1] - row_start_[r]};
  }

  double row_dot(std::size_t r, std::span<const double> x) const;
  // Coefficient at (r, c), 0 when structurally absent.
  double at(std::size_t r, std::size_t c) const;

  const std::vector<std::size_t>& row_start() const { return row_start_; }
  const std::vector<std::size_t>& col_index() const { return col_index_; }
  const std::vector<double>& values() const { return value_; }

  bool operator==(const SparseMatrix&) const = default;

 private:
  std::size_t num_cols_ = 0;
  std::vector<std::size_t> row_start_{0};
  std::vector<std::size_t> col_index_;
  std::vector<double> value_;
};

// minimize c'z  s.t.  A_eq z = b_eq,  A_ub z <= b_ub,  lower <= z <= upper.
struct StandardFormLP {
  std::vector<double> cost;
  SparseMatrix a_eq;
  std::vector<double> b_eq;
  SparseMatrix a_ub;
  std::vector<double> b_ub;
  std::vector<double> lower;
  std::vector<double> upper;
  // Optional row labels, used by the text exporter.
  std::vector<std::string> eq_names;
  std::vector<std::string> ub_names;

  std::size_t num_vars() const { return cost.size(); }
  std::size_t num_eq() const { return b_eq.size(); }
  std::size_t num_ub() const { return b_ub.size(); }

  // Throws InvalidState on non-finite coefficients, size mismatches,
  // out-of-range indices, duplicate entries or crossed bounds.
  void validate() const;

  double objective(std::span<const double> z) const;
  // Largest violation over rows and bounds; 0 for a feasible point.
  double max_violation(std::span<const double> z) const;

  bool operator==(const StandardFormLP&) const = default;
};

}  // namespace pvsizing::lp
