#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pvsizing::lp::detail {

struct ColumnView {
  std::span<const int> index;
  std::span<const double> value;
};

// Sparse LU factorization of a simplex basis with product-form updates.
//
// The factorization is left-looking (Gilbert-Peierls): columns are taken in
// ascending nonzero count and each is reduced by a sparse triangular solve
// whose nonzero pattern comes from a depth-first search over L. Pivot rows are
// chosen by threshold partial pivoting, preferring short rows.
//
// Vectors passed to ftran are indexed by row on input and by basis position
// on output; btran is the reverse.
class BasisFactor {
 public:
  struct Result {
    bool ok = true;
    std::vector<int> singular_positions;
    std::vector<int> unpivoted_rows;
  };

  Result factorize(int m, std::span<const ColumnView> columns);

  // In place: rhs (row space) -> B^{-1} rhs (position space).
  void ftran(std::vector<double>& x) const;
  // In place: rhs (position space) -> B^{-T} rhs (row space).
  void btran(std::vector<double>& x) const;

  // Records the replacement of basis position `pos` by a column whose ftran
  // image is `alpha`.
  void update(int pos, std::span<const double> alpha);

  std::size_t num_updates() const { return eta_pos_.size(); }
  std::size_t factor_nnz() const { return l_val_.size() + u_val_.size() + u_diag_.size(); }
  std::size_t eta_nnz() const { return eta_val_.size() + eta_pivot_.size(); }

 private:
  static constexpr double kPivotThreshold = 0.1;
  static constexpr double kSingularTol = 1e-11;
  static constexpr double kDropTol = 1e-14;

  int m_ = 0;
  std::vector<int> pivot_row_;  // step -> row
  std::vector<int> step_pos_;   // step -> basis position

  std::vector<int> l_start_;
  std::vector<int> l_row_;
  std::vector<double> l_val_;

  std::vector<int> u_start_;
  std::vector<int> u_step_;
  std::vector<double> u_val_;
  std::vector<double> u_diag_;

  std::vector<int> eta_pos_;
  std::vector<double> eta_pivot_;
  std::vector<int> eta_start_{0};
  std::vector<int> eta_idx_;
  std::vector<double> eta_val_;

  mutable std::vector<double> work_;
};

}  // namespace pvsizing::lp::detail
