#include "basis_factor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pvsizing::lp::detail {

BasisFactor::Result BasisFactor::factorize(int m, std::span<const ColumnView> columns) {
  m_ = m;
  pivot_row_.clear();
  step_pos_.clear();
  l_start_.assign(1, 0);
  l_row_.clear();
  l_val_.clear();
  u_start_.assign(1, 0);
  u_step_.clear();
  u_val_.clear();
  u_diag_.clear();
  eta_pos_.clear();
  eta_pivot_.clear();
  eta_start_.assign(1, 0);
  eta_idx_.clear();
  eta_val_.clear();
  work_.assign(static_cast<std::size_t>(m), 0.0);

  std::vector<int> row_count(m, 0);
  for (const auto& c : columns) {
    for (int i : c.index) ++row_count[i];
  }
  std::vector<int> order(columns.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return columns[a].index.size() < columns[b].index.size();
  });

  std::vector<int> row_step(m, -1);
  std::vector<int> row_mark(m, -1);
  std::vector<int> step_mark(m, -1);
  std::vector<double> x(m, 0.0);
  std::vector<int> touched;
  std::vector<int> topo;
  std::vector<int> stack_step;
  std::vector<int> stack_ptr;
  std::vector<int> candidates;

  Result result;
  int step = 0;
  for (int stamp = 0; stamp < static_cast<int>(order.size()); ++stamp) {
    const int pos = order[stamp];
    const ColumnView& col = columns[pos];
    touched.clear();
    topo.clear();

    for (std::size_t k = 0; k < col.index.size(); ++k) {
      const int i = col.index[k];
      if (row_mark[i] != stamp) {
        row_mark[i] = stamp;
        x[i] = 0.0;
        touched.push_back(i);
      }
      x[i] += col.value[k];
    }

    // Reach of the column's pivoted rows through the graph of L.
    for (int i : col.index) {
      const int s0 = row_step[i];
      if (s0 < 0 || step_mark[s0] == stamp) continue;
      step_mark[s0] = stamp;
      stack_step.push_back(s0);
      stack_ptr.push_back(l_start_[s0]);
      while (!stack_step.empty()) {
        const int s = stack_step.back();
        int p = stack_ptr.back();
        const int end = l_start_[s + 1];
        bool descended = false;
        while (p < end) {
          const int s2 = row_step[l_row_[p++]];
          if (s2 >= 0 && step_mark[s2] != stamp) {
            stack_ptr.back() = p;
            step_mark[s2] = stamp;
            stack_step.push_back(s2);
            stack_ptr.push_back(l_start_[s2]);
            descended = true;
            break;
          }
        }
        if (!descended) {
          topo.push_back(s);
          stack_step.pop_back();
          stack_ptr.pop_back();
        }
      }
    }

    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
      const int s = *it;
      const double v = x[pivot_row_[s]];
      if (v == 0.0) continue;
      for (int p = l_start_[s]; p < l_start_[s + 1]; ++p) {
        const int i = l_row_[p];
        if (row_mark[i] != stamp) {
          row_mark[i] = stamp;
          x[i] = 0.0;
          touched.push_back(i);
        }
        x[i] -= l_val_[p] * v;
      }
    }

    candidates.clear();
    double max_abs = 0.0;
    for (int i : touched) {
      if (row_step[i] >= 0) continue;
      candidates.push_back(i);
      max_abs = std::max(max_abs, std::abs(x[i]));
    }
    if (max_abs < kSingularTol) {
      result.ok = false;
      result.singular_positions.push_back(pos);
      for (int i : touched) x[i] = 0.0;
      continue;
    }

    int pivot = -1;
    for (int i : candidates) {
      const double a = std::abs(x[i]);
      if (a < kPivotThreshold * max_abs) continue;
      if (pivot < 0 || row_count[i] < row_count[pivot] ||
          (row_count[i] == row_count[pivot] && a > std::abs(x[pivot]))) {
        pivot = i;
      }
    }

    for (int s : topo) {
      const double v = x[pivot_row_[s]];
      if (std::abs(v) > kDropTol) {
        u_step_.push_back(s);
        u_val_.push_back(v);
      }
    }
    u_start_.push_back(static_cast<int>(u_step_.size()));
    const double diag = x[pivot];
    u_diag_.push_back(diag);
    for (int i : candidates) {
      if (i == pivot) continue;
      const double l = x[i] / diag;
      if (std::abs(l) > kDropTol) {
        l_row_.push_back(i);
        l_val_.push_back(l);
      }
    }
    l_start_.push_back(static_cast<int>(l_row_.size()));
    pivot_row_.push_back(pivot);
    step_pos_.push_back(pos);
    row_step[pivot] = step++;
    for (int i : touched) x[i] = 0.0;
  }

  if (!result.ok) {
    for (int i = 0; i < m; ++i) {
      if (row_step[i] < 0) result.unpivoted_rows.push_back(i);
    }
  }
  return result;
}

void BasisFactor::ftran(std::vector<double>& x) const {
  for (int t = 0; t < m_; ++t) {
    const double v = x[pivot_row_[t]];
    if (v == 0.0) continue;
    for (int p = l_start_[t]; p < l_start_[t + 1]; ++p) x[l_row_[p]] -= l_val_[p] * v;
  }
  for (int t = m_ - 1; t >= 0; --t) {
    const int r = pivot_row_[t];
    double v = x[r];
    if (v == 0.0) {
      work_[step_pos_[t]] = 0.0;
      continue;
    }
    v /= u_diag_[t];
    work_[step_pos_[t]] = v;
    for (int p = u_start_[t]; p < u_start_[t + 1]; ++p) x[pivot_row_[u_step_[p]]] -= u_val_[p] * v;
  }
  x.swap(work_);
  for (std::size_t e = 0; e < eta_pos_.size(); ++e) {
    const int r = eta_pos_[e];
    if (x[r] == 0.0) continue;
    const double v = x[r] / eta_pivot_[e];
    x[r] = v;
    for (int p = eta_start_[e]; p < eta_start_[e + 1]; ++p) x[eta_idx_[p]] -= eta_val_[p] * v;
  }
}

void BasisFactor::btran(std::vector<double>& x) const {
  for (std::size_t e = eta_pos_.size(); e-- > 0;) {
    const int r = eta_pos_[e];
    double acc = x[r];
    for (int p = eta_start_[e]; p < eta_start_[e + 1]; ++p) acc -= eta_val_[p] * x[eta_idx_[p]];
    x[r] = acc / eta_pivot_[e];
  }
  for (int t = 0; t < m_; ++t) {
    double acc = x[step_pos_[t]];
    for (int p = u_start_[t]; p < u_start_[t + 1]; ++p) acc -= u_val_[p] * work_[u_step_[p]];
    work_[t] = acc / u_diag_[t];
  }
  for (int t = m_ - 1; t >= 0; --t) {
    double acc = work_[t];
    for (int p = l_start_[t]; p < l_start_[t + 1]; ++p) acc -= l_val_[p] * x[l_row_[p]];
    x[pivot_row_[t]] = acc;
  }
}

void BasisFactor::update(int pos, std::span<const double> alpha) {
  eta_pos_.push_back(pos);
  eta_pivot_.push_back(alpha[pos]);
  for (int i = 0; i < m_; ++i) {
    if (i == pos) continue;
    if (std::abs(alpha[i]) > kDropTol) {
      eta_idx_.push_back(i);
      eta_val_.push_back(alpha[i]);
    }
  }
  eta_start_.push_back(static_cast<int>(eta_idx_.size()));
}

}  // namespace pvsizing::lp::detail
