#include "pvsizing/simplex.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "basis_factor.hpp"

namespace pvsizing::lp {

void SolverConfig::validate() const {
  if (!(feasibility_tol > 0.0) || !(optimality_tol > 0.0)) {
    throw ConfigError("solver tolerances must be positive");
  }
  if (refactor_interval < 1) throw ConfigError("refactor_interval must be at least 1");
}

namespace {

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, Free, Fixed };

constexpr double kPivotTol = 1e-9;
constexpr double kDegenerateStep = 1e-12;
constexpr int kMaxSingularRepairs = 20;
constexpr std::size_t kDriftCheckPeriod = 10;
constexpr double kDriftTol = 1e-9;
constexpr std::size_t kEtaFillRatio = 4;

class PrimalSimplex {
 public:
  PrimalSimplex(const StandardFormLP& lp, const SolverConfig& cfg) : lp_(lp), cfg_(cfg) {}

  SolveOutcome run();

 private:
  enum class Step { Pivot, Flip, Unbounded, Stalled };

  void build();
  void crash();
  void refactor();
  void compute_primal();
  void compute_duals(bool phase1);
  bool primal_feasible() const;
  double infeasibility_sum() const;
  int choose_entering(bool bland) const;
  void load_column(int j, std::vector<double>& dense) const;
  Step ratio_test(int q, int dir, bool phase1, bool bland, int& leave_pos, double& theta,
                  bool& leave_at_upper);
  double row_residual() const;
  void make_nonbasic_at_nearest_bound(int j);

  bool is_free_range(int j) const { return lo_[j] == -kInf && up_[j] == kInf; }

  const StandardFormLP& lp_;
  SolverConfig cfg_;

  int n_ = 0;
  int m_ = 0;
  int m_eq_ = 0;

  std::vector<int> col_start_;
  std::vector<int> col_row_;
  std::vector<double> col_val_;
  std::vector<int> unit_index_;
  std::vector<double> unit_value_;

  std::vector<double> lo_;
  std::vector<double> up_;
  std::vector<double> cost_;
  std::vector<double> x_;
  std::vector<VarState> state_;
  std::vector<int> head_;

  std::vector<double> y_;
  std::vector<double> d_;
  std::vector<double> alpha_;

  detail::BasisFactor factor_;
  std::size_t refactorizations_ = 0;
};

void PrimalSimplex::build() {
  n_ = static_cast<int>(lp_.num_vars());
  m_eq_ = static_cast<int>(lp_.num_eq());
  m_ = m_eq_ + static_cast<int>(lp_.num_ub());

  std::vector<int> count(n_ + 1, 0);
  for (std::size_t c : lp_.a_eq.col_index()) ++count[c + 1];
  for (std::size_t c : lp_.a_ub.col_index()) ++count[c + 1];
  col_start_.assign(n_ + 1, 0);
  for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + count[j + 1];
  col_row_.assign(col_start_[n_], 0);
  col_val_.assign(col_start_[n_], 0.0);
  std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
  auto scatter = [&](const SparseMatrix& a, int row_offset) {
    for (std::size_t r = 0; r < a.rows(); ++r) {
      auto cs = a.row_cols(r);
      auto vs = a.row_values(r);
      for (std::size_t p = 0; p < cs.size(); ++p) {
        const int at = fill[cs[p]]++;
        col_row_[at] = static_cast<int>(r) + row_offset;
        col_val_[at] = vs[p];
      }
    }
  };
  scatter(lp_.a_eq, 0);
  scatter(lp_.a_ub, m_eq_);

  unit_index_.resize(m_);
  std::iota(unit_index_.begin(), unit_index_.end(), 0);
  unit_value_.assign(m_, -1.0);

  const int total = n_ + m_;
  lo_.resize(total);
  up_.resize(total);
  cost_.assign(total, 0.0);
  x_.assign(total, 0.0);
  state_.assign(total, VarState::Basic);
  for (int j = 0; j < n_; ++j) {
    lo_[j] = lp_.lower[j];
    up_[j] = lp_.upper[j];
    cost_[j] = lp_.cost[j];
    make_nonbasic_at_nearest_bound(j);
  }
  for (int i = 0; i < m_; ++i) {
    if (i < m_eq_) {
      lo_[n_ + i] = up_[n_ + i] = lp_.b_eq[i];
    } else {
      lo_[n_ + i] = -kInf;
      up_[n_ + i] = lp_.b_ub[i - m_eq_];
    }
  }
  head_.resize(m_);
  for (int i = 0; i < m_; ++i) head_[i] = n_ + i;
  y_.assign(m_, 0.0);
  d_.assign(total, 0.0);
  alpha_.assign(m_, 0.0);
}

void PrimalSimplex::make_nonbasic_at_nearest_bound(int j) {
  const double l = lo_[j];
  const double u = up_[j];
  if (l == u) {
    state_[j] = VarState::Fixed;
    x_[j] = l;
  } else if (l == -kInf && u == kInf) {
    state_[j] = VarState::Free;
  } else if (u == kInf || (l != -kInf && std::abs(x_[j] - l) <= std::abs(u - x_[j]))) {
    state_[j] = VarState::AtLower;
    x_[j] = l;
  } else {
    state_[j] = VarState::AtUpper;
    x_[j] = u;
  }
}

// Equality rows that contain a column singleton get that column as their basic
// variable when the implied value respects its bounds. For sizing LPs this
// yields a feasible starting basis directly.
void PrimalSimplex::crash() {
  std::vector<double> activity(m_, 0.0);
  for (int j = 0; j < n_; ++j) {
    if (x_[j] == 0.0) continue;
    for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) activity[col_row_[p]] += col_val_[p] * x_[j];
  }
  std::vector<bool> row_done(m_, false);
  for (int j = 0; j < n_; ++j) {
    if (col_start_[j + 1] - col_start_[j] != 1) continue;
    const int i = col_row_[col_start_[j]];
    if (i >= m_eq_ || row_done[i] || state_[j] == VarState::Fixed) continue;
    const double a = col_val_[col_start_[j]];
    const double value = x_[j] + (lp_.b_eq[i] - activity[i]) / a;
    if (value < lo_[j] - cfg_.feasibility_tol || value > up_[j] + cfg_.feasibility_tol) continue;
    row_done[i] = true;
    x_[j] = std::clamp(value, lo_[j], up_[j]);
    state_[j] = VarState::Basic;
    head_[i] = j;
    const int logical = n_ + i;
    state_[logical] = VarState::Fixed;
    x_[logical] = lo_[logical];
  }
}

void PrimalSimplex::refactor() {
  std::vector<detail::ColumnView> views(m_);
  for (int attempt = 0;; ++attempt) {
    for (int p = 0; p < m_; ++p) {
      const int j = head_[p];
      if (j < n_) {
        const std::size_t b = col_start_[j];
        const std::size_t e = col_start_[j + 1];
        views[p] = {{col_row_.data() + b, e - b}, {col_val_.data() + b, e - b}};
      } else {
        const int i = j - n_;
        views[p] = {{unit_index_.data() + i, 1}, {unit_value_.data() + i, 1}};
      }
    }
    auto result = factor_.factorize(m_, views);
    ++refactorizations_;
    if (result.ok) break;
    if (attempt >= kMaxSingularRepairs) {
      throw NumericalBreakdown("simplex: basis stays singular after repeated repair");
    }
    for (std::size_t k = 0; k < result.singular_positions.size(); ++k) {
      const int pos = result.singular_positions[k];
      const int row = result.unpivoted_rows[k];
      make_nonbasic_at_nearest_bound(head_[pos]);
      head_[pos] = n_ + row;
      state_[n_ + row] = VarState::Basic;
    }
  }
  compute_primal();
}

void PrimalSimplex::compute_primal() {
  std::vector<double> rhs(m_, 0.0);
  for (int j = 0; j < n_; ++j) {
    if (state_[j] == VarState::Basic || x_[j] == 0.0) continue;
    for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) rhs[col_row_[p]] -= col_val_[p] * x_[j];
  }
  for (int i = 0; i < m_; ++i) {
    if (state_[n_ + i] != VarState::Basic) rhs[i] += x_[n_ + i];
  }
  factor_.ftran(rhs);
  for (int p = 0; p < m_; ++p) x_[head_[p]] = rhs[p];
}

double PrimalSimplex::row_residual() const {
  std::vector<double> r(m_, 0.0);
  double scale = 1.0;
  for (int j = 0; j < n_; ++j) {
    if (x_[j] == 0.0) continue;
    scale = std::max(scale, std::abs(x_[j]));
    for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) r[col_row_[p]] += col_val_[p] * x_[j];
  }
  double worst = 0.0;
  for (int i = 0; i < m_; ++i) worst = std::max(worst, std::abs(r[i] - x_[n_ + i]));
  return worst / scale;
}

bool PrimalSimplex::primal_feasible() const {
  const double tol = cfg_.feasibility_tol;
  for (int p = 0; p < m_; ++p) {
    const int j = head_[p];
    if (x_[j] < lo_[j] - tol || x_[j] > up_[j] + tol) return false;
  }
  return true;
}

double PrimalSimplex::infeasibility_sum() const {
  double s = 0.0;
  for (int p = 0; p < m_; ++p) {
    const int j = head_[p];
    if (x_[j] < lo_[j]) s += lo_[j] - x_[j];
    if (x_[j] > up_[j]) s += x_[j] - up_[j];
  }
  return s;
}

void PrimalSimplex::compute_duals(bool phase1) {
  const double tol = cfg_.feasibility_tol;
  for (int p = 0; p < m_; ++p) {
    const int j = head_[p];
    if (!phase1) {
      y_[p] = cost_[j];
    } else if (x_[j] < lo_[j] - tol) {
      y_[p] = -1.0;
    } else if (x_[j] > up_[j] + tol) {
      y_[p] = 1.0;
    } else {
      y_[p] = 0.0;
    }
  }
  factor_.btran(y_);
  for (int j = 0; j < n_; ++j) {
    if (state_[j] == VarState::Basic) {
      d_[j] = 0.0;
      continue;
    }
    double s = phase1 ? 0.0 : cost_[j];
    for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) s -= y_[col_row_[p]] * col_val_[p];
    d_[j] = s;
  }
  for (int i = 0; i < m_; ++i) d_[n_ + i] = state_[n_ + i] == VarState::Basic ? 0.0 : y_[i];
}

int PrimalSimplex::choose_entering(bool bland) const {
  const double tol = cfg_.optimality_tol;
  int best = -1;
  double best_score = 0.0;
  const int total = n_ + m_;
  for (int j = 0; j < total; ++j) {
    double score = 0.0;
    switch (state_[j]) {
      case VarState::AtLower: score = -d_[j]; break;
      case VarState::AtUpper: score = d_[j]; break;
      case VarState::Free: score = std::abs(d_[j]); break;
      default: continue;
    }
    if (score <= tol) continue;
    if (bland) return j;
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

void PrimalSimplex::load_column(int j, std::vector<double>& dense) const {
  std::fill(dense.begin(), dense.end(), 0.0);
  if (j < n_) {
    for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) dense[col_row_[p]] = col_val_[p];
  } else {
    dense[j - n_] = -1.0;
  }
}

PrimalSimplex::Step PrimalSimplex::ratio_test(int q, int dir, bool phase1, bool bland, int& leave_pos,
                                              double& theta, bool& leave_at_upper) {
  const double tol = cfg_.feasibility_tol;
  const double range = up_[q] - lo_[q];
  leave_pos = -1;
  theta = kInf;

  if (phase1 || bland) {
    // Exact minimum ratio. Infeasible basics block where they regain feasibility.
    double best_alpha = 0.0;
    for (int p = 0; p < m_; ++p) {
      const double a = alpha_[p];
      if (std::abs(a) <= kPivotTol) continue;
      const int j = head_[p];
      const double rate = -dir * a;
      double ratio = kInf;
      bool to_upper = false;
      if (rate < 0.0) {
        if (phase1 && x_[j] < lo_[j] - tol) continue;
        to_upper = phase1 && x_[j] > up_[j] + tol;
        const double target = to_upper ? up_[j] : lo_[j];
        if (target == -kInf) continue;
        ratio = std::max(0.0, (x_[j] - target) / -rate);
      } else {
        if (phase1 && x_[j] > up_[j] + tol) continue;
        to_upper = !(phase1 && x_[j] < lo_[j] - tol);
        const double target = to_upper ? up_[j] : lo_[j];
        if (target == kInf) continue;
        ratio = std::max(0.0, (target - x_[j]) / rate);
      }
      bool take = false;
      if (leave_pos < 0 || ratio < theta - 1e-12) {
        take = true;
      } else if (ratio <= theta + 1e-12) {
        take = bland ? j < head_[leave_pos] : std::abs(a) > best_alpha;
      }
      if (take) {
        leave_pos = p;
        theta = std::min(theta, ratio);
        best_alpha = std::abs(a);
        leave_at_upper = to_upper;
      }
    }
  } else {
    // Harris two-pass ratio test.
    double bound = kInf;
    for (int p = 0; p < m_; ++p) {
      const double a = alpha_[p];
      if (std::abs(a) <= kPivotTol) continue;
      const int j = head_[p];
      const double rate = -dir * a;
      if (rate < 0.0) {
        if (lo_[j] != -kInf) bound = std::min(bound, (x_[j] - lo_[j] + tol) / -rate);
      } else if (up_[j] != kInf) {
        bound = std::min(bound, (up_[j] - x_[j] + tol) / rate);
      }
    }
    if (bound < kInf) {
      double best_alpha = 0.0;
      for (int p = 0; p < m_; ++p) {
        const double a = alpha_[p];
        if (std::abs(a) <= kPivotTol) continue;
        const int j = head_[p];
        const double rate = -dir * a;
        double ratio = kInf;
        if (rate < 0.0) {
          if (lo_[j] == -kInf) continue;
          ratio = (x_[j] - lo_[j]) / -rate;
        } else {
          if (up_[j] == kInf) continue;
          ratio = (up_[j] - x_[j]) / rate;
        }
        if (ratio <= bound && std::abs(a) > best_alpha) {
          best_alpha = std::abs(a);
          leave_pos = p;
          theta = std::max(0.0, ratio);
          leave_at_upper = rate > 0.0;
        }
      }
    }
  }

  if (range < kInf && (leave_pos < 0 || range <= theta)) {
    theta = range;
    return Step::Flip;
  }
  if (leave_pos < 0) return phase1 ? Step::Stalled : Step::Unbounded;
  return Step::Pivot;
}

SolveOutcome PrimalSimplex::run() {
  const auto t0 = std::chrono::steady_clock::now();
  SolveOutcome out;
  build();
  crash();
  refactor();

  const std::size_t max_iter =
      cfg_.max_iterations > 0 ? cfg_.max_iterations : std::max<std::size_t>(50 * std::max(n_, 1), 1);
  const std::size_t degenerate_limit = 3 * static_cast<std::size_t>(std::max(n_, 1));
  std::size_t degenerate_run = 0;
  bool bland = cfg_.pivot_rule == PivotRule::Bland;
  bool fresh = true;
  std::size_t iter = 0;
  std::vector<double> column(m_, 0.0);

  auto finish = [&](SolveStatus status) {
    out.status = status;
    out.iterations = iter;
    out.refactorizations = refactorizations_;
    out.primal.assign(x_.begin(), x_.begin() + n_);
    if (status == SolveStatus::Optimal) {
      out.objective = 0.0;
      for (int j = 0; j < n_; ++j) out.objective += cost_[j] * x_[j];
      compute_duals(false);
      out.eq_duals.assign(y_.begin(), y_.begin() + m_eq_);
      out.ub_duals.assign(y_.begin() + m_eq_, y_.end());
      out.reduced_costs.assign(d_.begin(), d_.begin() + n_);
      for (int j = 0; j < n_; ++j) {
        if (state_[j] != VarState::Basic) continue;
        double s = cost_[j];
        for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) s -= y_[col_row_[p]] * col_val_[p];
        out.reduced_costs[j] = s;
      }
    } else {
      out.objective = std::numeric_limits<double>::quiet_NaN();
    }
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  };

  for (;;) {
    const bool phase1 = !primal_feasible();
    compute_duals(phase1);
    const int q = choose_entering(bland);
    if (q < 0) {
      if (!fresh) {
        refactor();
        fresh = true;
        continue;
      }
      if (phase1) {
        if (infeasibility_sum() > cfg_.feasibility_tol) return finish(SolveStatus::Infeasible);
      }
      return finish(SolveStatus::Optimal);
    }
    if (iter >= max_iter) return finish(SolveStatus::IterationLimit);

    int dir = 1;
    if (state_[q] == VarState::AtUpper || (state_[q] == VarState::Free && d_[q] > 0.0)) dir = -1;

    load_column(q, column);
    factor_.ftran(column);
    alpha_.swap(column);
    column.resize(m_);

    int r = -1;
    double theta = 0.0;
    bool leave_at_upper = false;
    const Step step = ratio_test(q, dir, phase1, bland, r, theta, leave_at_upper);
    if (step == Step::Unbounded) return finish(SolveStatus::Unbounded);
    if (step == Step::Stalled) {
      if (!fresh) {
        refactor();
        fresh = true;
        continue;
      }
      throw NumericalBreakdown("simplex: phase-1 ratio test found no blocking variable");
    }
    ++iter;
    if (bland) ++out.bland_pivots;

    if (theta > 0.0) {
      x_[q] += dir * theta;
      for (int p = 0; p < m_; ++p) {
        if (alpha_[p] != 0.0) x_[head_[p]] -= dir * theta * alpha_[p];
      }
    }

    if (step == Step::Flip) {
      x_[q] = dir > 0 ? up_[q] : lo_[q];
      state_[q] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
    } else {
      const int leaving = head_[r];
      if (lo_[leaving] == up_[leaving]) {
        state_[leaving] = VarState::Fixed;
        x_[leaving] = lo_[leaving];
      } else if (!leave_at_upper) {
        state_[leaving] = VarState::AtLower;
        x_[leaving] = lo_[leaving];
      } else {
        state_[leaving] = VarState::AtUpper;
        x_[leaving] = up_[leaving];
      }
      factor_.update(r, alpha_);
      head_[r] = q;
      state_[q] = VarState::Basic;
      fresh = false;
    }

    if (theta * std::abs(d_[q]) <= kDegenerateStep) {
      ++degenerate_run;
      if (cfg_.pivot_rule == PivotRule::DantzigWithBlandFallback && degenerate_run >= degenerate_limit) {
        bland = true;
      }
    } else {
      degenerate_run = 0;
      if (cfg_.pivot_rule == PivotRule::DantzigWithBlandFallback) bland = false;
    }

    // Also refactor once the update file outweighs the factors: dense etas make
    // every solve slower than a fresh factorization would.
    if (factor_.num_updates() >= cfg_.refactor_interval ||
        factor_.eta_nnz() > kEtaFillRatio * factor_.factor_nnz() ||
        (factor_.num_updates() > 0 && factor_.num_updates() % kDriftCheckPeriod == 0 &&
         row_residual() > kDriftTol)) {
      refactor();
      fresh = true;
    }
  }
}

}  // namespace

SolveOutcome solve(const StandardFormLP& lp, const SolverConfig& config) {
  config.validate();
  lp.validate();
  PrimalSimplex simplex(lp, config);
  return simplex.run();
}

double dual_objective(const StandardFormLP& lp, std::span<const double> eq_duals,
                      std::span<const double> ub_duals, double tol) {
  const std::size_t n = lp.num_vars();
  std::vector<double> d(lp.cost);
  double value = 0.0;
  for (std::size_t r = 0; r < lp.num_eq(); ++r) {
    value += eq_duals[r] * lp.b_eq[r];
    auto cs = lp.a_eq.row_cols(r);
    auto vs = lp.a_eq.row_values(r);
    for (std::size_t p = 0; p < cs.size(); ++p) d[cs[p]] -= eq_duals[r] * vs[p];
  }
  for (std::size_t r = 0; r < lp.num_ub(); ++r) {
    double yr = ub_duals[r];
    if (yr > tol) return -kInf;
    yr = std::min(yr, 0.0);
    value += yr * lp.b_ub[r];
    auto cs = lp.a_ub.row_cols(r);
    auto vs = lp.a_ub.row_values(r);
    for (std::size_t p = 0; p < cs.size(); ++p) d[cs[p]] -= yr * vs[p];
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (d[j] > tol) {
      if (lp.lower[j] == -kInf) return -kInf;
      value += d[j] * lp.lower[j];
    } else if (d[j] < -tol) {
      if (lp.upper[j] == kInf) return -kInf;
      value += d[j] * lp.upper[j];
    } else if (std::isfinite(lp.lower[j]) || std::isfinite(lp.upper[j])) {
      const double bound = std::isfinite(lp.lower[j]) ? lp.lower[j] : lp.upper[j];
      value += d[j] * bound;
    }
  }
  return value;
}

}  // namespace pvsizing::lp
