#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "pvsizing/simplex.hpp"

using namespace pvsizing;
using namespace pvsizing::lp;

namespace {

StandardFormLP empty_lp(std::size_t n) {
  StandardFormLP lp;
  lp.cost.assign(n, 0.0);
  lp.lower.assign(n, 0.0);
  lp.upper.assign(n, kInf);
  lp.a_eq = SparseMatrix(n);
  lp.a_ub = SparseMatrix(n);
  return lp;
}

void add_ub(StandardFormLP& lp, std::vector<double> coeffs, double rhs) {
  std::vector<Entry> row;
  for (std::size_t j = 0; j < coeffs.size(); ++j) row.push_back({j, coeffs[j]});
  lp.a_ub.append_row(row);
  lp.b_ub.push_back(rhs);
}

void add_eq(StandardFormLP& lp, std::vector<double> coeffs, double rhs) {
  std::vector<Entry> row;
  for (std::size_t j = 0; j < coeffs.size(); ++j) row.push_back({j, coeffs[j]});
  lp.a_eq.append_row(row);
  lp.b_eq.push_back(rhs);
}

// Brute-force vertex enumeration for small bounded LPs: every vertex is the
// solution of n linearly independent active constraints (all equalities plus a
// subset of inequality rows and variable bounds).
struct Halfspace {
  std::vector<double> a;
  double b;
};

bool solve_dense(std::vector<std::vector<double>> m, std::vector<double> rhs, std::vector<double>& x) {
  const std::size_t n = rhs.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    }
    if (std::abs(m[piv][c]) < 1e-10) return false;
    std::swap(m[piv], m[c]);
    std::swap(rhs[piv], rhs[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      rhs[r] -= f * rhs[c];
    }
  }
  x.resize(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / m[i][i];
  return true;
}

double vertex_enumeration_optimum(const StandardFormLP& lp, bool& feasible) {
  const std::size_t n = lp.num_vars();
  std::vector<Halfspace> eqs;
  std::vector<Halfspace> ineqs;
  for (std::size_t r = 0; r < lp.num_eq(); ++r) {
    std::vector<double> a(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) a[j] = lp.a_eq.at(r, j);
    eqs.push_back({a, lp.b_eq[r]});
  }
  for (std::size_t r = 0; r < lp.num_ub(); ++r) {
    std::vector<double> a(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) a[j] = lp.a_ub.at(r, j);
    ineqs.push_back({a, lp.b_ub[r]});
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> a(n, 0.0);
    a[j] = 1.0;
    ineqs.push_back({a, lp.upper[j]});
    a[j] = -1.0;
    ineqs.push_back({a, -lp.lower[j]});
  }
  const std::size_t pick = n - eqs.size();
  double best = kInf;
  feasible = false;
  std::vector<bool> mask(ineqs.size(), false);
  std::fill(mask.begin(), mask.begin() + static_cast<long>(pick), true);
  do {
    std::vector<std::vector<double>> m;
    std::vector<double> rhs;
    for (const auto& e : eqs) {
      m.push_back(e.a);
      rhs.push_back(e.b);
    }
    for (std::size_t k = 0; k < ineqs.size(); ++k) {
      if (mask[k]) {
        m.push_back(ineqs[k].a);
        rhs.push_back(ineqs[k].b);
      }
    }
    std::vector<double> x;
    if (!solve_dense(m, rhs, x)) continue;
    if (lp.max_violation(x) > 1e-7) continue;
    feasible = true;
    best = std::min(best, lp.objective(x));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

}  // namespace

TEST_CASE("one-variable LP with a lower-bound row") {
  auto lp = empty_lp(1);
  lp.cost = {1.0};
  lp.lower = {-kInf};
  add_ub(lp, {-1.0}, -3.0);
  auto out = solve(lp);
  REQUIRE(out.status == SolveStatus::Optimal);
  CHECK(out.primal[0] == doctest::Approx(3.0));
  CHECK(out.objective == doctest::Approx(3.0));
}

TEST_CASE("unbounded direction is reported") {
  auto lp = empty_lp(1);
  lp.cost = {-1.0};
  auto out = solve(lp);
  CHECK(out.status == SolveStatus::Unbounded);
  CHECK(std::isnan(out.objective));
}

TEST_CASE("contradictory rows are infeasible") {
  auto lp = empty_lp(2);
  lp.cost = {1.0, 1.0};
  add_ub(lp, {1.0, 1.0}, 1.0);
  add_ub(lp, {-1.0, -1.0}, -2.0);
  auto out = solve(lp);
  CHECK(out.status == SolveStatus::Infeasible);
}

TEST_CASE("equality-constrained transport LP") {
  // Two supplies (3, 2) to two demands (4, 1); unit costs 1 2 / 3 1.
  auto lp = empty_lp(4);
  lp.cost = {1.0, 2.0, 3.0, 1.0};
  add_eq(lp, {1, 1, 0, 0}, 3.0);
  add_eq(lp, {0, 0, 1, 1}, 2.0);
  add_eq(lp, {1, 0, 1, 0}, 4.0);
  add_eq(lp, {0, 1, 0, 1}, 1.0);
  auto out = solve(lp);
  REQUIRE(out.status == SolveStatus::Optimal);
  // Ship 3 on (1,1), 1 on (2,1), 1 on (2,2): 3 + 3 + 1.
  CHECK(out.objective == doctest::Approx(7.0));
  CHECK(lp.max_violation(out.primal) < 1e-9);
}

TEST_CASE("Beale's cycling example terminates under both pivot rules") {
  auto lp = empty_lp(4);
  lp.cost = {-0.75, 150.0, -0.02, 6.0};
  add_ub(lp, {0.25, -60.0, -0.04, 9.0}, 0.0);
  add_ub(lp, {0.5, -90.0, -0.02, 3.0}, 0.0);
  add_ub(lp, {0.0, 0.0, 1.0, 0.0}, 1.0);
  for (auto rule : {PivotRule::Bland, PivotRule::DantzigWithBlandFallback}) {
    SolverConfig cfg;
    cfg.pivot_rule = rule;
    auto out = solve(lp, cfg);
    REQUIRE(out.status == SolveStatus::Optimal);
    CHECK(out.objective == doctest::Approx(-0.05).epsilon(1e-12));
    CHECK(lp.max_violation(out.primal) < 1e-9);
  }
}

TEST_CASE("iteration limit is honoured") {
  auto lp = empty_lp(3);
  lp.cost = {-1.0, -1.0, -1.0};
  add_ub(lp, {1, 2, 1}, 4.0);
  add_ub(lp, {2, 1, 1}, 5.0);
  add_ub(lp, {1, 1, 3}, 6.0);
  SolverConfig cfg;
  cfg.max_iterations = 1;
  auto out = solve(lp, cfg);
  CHECK(out.status == SolveStatus::IterationLimit);
}

TEST_CASE("invalid solver configuration is rejected") {
  SolverConfig cfg;
  cfg.feasibility_tol = 0.0;
  CHECK_THROWS_AS(solve(empty_lp(1), cfg), ConfigError);
}

TEST_CASE("random small LPs match vertex enumeration and close the duality gap") {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_int_distribution<int> small(0, 2);
  int optimal_seen = 0;
  int infeasible_seen = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 3 + small(rng) % 2;
    auto lp = empty_lp(n);
    for (std::size_t j = 0; j < n; ++j) {
      lp.cost[j] = coef(rng);
      lp.lower[j] = small(rng) == 0 ? -2.0 : 0.0;
      lp.upper[j] = 1.0 + std::abs(coef(rng));
    }
    const int rows = 2 + small(rng);
    for (int r = 0; r < rows; ++r) {
      std::vector<double> a(n);
      for (auto& v : a) v = std::round(coef(rng) * 4.0) / 4.0;
      add_ub(lp, a, coef(rng));
    }
    if (small(rng) == 0) {
      std::vector<double> a(n);
      for (auto& v : a) v = std::round(coef(rng) * 4.0) / 4.0;
      add_eq(lp, a, coef(rng) / 2.0);
    }
    bool feasible = false;
    const double oracle = vertex_enumeration_optimum(lp, feasible);
    auto out = solve(lp);
    if (!feasible) {
      CHECK(out.status == SolveStatus::Infeasible);
      ++infeasible_seen;
      continue;
    }
    REQUIRE(out.status == SolveStatus::Optimal);
    ++optimal_seen;
    CHECK(out.objective == doctest::Approx(oracle).epsilon(1e-7));
    CHECK(lp.max_violation(out.primal) < 1e-8);
    const double dual = dual_objective(lp, out.eq_duals, out.ub_duals, 1e-9);
    CHECK(std::abs(out.objective - dual) <= 1e-7 * (1.0 + std::abs(out.objective)));
  }
  CHECK(optimal_seen > 50);
  CHECK(infeasible_seen > 0);
}

TEST_CASE("repeated solves are deterministic") {
  auto lp = empty_lp(3);
  lp.cost = {-1.0, -2.0, 0.5};
  add_ub(lp, {1, 1, 1}, 4.0);
  add_ub(lp, {1, -1, 0}, 1.0);
  add_eq(lp, {0, 1, 1}, 2.5);
  auto a = solve(lp);
  auto b = solve(lp);
  CHECK(a.status == b.status);
  CHECK(a.iterations == b.iterations);
  CHECK(a.primal == b.primal);
  CHECK(a.objective == b.objective);
}
