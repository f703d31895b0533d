#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "gamemine/rng.hpp"
#include "gamemine/smo.hpp"

using namespace gamemine;

namespace {

// ---------------------------------------------------------------------------
// Independent brute-force oracle for the SVM dual:
//   maximize  W(a) = sum a_i - 1/2 sum_ij a_i a_j y_i y_j K_ij
//   s.t.      0 <= a_i <= C,  sum a_i y_i = 0.
// Enumerates every active-set pattern (each variable at 0, at C, or free),
// solves the stationarity system for the free block, and keeps the best
// KKT-consistent candidate. Exact up to floating point for problems in
// general position; usable for n <= 8.

bool solve_linear(std::vector<std::vector<double>> a, std::vector<double> rhs,
                  std::vector<double>& out) {
  const std::size_t m = rhs.size();
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    if (std::fabs(a[pivot][col]) < 1e-10) return false;
    std::swap(a[col], a[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      const double factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c < m; ++c) a[r][c] -= factor * a[col][c];
      rhs[r] -= factor * rhs[col];
    }
  }
  out.resize(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = rhs[i] / a[i][i];
  return true;
}

struct OracleResult {
  bool found = false;
  double w_max = -std::numeric_limits<double>::infinity();
  std::vector<double> alpha;
};

OracleResult enumerate_dual_optimum(const SmoProblem& prob, const KernelSpec& kernel, double c) {
  const std::size_t n = prob.points.size();
  std::vector<std::vector<double>> q(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      q[i][j] = prob.labels[i] * prob.labels[j] *
                kernel_eval(kernel, prob.points[i], prob.points[j]);

  std::size_t patterns = 1;
  for (std::size_t i = 0; i < n; ++i) patterns *= 3;

  const double kkt_tol = 1e-7;
  OracleResult best;

  for (std::size_t code = 0; code < patterns; ++code) {
    std::vector<int> state(n); // 0 at zero, 1 at C, 2 free
    std::size_t rem = code;
    for (std::size_t i = 0; i < n; ++i) {
      state[i] = static_cast<int>(rem % 3);
      rem /= 3;
    }

    std::vector<double> alpha(n, 0.0);
    std::vector<std::size_t> free_idx;
    for (std::size_t i = 0; i < n; ++i) {
      if (state[i] == 1) alpha[i] = c;
      if (state[i] == 2) free_idx.push_back(i);
    }

    double beta = 0.0;
    bool beta_fixed = false;
    if (!free_idx.empty()) {
      // stationarity over the free block plus the equality constraint
      const std::size_t m = free_idx.size() + 1;
      std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
      std::vector<double> rhs(m, 0.0);
      for (std::size_t r = 0; r < free_idx.size(); ++r) {
        const std::size_t fi = free_idx[r];
        for (std::size_t col = 0; col < free_idx.size(); ++col) a[r][col] = q[fi][free_idx[col]];
        a[r][free_idx.size()] = prob.labels[fi];
        double bound_term = 0.0;
        for (std::size_t j = 0; j < n; ++j)
          if (state[j] == 1) bound_term += q[fi][j] * c;
        rhs[r] = 1.0 - bound_term;
      }
      double bound_y = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (state[j] == 1) bound_y += prob.labels[j] * c;
      for (std::size_t col = 0; col < free_idx.size(); ++col)
        a[free_idx.size()][col] = prob.labels[free_idx[col]];
      rhs[free_idx.size()] = -bound_y;

      std::vector<double> sol;
      if (!solve_linear(a, rhs, sol)) continue;
      bool in_bounds = true;
      for (std::size_t r = 0; r < free_idx.size(); ++r) {
        if (sol[r] < -1e-9 || sol[r] > c + 1e-9) in_bounds = false;
        alpha[free_idx[r]] = sol[r];
      }
      if (!in_bounds) continue;
      beta = sol[free_idx.size()];
      beta_fixed = true;
    } else {
      double residual = 0.0;
      for (std::size_t i = 0; i < n; ++i) residual += alpha[i] * prob.labels[i];
      if (std::fabs(residual) > 1e-9) continue;
    }

    // gradient of W at alpha: g_i = 1 - (q alpha)_i; KKT demands
    // g_i - beta y_i <= 0 at the lower bound, >= 0 at the upper bound,
    // = 0 on the free block (already enforced by the system).
    std::vector<double> grad(n);
    for (std::size_t i = 0; i < n; ++i) {
      double qa = 0.0;
      for (std::size_t j = 0; j < n; ++j) qa += q[i][j] * alpha[j];
      grad[i] = 1.0 - qa;
    }
    bool ok = true;
    if (beta_fixed) {
      for (std::size_t i = 0; i < n && ok; ++i) {
        const double slack = grad[i] - beta * prob.labels[i];
        if (state[i] == 0 && slack > kkt_tol) ok = false;
        if (state[i] == 1 && slack < -kkt_tol) ok = false;
      }
    } else {
      // beta is unconstrained: find one interval satisfying every bound
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        // at zero: grad - beta y <= 0; at C: grad - beta y >= 0
        const double y = prob.labels[i];
        const double bound = grad[i] / y;
        const bool lower_bounds_beta = (state[i] == 0) == (y > 0.0);
        if (lower_bounds_beta)
          lo = std::max(lo, bound);
        else
          hi = std::min(hi, bound);
      }
      ok = lo <= hi + kkt_tol;
    }
    if (!ok) continue;

    const double w = dual_objective(prob, kernel, alpha);
    if (w > best.w_max) {
      best.found = true;
      best.w_max = w;
      best.alpha = alpha;
    }
  }
  return best;
}

// KKT audit of a solver output under the solver's stopping tolerance.
void check_solution(const SmoProblem& prob, const SmoParams& params, const SmoSolution& sol,
                    double kkt_tol) {
  REQUIRE(sol.converged);
  double residual = 0.0;
  for (std::size_t i = 0; i < prob.points.size(); ++i) {
    REQUIRE(sol.alpha[i] >= -1e-12);
    REQUIRE(sol.alpha[i] <= params.c + 1e-12);
    residual += sol.alpha[i] * prob.labels[i];
  }
  CHECK(std::fabs(residual) < 1e-9);
  for (std::size_t i = 0; i < prob.points.size(); ++i) {
    const double margin = prob.labels[i] * decision_value(prob, params.kernel, sol, prob.points[i]);
    if (sol.alpha[i] < 1e-10) {
      CHECK(margin >= 1.0 - kkt_tol);
    } else if (sol.alpha[i] > params.c - 1e-10) {
      CHECK(margin <= 1.0 + kkt_tol);
    } else {
      CHECK(std::fabs(margin - 1.0) <= kkt_tol);
    }
  }
}

SmoProblem random_problem(std::uint64_t seed, std::size_t n, std::size_t dim) {
  SplitMix64 g(seed);
  SmoProblem prob;
  while (true) {
    prob.points.clear();
    prob.labels.clear();
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> x(dim);
      for (double& v : x) v = (static_cast<double>(g.next_below(13)) - 6.0) / 2.0;
      prob.points.push_back(std::move(x));
      const double y = g.next_below(2) == 0 ? -1.0 : 1.0;
      has_pos = has_pos || y > 0;
      has_neg = has_neg || y < 0;
      prob.labels.push_back(y);
    }
    if (has_pos && has_neg) return prob;
  }
}

} // namespace

TEST_CASE("two opposed points give the textbook analytic solution") {
  const SmoProblem prob{{{0.0}, {1.0}}, {-1.0, 1.0}};
  const SmoParams params{};
  const SmoSolution sol = solve_smo(prob, params);
  REQUIRE(sol.converged);
  CHECK(sol.alpha[0] == Catch::Approx(1.0).margin(1e-12));
  CHECK(sol.alpha[1] == Catch::Approx(1.0).margin(1e-12));
  CHECK(sol.bias == Catch::Approx(-0.5).margin(1e-12));
  CHECK(dual_objective(prob, params.kernel, sol.alpha) == Catch::Approx(1.5).margin(1e-12));
  // decision boundary halfway between the points
  CHECK(std::fabs(decision_value(prob, params.kernel, sol, {0.5})) < 1e-12);
  CHECK(decision_value(prob, params.kernel, sol, {0.4}) < 0.0);
  CHECK(decision_value(prob, params.kernel, sol, {0.6}) > 0.0);
}

TEST_CASE("separable four-point problem attains the known dual optimum") {
  const SmoProblem prob{{{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}},
                        {-1.0, -1.0, 1.0, 1.0}};
  SmoParams params;
  params.c = 10.0;
  params.tolerance = 1e-6;
  const SmoSolution sol = solve_smo(prob, params);
  check_solution(prob, params, sol, 1e-5);

  // maximum margin boundary is x0 = 0.5, so W* = ||w||^2 / 2 = 2
  const double w = dual_objective(prob, params.kernel, sol.alpha);
  CHECK(w == Catch::Approx(2.0).margin(1e-6));
  const OracleResult oracle = enumerate_dual_optimum(prob, params.kernel, params.c);
  REQUIRE(oracle.found);
  CHECK(oracle.w_max == Catch::Approx(2.0).margin(1e-9));

  CHECK(decision_value(prob, params.kernel, sol, {0.49, 0.7}) < 0.0);
  CHECK(decision_value(prob, params.kernel, sol, {0.51, 0.7}) > 0.0);
}

TEST_CASE("coincident points with opposite labels exercise the flat-direction step") {
  // eta = K11 + K22 - 2 K12 = 0: the update must fall back to endpoint
  // comparison. Optimum pushes both multipliers to C with W = 2C.
  const SmoProblem prob{{{1.0}, {1.0}}, {1.0, -1.0}};
  SmoParams params;
  params.tolerance = 1e-6;
  const SmoSolution sol = solve_smo(prob, params);
  REQUIRE(sol.converged);
  CHECK(sol.alpha[0] == Catch::Approx(1.0).margin(1e-9));
  CHECK(sol.alpha[1] == Catch::Approx(1.0).margin(1e-9));
  CHECK(dual_objective(prob, params.kernel, sol.alpha) == Catch::Approx(2.0).margin(1e-9));
  const OracleResult oracle = enumerate_dual_optimum(prob, params.kernel, params.c);
  REQUIRE(oracle.found);
  CHECK(oracle.w_max == Catch::Approx(2.0).margin(1e-9));
}

TEST_CASE("degree-2 polynomial kernel separates the xor pattern") {
  const SmoProblem prob{{{0.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {1.0, 0.0}},
                        {1.0, 1.0, -1.0, -1.0}};
  SmoParams params;
  params.c = 100.0;
  params.tolerance = 1e-6;
  params.kernel = KernelSpec{KernelType::polynomial, 2};
  const SmoSolution sol = solve_smo(prob, params);
  check_solution(prob, params, sol, 1e-5);
  for (std::size_t i = 0; i < 4; ++i) {
    const double f = decision_value(prob, params.kernel, sol, prob.points[i]);
    CHECK(f * prob.labels[i] > 0.0);
  }
  const OracleResult oracle = enumerate_dual_optimum(prob, params.kernel, params.c);
  REQUIRE(oracle.found);
  const double w = dual_objective(prob, params.kernel, sol.alpha);
  CHECK(w == Catch::Approx(oracle.w_max).margin(1e-5 * (1.0 + std::fabs(oracle.w_max))));
}

TEST_CASE("solver matches the enumeration oracle on random problems") {
  std::uint64_t seed = 1000;
  for (std::size_t n : {4u, 6u, 8u}) {
    for (std::size_t dim : {1u, 2u, 3u}) {
      for (double c : {0.5, 10.0}) {
        for (KernelType kt : {KernelType::linear, KernelType::polynomial}) {
          SmoParams params;
          params.c = c;
          params.tolerance = 1e-6;
          params.kernel = kt == KernelType::linear ? KernelSpec{KernelType::linear, 1}
                                                   : KernelSpec{KernelType::polynomial, 2};
          const SmoProblem prob = random_problem(++seed, n, dim);
          INFO("seed " << seed << " n " << n << " dim " << dim << " c " << c << " kernel "
                       << static_cast<int>(kt));
          const SmoSolution sol = solve_smo(prob, params);
          REQUIRE(sol.converged);
          const double w_solver = dual_objective(prob, params.kernel, sol.alpha);
          const OracleResult oracle = enumerate_dual_optimum(prob, params.kernel, c);
          REQUIRE(oracle.found);
          const double scale = 1.0 + std::fabs(oracle.w_max);
          // never beyond the true optimum, and within stopping slack of it
          CHECK(w_solver <= oracle.w_max + 1e-8 * scale);
          CHECK(w_solver >= oracle.w_max - 1e-4 * scale);
        }
      }
    }
  }
}

TEST_CASE("smo is deterministic for identical inputs") {
  const SmoProblem prob = random_problem(77, 8, 2);
  SmoParams params;
  params.seed = 5;
  const SmoSolution a = solve_smo(prob, params);
  const SmoSolution b = solve_smo(prob, params);
  REQUIRE(a.alpha.size() == b.alpha.size());
  for (std::size_t i = 0; i < a.alpha.size(); ++i) REQUIRE(a.alpha[i] == b.alpha[i]);
  CHECK(a.bias == b.bias);
  CHECK(a.accepted_steps == b.accepted_steps);
}

TEST_CASE("diagnostics trace a nondecreasing objective and a feasible path") {
  const SmoProblem prob = random_problem(31, 8, 2);
  SmoParams params;
  params.tolerance = 1e-6;
  SmoDiagnostics diag;
  const SmoSolution sol = solve_smo(prob, params, &diag);
  REQUIRE(sol.converged);
  REQUIRE(!diag.objective_trace.empty());
  for (std::size_t i = 1; i < diag.objective_trace.size(); ++i)
    REQUIRE(diag.objective_trace[i] >= diag.objective_trace[i - 1] - 1e-9);
  for (double r : diag.constraint_residual) REQUIRE(r < 1e-9);
  for (double v : diag.bound_violation) REQUIRE(v <= 1e-12);
  CHECK(diag.objective_trace.size() == sol.accepted_steps);
}

TEST_CASE("smo validates its inputs") {
  CHECK_THROWS_AS(solve_smo(SmoProblem{}, SmoParams{}), std::invalid_argument);
  CHECK_THROWS_AS(solve_smo(SmoProblem{{{0.0}}, {1.0, -1.0}}, SmoParams{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_smo(SmoProblem{{{0.0}, {1.0}}, {1.0, 0.5}}, SmoParams{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_smo(SmoProblem{{{0.0}, {1.0, 2.0}}, {1.0, -1.0}}, SmoParams{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      solve_smo(SmoProblem{{{std::numeric_limits<double>::quiet_NaN()}}, {1.0}}, SmoParams{}),
      std::invalid_argument);

  SmoParams bad = {};
  bad.c = 0.0;
  CHECK_THROWS_AS(validate_smo_params(bad), std::invalid_argument);
  bad = {};
  bad.tolerance = -1.0;
  CHECK_THROWS_AS(validate_smo_params(bad), std::invalid_argument);
  bad = {};
  bad.eps = 0.0;
  CHECK_THROWS_AS(validate_smo_params(bad), std::invalid_argument);
  bad = {};
  bad.kernel.degree = 0;
  CHECK_THROWS_AS(validate_smo_params(bad), std::invalid_argument);
}

TEST_CASE("single-class problems leave every multiplier at zero") {
  // no violating pair exists; the solver should converge immediately
  const SmoProblem prob{{{0.0}, {1.0}, {2.0}}, {1.0, 1.0, 1.0}};
  const SmoSolution sol = solve_smo(prob, SmoParams{});
  REQUIRE(sol.converged);
  for (double a : sol.alpha) CHECK(a == 0.0);
}
