#pragma once

// Sequential minimal optimization for the soft-margin SVM dual (Platt 1998):
// analytic two-multiplier updates, error cache, second-choice heuristic
// maximizing |E1 - E2|, outer loop alternating full and non-bound passes.
//
// Conventions: f(x) = sum_i alpha_i y_i K(x_i, x) + b, E_i = f(x_i) - y_i,
// labels in {-1, +1}. The dual objective being maximized is
// W(alpha) = sum alpha_i - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gamemine/rng.hpp"

namespace gamemine {

enum class KernelType : std::uint8_t { linear = 0, polynomial = 1 };

struct KernelSpec {
  KernelType type = KernelType::linear;
  int degree = 1; // polynomial only: K = (x.y + 1)^degree

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

struct SmoParams {
  double c = 1.0;          // soft-margin penalty
  double tolerance = 1e-3; // KKT violation tolerance
  double eps = 1e-12;      // minimum accepted multiplier change
  KernelSpec kernel{};
  std::uint64_t seed = 0; // randomized scan order in the fallback loops
};

inline void validate_smo_params(const SmoParams& p) {
  if (!(p.c > 0)) throw std::invalid_argument("smo: c must be positive");
  if (!(p.tolerance > 0)) throw std::invalid_argument("smo: tolerance must be positive");
  if (!(p.eps > 0)) throw std::invalid_argument("smo: eps must be positive");
  if (p.kernel.degree < 1) throw std::invalid_argument("smo: kernel degree must be >= 1");
}

inline double kernel_eval(const KernelSpec& k, const std::vector<double>& a,
                          const std::vector<double>& b) {
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  if (k.type == KernelType::linear) return dot;
  double base = dot + 1.0;
  double result = 1.0;
  for (int i = 0; i < k.degree; ++i) result *= base;
  return result;
}

struct SmoProblem {
  std::vector<std::vector<double>> points;
  std::vector<double> labels; // +1 / -1
};

struct SmoSolution {
  std::vector<double> alpha;
  double bias = 0.0;
  bool converged = false;
  std::uint64_t accepted_steps = 0;
};

// Test and audit hooks; filled only when requested.
struct SmoDiagnostics {
  std::vector<double> objective_trace;          // after each accepted step
  std::vector<double> constraint_residual;      // |sum alpha_i y_i| per outer pass
  std::vector<double> bound_violation;          // max(-alpha, alpha - C) per outer pass
};

inline double dual_objective(const SmoProblem& prob, const KernelSpec& kernel,
                             const std::vector<double>& alpha) {
  const std::size_t n = prob.points.size();
  double sum = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] == 0.0) continue;
    sum += alpha[i];
    for (std::size_t j = 0; j < n; ++j) {
      if (alpha[j] == 0.0) continue;
      quad += alpha[i] * alpha[j] * prob.labels[i] * prob.labels[j] *
              kernel_eval(kernel, prob.points[i], prob.points[j]);
    }
  }
  return sum - 0.5 * quad;
}

inline double decision_value(const SmoProblem& prob, const KernelSpec& kernel,
                             const SmoSolution& sol, const std::vector<double>& x) {
  double f = sol.bias;
  for (std::size_t i = 0; i < prob.points.size(); ++i)
    if (sol.alpha[i] != 0.0)
      f += sol.alpha[i] * prob.labels[i] * kernel_eval(kernel, prob.points[i], x);
  return f;
}

namespace detail {

class SmoSolver {
 public:
  SmoSolver(const SmoProblem& prob, const SmoParams& params, SmoDiagnostics* diag)
      : prob_(prob),
        params_(params),
        diag_(diag),
        n_(prob.points.size()),
        alpha_(prob.points.size(), 0.0),
        error_(prob.points.size(), 0.0),
        rng_(params.seed) {
    for (std::size_t i = 0; i < n_; ++i) error_[i] = -prob_.labels[i]; // f == 0 initially
  }

  SmoSolution solve() {
    // Hard cap so degenerate inputs cannot spin forever; a capped run is
    // reported as not converged.
    const std::uint64_t max_passes = 10000 + 200 * static_cast<std::uint64_t>(n_);
    std::uint64_t passes = 0;
    std::size_t num_changed = 0;
    bool examine_all = true;
    bool converged = false;
    while (num_changed > 0 || examine_all) {
      if (++passes > max_passes) break;
      num_changed = 0;
      if (examine_all) {
        for (std::size_t i = 0; i < n_; ++i) num_changed += examine_example(i);
      } else {
        for (std::size_t i = 0; i < n_; ++i)
          if (is_free(alpha_[i])) num_changed += examine_example(i);
      }
      record_pass();
      if (examine_all) {
        examine_all = false;
        if (num_changed == 0) {
          // A full pass made no progress. The per-step threshold rule only
          // consults the two multipliers it touched, so when both land on a
          // bound it can leave b outside the range the rest of the active set
          // requires; that in turn corrupts the cached errors used to flag
          // violations. Re-center b on the whole set before trusting the
          // pass, and only stop once a single threshold satisfies everyone.
          if (recenter_threshold() <= 2.0 * params_.tolerance) {
            converged = true;
            break;
          }
          examine_all = true; // corrected errors may unmask real violators
        }
      } else if (num_changed == 0) {
        examine_all = true;
      }
    }
    if (!converged) recenter_threshold(); // best-effort threshold for a capped run
    return SmoSolution{alpha_, b_, converged, steps_};
  }

 private:
  bool is_free(double a) const { return a > 0.0 && a < params_.c; }

  // Move the threshold to the middle of the interval that every multiplier's
  // optimality condition allows (multipliers at 0 bound b from one side, ones
  // at C from the other, free ones from both), shift the error cache to
  // match, and return the interval's infeasibility gap: <= 0 exactly when one
  // threshold satisfies the whole set. Multipliers within rounding distance
  // of a bound are treated as sitting on it.
  double recenter_threshold() {
    const double grace = 1e-12 * params_.c;
    const double inf = std::numeric_limits<double>::infinity();
    double lo = -inf, hi = inf;
    for (std::size_t i = 0; i < n_; ++i) {
      const double g = b_ - error_[i]; // the b making this point's margin exactly 1
      const bool above_zero = alpha_[i] > grace;
      const bool below_c = alpha_[i] < params_.c - grace;
      if (prob_.labels[i] > 0) {
        if (below_c) lo = std::max(lo, g);
        if (above_zero) hi = std::min(hi, g);
      } else {
        if (above_zero) lo = std::max(lo, g);
        if (below_c) hi = std::min(hi, g);
      }
    }
    double b_new = b_;
    if (lo > -inf && hi < inf)
      b_new = 0.5 * (lo + hi);
    else if (lo > -inf)
      b_new = lo;
    else if (hi < inf)
      b_new = hi;
    for (std::size_t i = 0; i < n_; ++i) error_[i] += b_new - b_;
    b_ = b_new;
    return (lo > -inf && hi < inf) ? lo - hi : 0.0;
  }

  double kern(std::size_t i, std::size_t j) const {
    return kernel_eval(params_.kernel, prob_.points[i], prob_.points[j]);
  }

  std::size_t examine_example(std::size_t i2) {
    const double y2 = prob_.labels[i2];
    const double alph2 = alpha_[i2];
    const double e2 = error_[i2];
    const double r2 = e2 * y2;
    const bool violates = (r2 < -params_.tolerance && alph2 < params_.c) ||
                          (r2 > params_.tolerance && alph2 > 0.0);
    if (!violates) return 0;

    // Second-choice heuristic: maximize |E1 - E2| over free multipliers.
    std::size_t best = n_;
    double best_gap = -1.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (i == i2 || !is_free(alpha_[i])) continue;
      double gap = std::fabs(error_[i] - e2);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best < n_ && take_step(best, i2)) return 1;

    // Fall back to scanning free multipliers, then everything, from a
    // seeded random start.
    std::size_t start = n_ > 0 ? static_cast<std::size_t>(rng_.next_below(n_)) : 0;
    for (std::size_t off = 0; off < n_; ++off) {
      std::size_t i1 = (start + off) % n_;
      if (is_free(alpha_[i1]) && take_step(i1, i2)) return 1;
    }
    start = n_ > 0 ? static_cast<std::size_t>(rng_.next_below(n_)) : 0;
    for (std::size_t off = 0; off < n_; ++off) {
      std::size_t i1 = (start + off) % n_;
      if (take_step(i1, i2)) return 1;
    }
    return 0;
  }

  bool take_step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double c = params_.c;
    const double alph1 = alpha_[i1];
    const double alph2 = alpha_[i2];
    const double y1 = prob_.labels[i1];
    const double y2 = prob_.labels[i2];
    const double e1 = error_[i1];
    const double e2 = error_[i2];
    const double s = y1 * y2;

    double lo, hi;
    if (y1 != y2) {
      lo = std::max(0.0, alph2 - alph1);
      hi = std::min(c, c + alph2 - alph1);
    } else {
      lo = std::max(0.0, alph1 + alph2 - c);
      hi = std::min(c, alph1 + alph2);
    }
    if (lo == hi) return false;

    const double k11 = kern(i1, i1);
    const double k12 = kern(i1, i2);
    const double k22 = kern(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;

    double a2;
    if (eta > 0.0) {
      a2 = alph2 + y2 * (e1 - e2) / eta;
      if (a2 < lo)
        a2 = lo;
      else if (a2 > hi)
        a2 = hi;
    } else {
      // Flat or concave-up along the constraint line: the maximum of the
      // dual restricted to the segment sits at an endpoint.
      const double lobj = restricted_objective(i1, i2, lo);
      const double hobj = restricted_objective(i1, i2, hi);
      if (lobj > hobj + params_.eps)
        a2 = lo;
      else if (lobj < hobj - params_.eps)
        a2 = hi;
      else
        a2 = alph2;
    }
    if (std::fabs(a2 - alph2) < params_.eps * (a2 + alph2 + params_.eps)) return false;

    double a1 = alph1 + s * (alph2 - a2);
    if (a1 < 0.0)
      a1 = 0.0;
    else if (a1 > c)
      a1 = c;

    const double d1 = y1 * (a1 - alph1);
    const double d2 = y2 * (a2 - alph2);
    const double b1 = b_ - e1 - d1 * k11 - d2 * k12;
    const double b2 = b_ - e2 - d1 * k12 - d2 * k22;
    double b_new;
    if (a1 > 0.0 && a1 < c)
      b_new = b1;
    else if (a2 > 0.0 && a2 < c)
      b_new = b2;
    else
      b_new = 0.5 * (b1 + b2);

    const double db = b_new - b_;
    for (std::size_t i = 0; i < n_; ++i)
      error_[i] += d1 * kern(i1, i) + d2 * kern(i2, i) + db;

    alpha_[i1] = a1;
    alpha_[i2] = a2;
    b_ = b_new;
    ++steps_;
    if (diag_) diag_->objective_trace.push_back(dual_objective(prob_, params_.kernel, alpha_));
    return true;
  }

  // Dual objective restricted to the (i1, i2) constraint line, evaluated at
  // candidate a2 (a1 follows from the equality constraint). Constant terms
  // are shared by both endpoints, so they are dropped.
  double restricted_objective(std::size_t i1, std::size_t i2, double a2) const {
    const double alph1 = alpha_[i1];
    const double alph2 = alpha_[i2];
    const double y1 = prob_.labels[i1];
    const double y2 = prob_.labels[i2];
    const double s = y1 * y2;
    const double k11 = kern(i1, i1);
    const double k12 = kern(i1, i2);
    const double k22 = kern(i2, i2);
    // contribution of all other multipliers to f at x1, x2 (bias-free)
    const double u1 = error_[i1] + y1 - b_;
    const double u2 = error_[i2] + y2 - b_;
    const double v1 = u1 - y1 * alph1 * k11 - y2 * alph2 * k12;
    const double v2 = u2 - y1 * alph1 * k12 - y2 * alph2 * k22;
    const double gamma = alph1 + s * alph2;
    const double a1 = gamma - s * a2;
    return a1 + a2 - 0.5 * k11 * a1 * a1 - 0.5 * k22 * a2 * a2 - s * k12 * a1 * a2 -
           y1 * a1 * v1 - y2 * a2 * v2;
  }

  void record_pass() {
    if (!diag_) return;
    double residual = 0.0, bound = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      residual += alpha_[i] * prob_.labels[i];
      bound = std::max(bound, std::max(-alpha_[i], alpha_[i] - params_.c));
    }
    diag_->constraint_residual.push_back(std::fabs(residual));
    diag_->bound_violation.push_back(bound);
  }

  const SmoProblem& prob_;
  SmoParams params_;
  SmoDiagnostics* diag_;
  std::size_t n_;
  std::vector<double> alpha_;
  std::vector<double> error_;
  double b_ = 0.0;
  std::uint64_t steps_ = 0;
  SplitMix64 rng_;
};

} // namespace detail

inline SmoSolution solve_smo(const SmoProblem& prob, const SmoParams& params,
                             SmoDiagnostics* diagnostics = nullptr) {
  validate_smo_params(params);
  if (prob.points.empty()) throw std::invalid_argument("smo: empty problem");
  if (prob.points.size() != prob.labels.size())
    throw std::invalid_argument("smo: points/labels size mismatch");
  for (const std::vector<double>& x : prob.points) {
    if (x.size() != prob.points.front().size())
      throw std::invalid_argument("smo: inconsistent feature dimensions");
    for (double v : x)
      if (!std::isfinite(v)) throw std::invalid_argument("smo: non-finite feature value");
  }
  for (double y : prob.labels)
    if (y != 1.0 && y != -1.0) throw std::invalid_argument("smo: labels must be +1 or -1");
  detail::SmoSolver solver(prob, params, diagnostics);
  return solver.solve();
}

} // namespace gamemine
