#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gpfit/common.hpp"
#include "gpfit/design.hpp"

namespace gpfit {

/// Scalar objective with an evaluation counter. The counter is bumped once
/// per call, before the call, so evaluations that throw are still counted.
class ObjectiveHandle {
 public:
  using Function = std::function<double(const Vector&)>;

  explicit ObjectiveHandle(Function fn) : fn_(std::move(fn)) {}
  ObjectiveHandle(const ObjectiveHandle&) = delete;
  ObjectiveHandle& operator=(const ObjectiveHandle&) = delete;

  double operator()(const Vector& x) const {
    count_.fetch_add(1, std::memory_order_relaxed);
    return fn_(x);
  }
  std::uint64_t evaluations() const { return count_.load(std::memory_order_relaxed); }

 private:
  Function fn_;
  mutable std::atomic<std::uint64_t> count_{0};
};

/// Central differences (f(x + h e_k) - f(x - h e_k)) / 2h; exactly 2d
/// evaluations. Throws ObjectiveError carrying the probe point when a value
/// is not finite.
Vector numeric_gradient(const ObjectiveHandle& f, const Vector& x, double h = 1e-4);

enum class Termination {
  gradient_tol,        ///< projected gradient small
  function_tol,        ///< relative decrease below tolerance
  max_iterations,
  line_search_failure  ///< no acceptable step even along steepest descent
};

std::string to_string(Termination t);

struct Iterate {
  Vector x;
  double f = 0.0;
};

struct RunResult {
  Vector x0;
  Vector x_opt;
  double f_opt = 0.0;
  std::uint64_t evals = 0;
  std::size_t iterations = 0;
  bool converged = false;
  Termination reason = Termination::max_iterations;
  /// Accepted iterates, starting with x0.
  std::vector<Iterate> path;
  /// Set by the multi-start driver when the run threw; `error` holds the
  /// reason and f_opt is +inf.
  bool failed = false;
  std::string error;
};

struct LbfgsbOptions {
  std::size_t memory = 6;        ///< stored correction pairs
  double gradient_step = 1e-4;   ///< central-difference step
  double pgtol = 1e-6;           ///< ||proj grad||_inf <= pgtol * max(1, |f|)
  double ftol = 1e-10;           ///< relative decrease threshold
  double armijo = 1e-4;          ///< sufficient-decrease constant c1
  std::size_t max_backtracks = 30;
};

/// Bound-constrained limited-memory BFGS (L-BFGS-B): generalized Cauchy
/// point along the projected gradient path, subspace minimization over the
/// free variables, and a backtracking Armijo line search inside the box.
/// Gradients come from numeric_gradient. Throws ObjectiveError when the
/// objective is not finite at x0 and DomainError when x0 is outside the box.
RunResult lbfgsb(const ObjectiveHandle& f, const Vector& x0, const Box& bounds, std::size_t maxit,
                 const LbfgsbOptions& options = {});

/// The control triple plus maxit.
struct MultistartPlan {
  std::size_t n_candidates = 0;
  std::size_t n_best = 0;
  std::size_t n_clusters = 0;
  std::size_t maxit = 100;

  /// (200d, 80d, 2d), maxit 100.
  static MultistartPlan defaults(Index d);
  /// Throws DomainError unless 1 <= n_clusters <= n_best <= n_candidates and maxit >= 1.
  void validate() const;
};

struct MultistartReport {
  std::uint64_t seed = 0;
  std::size_t candidate_count = 0;
  double best_candidate_value = 0.0;
  Vector best_candidate;
  /// Starting points of the final runs: cluster centers, then the diagonal point.
  std::vector<Vector> start_points;
  std::vector<RunResult> per_run;
  /// The three 1-D runs along beta_1 = ... = beta_d (empty for d = 1).
  std::vector<RunResult> diagonal_runs;
  /// Best diagonal run, expressed in the full d-dimensional space.
  std::optional<RunResult> diagonal_result;
  /// Reasons of final runs that threw.
  std::vector<std::string> failures;
  /// Set when every final run ended above the best candidate, in which case
  /// that candidate is returned as the optimum.
  bool candidate_returned = false;
  /// candidate_count + sum per_run evals + sum diagonal_runs evals.
  std::uint64_t total_evaluations = 0;
};

struct MultistartOptions {
  /// Box for the final runs; defaults to [-10, 10]^d.
  std::optional<Box> final_box;
  std::size_t kmeans_restarts = 5;
  LbfgsbOptions lbfgsb;
  /// Per-run summaries are written here when set.
  std::ostream* trace = nullptr;
};

struct MultistartResult {
  RunResult best;
  MultistartReport report;
};

/// Candidate LHD in omega0, keep the n_best lowest, k-means them to
/// n_clusters starts, add the best of three diagonal runs when d >= 2, run
/// L-BFGS-B from every start over the final box and return the lowest
/// optimum (ties broken by lexicographically smallest x).
MultistartResult multistart_minimize(const ObjectiveHandle& f, const Box& omega0, const MultistartPlan& plan,
                                     std::uint64_t seed, const MultistartOptions& options = {});

/// Box used for the final runs: [-10, 10]^d.
Box final_search_box(Index d);

}  // namespace gpfit
