#pragma once

// Simulator test functions and the sRMSE comparison harness.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gpfit/common.hpp"
#include "gpfit/design.hpp"
#include "gpfit/optimizer.hpp"

namespace gpfit::bench {

/// log(x + 0.1) + sin(5 pi x) on [0, 1].
double example1(double x);

/// Goldstein-Price product formula at a native point of [-2, 2]^2.
double goldprice_native(const Vector& x);
/// Colville variant with the 19.8 (x4 - 1) / x2 term at a native point of
/// [-10, 10]^4. Throws DomainError at x2 == 0.
double colville_native(const Vector& x);
/// Hartmann-6 on [0, 1]^6 with the classical A, P and alpha constants.
double hartmann6(const Vector& x);

/// Unit-cube entry points (inputs mapped affinely onto the native box).
double goldprice(const Vector& unit);
double colville(const Vector& unit);

struct TestFunction {
  std::string name;
  Index dim = 0;
  Box native_box;
  /// Native-domain evaluator.
  std::function<double(const Vector&)> native;
  /// Global extremes over the native box, used to scale sRMSE.
  double y_min = 0.0;
  double y_max = 0.0;
  /// Power of ten used when tabulating sRMSE (1e-6 prints "x10^-6").
  double table_scale = 1.0;

  /// Evaluate at a point of [0, 1]^dim.
  double operator()(const Vector& unit) const;
};

/// "example1", "goldprice", "colville" or "hartmann6"; DomainError otherwise.
const TestFunction& test_function(std::string_view name);
std::vector<std::string> test_function_names();

/// Root mean squared error divided by (y_max - y_min). Throws DomainError
/// when y_max <= y_min and DimensionError on a length mismatch.
double srmse(const Vector& y_true, const Vector& y_pred, double y_max, double y_min);

struct ReplicateOutcome {
  std::size_t index = 0;
  double srmse = 0.0;  ///< NaN when failed
  bool failed = false;
  std::string error;
};

struct BenchResult {
  std::string function_name;
  std::size_t n = 0;
  std::size_t replicates = 0;
  double srmse_mean = 0.0;
  /// Standard error of the mean over successful replicates; 0 when fewer
  /// than two succeeded.
  double srmse_stderr = 0.0;
  /// Fewer than two successful replicates, so no spread estimate exists.
  bool degenerate_sample = false;
  std::size_t failures = 0;
  /// sRMSE of the successful replicates in replicate order.
  std::vector<double> per_replicate;
  std::vector<ReplicateOutcome> outcomes;
};

struct BenchOptions {
  std::size_t n = 10;
  std::size_t replicates = 10;
  std::uint64_t seed = 0;
  /// Defaults to MultistartPlan::defaults(fn.dim).
  std::optional<MultistartPlan> plan;
  double nug_thres = 20.0;
};

/// For each replicate: draw training and test maximin LHDs of size n, fit on
/// the training set, predict the test set and score it with sRMSE against the
/// function's global range. Replicate r uses seeds derived from
/// derive_seed(seed, r); failures are recorded, never thrown.
BenchResult run_benchmark(const TestFunction& fn, const BenchOptions& options);

/// Table with one "n = ..." row per result and "average (standard error)"
/// cells in units of fn.table_scale.
std::string format_bench_table(const TestFunction& fn, const std::vector<BenchResult>& results);

/// CSV with header function,n,replicate,srmse,failed.
std::string format_bench_csv(const std::vector<BenchResult>& results);

}  // namespace gpfit::bench
