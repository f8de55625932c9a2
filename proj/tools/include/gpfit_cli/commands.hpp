#pragma once

// Subcommands of the gpfit tool. Each one reads its files, does its work and
// writes results; errors are thrown and mapped to exit codes by exit_code().

#include <cstddef>
#include <cstdint>
#include <exception>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gpfit::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitNumerical = 3,
  kExitUnsupported = 4,
};

/// Input and domain problems -> 2, numerical breakdowns -> 3,
/// UnsupportedError -> 4.
int exit_code(const std::exception& e);

struct FitArgs {
  std::string data;
  /// When absent, the last column of `data` holds Y.
  std::optional<std::string> outputs;
  std::string model;
  /// n_candidates, n_best, n_clusters; defaults to 200d, 80d, 2d.
  std::optional<std::vector<std::size_t>> control;
  double nug_thres = 20.0;
  std::size_t maxit = 100;
  std::uint64_t seed = 0;
  bool trace = false;
  int digits = 4;
  /// Map the inputs' bounding box onto [0,1]^d and remember it in the model.
  bool rescale = false;
};

struct PredictArgs {
  std::string model;
  std::optional<std::string> xnew;
  /// Standard output when absent.
  std::optional<std::string> output;
};

struct GridArgs {
  std::string model;
  /// Same interval in every coordinate; [0,1] (or the stored input box) by default.
  std::optional<std::vector<double>> range;
  /// 100 for d = 1, 50 for d = 2.
  std::optional<std::size_t> resolution;
  std::string what = "response";
  std::optional<std::string> output;
};

struct SimulateArgs {
  std::string function;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::optional<std::string> output;
};

struct BenchArgs {
  std::string function;
  std::vector<std::size_t> sizes;
  std::size_t replicates = 10;
  std::uint64_t seed = 0;
  double nug_thres = 20.0;
  std::optional<std::string> csv;
};

void run_fit(const FitArgs& args, std::ostream& out, std::ostream& err);
void run_predict(const PredictArgs& args, std::ostream& out, std::ostream& err);
void run_grid(const GridArgs& args, std::ostream& out, std::ostream& err);
void run_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
void run_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);

}  // namespace gpfit::cli
