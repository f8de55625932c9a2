// gpfit: fit, query and benchmark Gaussian-process emulators from the shell.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gpfit_cli/commands.hpp"
#include "gpfit_cli/io.hpp"

namespace cli = gpfit::cli;

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-process emulators for deterministic simulators"};
  app.require_subcommand(1);

  cli::FitArgs fit;
  std::string control;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model to a design and its outputs");
  fit_cmd->add_option("data", fit.data, "CSV of inputs (last column is Y unless --outputs is given)")->required();
  fit_cmd->add_option("--outputs", fit.outputs, "CSV holding the output column");
  fit_cmd->add_option("-m,--model", fit.model, "Model file to write")->required();
  fit_cmd->add_option("--control", control, "n_candidates,n_best,n_clusters (default 200d,80d,2d)");
  fit_cmd->add_option("--nug-thres", fit.nug_thres, "Condition-number exponent a, kappa <= e^a")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--maxit", fit.maxit, "L-BFGS-B iterations per run")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("--seed", fit.seed, "Random seed")->capture_default_str();
  fit_cmd->add_flag("--trace", fit.trace, "Print per-run optimizer summaries to stderr");
  fit_cmd->add_option("--digits", fit.digits, "Significant digits in the summary")
      ->capture_default_str()
      ->check(CLI::Range(1, 17));
  fit_cmd->add_flag("--rescale", fit.rescale, "Map the inputs' bounding box onto [0,1]^d");

  cli::PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Predict at new inputs (training design by default)");
  predict_cmd->add_option("model", predict.model, "Model file")->required();
  predict_cmd->add_option("xnew", predict.xnew, "CSV of query points");
  predict_cmd->add_option("-o,--output", predict.output, "Output CSV (stdout by default)");

  cli::GridArgs grid;
  std::string range;
  auto* grid_cmd = app.add_subcommand("grid", "Plot-ready predictions on a regular grid (d <= 2)");
  grid_cmd->add_option("model", grid.model, "Model file")->required();
  grid_cmd->add_option("--range", range, "lower,upper applied to every coordinate");
  grid_cmd->add_option("--resolution", grid.resolution, "Points per axis (100 for d = 1, 50 for d = 2)")
      ->check(CLI::Range(2, 100000));
  grid_cmd->add_option("--what", grid.what, "response or mse")->capture_default_str();
  grid_cmd->add_option("-o,--output", grid.output, "Output CSV (stdout by default)");

  cli::SimulateArgs simulate;
  auto* simulate_cmd = app.add_subcommand("simulate", "Evaluate a test function on a maximin LHD");
  simulate_cmd->add_option("function", simulate.function, "example1, goldprice, colville or hartmann6")
      ->required();
  simulate_cmd->add_option("n", simulate.n, "Number of design points")->required();
  simulate_cmd->add_option("--seed", simulate.seed, "Random seed")->capture_default_str();
  simulate_cmd->add_option("-o,--output", simulate.output, "Output CSV (stdout by default)");

  cli::BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "sRMSE over replicated train/test maximin designs");
  bench_cmd->add_option("function", bench.function, "example1, goldprice, colville or hartmann6")->required();
  bench_cmd->add_option("--sizes", bench.sizes, "Comma-separated sample sizes")->delimiter(',')->required();
  bench_cmd->add_option("--replicates", bench.replicates, "Replicates per size")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed, "Master seed")->capture_default_str();
  bench_cmd->add_option("--nug-thres", bench.nug_thres, "Condition-number exponent a")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--csv", bench.csv, "Per-replicate CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitInput;
  }

  try {
    if (*fit_cmd) {
      if (!control.empty()) {
        std::vector<std::size_t> counts;
        for (const double v : cli::parse_number_list(control, "--control")) {
          if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
            throw cli::InputError("--control entries must be positive integers");
          }
          counts.push_back(static_cast<std::size_t>(v));
        }
        fit.control = counts;
      }
      cli::run_fit(fit, std::cout, std::cerr);
    } else if (*predict_cmd) {
      cli::run_predict(predict, std::cout, std::cerr);
    } else if (*grid_cmd) {
      if (!range.empty()) grid.range = cli::parse_number_list(range, "--range");
      cli::run_grid(grid, std::cout, std::cerr);
    } else if (*simulate_cmd) {
      cli::run_simulate(simulate, std::cout, std::cerr);
    } else if (*bench_cmd) {
      cli::run_bench(bench, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "gpfit: error: " << e.what() << '\n';
    return cli::exit_code(e);
  }
  return cli::kExitOk;
}
