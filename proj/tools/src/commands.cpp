#include "gpfit_cli/commands.hpp"

#include <cmath>
#include <ostream>

#include <gpfit/bench.hpp>
#include <gpfit/design.hpp>
#include <gpfit/errors.hpp>
#include <gpfit/gp.hpp>

#include "gpfit_cli/io.hpp"
#include "gpfit_cli/model_file.hpp"

namespace gpfit::cli {

int exit_code(const std::exception& e) {
  if (dynamic_cast<const UnsupportedError*>(&e)) return kExitUnsupported;
  if (dynamic_cast<const InputError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
      dynamic_cast<const DomainError*>(&e)) {
    return kExitInput;
  }
  return kExitNumerical;
}

namespace {

void emit(const std::optional<std::string>& path, const std::string& content, std::ostream& out) {
  if (path) {
    write_file_atomic(*path, content);
  } else {
    out << content;
  }
}

std::vector<std::string> numbered(const std::string& prefix, Index count) {
  std::vector<std::string> names;
  for (Index k = 0; k < count; ++k) names.push_back(prefix + std::to_string(k + 1));
  return names;
}

Box bounding_box(const DesignMatrix& X, const std::string& source) {
  const Vector lo = X.colwise().minCoeff().transpose();
  const Vector hi = X.colwise().maxCoeff().transpose();
  for (Index k = 0; k < X.cols(); ++k) {
    if (!(lo[k] < hi[k])) {
      throw DomainError(source + ": input column " + std::to_string(k + 1) + " is constant and cannot be rescaled");
    }
  }
  return Box(lo, hi);
}

DesignMatrix to_unit(const DesignMatrix& X, const std::optional<Box>& box) {
  return box ? scale_to_unit(X, *box) : X;
}

DesignMatrix to_native(const DesignMatrix& U, const std::optional<Box>& box) {
  return box ? scale_to_box(U, *box) : U;
}

void report_prediction_diagnostics(const Prediction& p, std::ostream& err) {
  if (p.extrapolated > 0) {
    err << "warning: " << p.extrapolated << " query point(s) lie outside the fitted input domain\n";
  }
  if (p.clamped > 0) err << "note: " << p.clamped << " negative MSE value(s) from round-off set to 0\n";
}

}  // namespace

void run_fit(const FitArgs& args, std::ostream& out, std::ostream& err) {
  const CsvTable data = read_csv(args.data);
  DesignMatrix X;
  Vector Y;
  if (args.outputs) {
    const CsvTable ys = read_csv(*args.outputs);
    if (ys.values.cols() != 1) {
      throw InputError(*args.outputs + ": expected a single output column, found " +
                       std::to_string(ys.values.cols()));
    }
    if (ys.values.rows() != data.values.rows()) {
      throw InputError(*args.outputs + ": has " + std::to_string(ys.values.rows()) + " rows but " + args.data +
                       " has " + std::to_string(data.values.rows()));
    }
    X = data.values;
    Y = ys.values.col(0);
  } else {
    if (data.values.cols() < 2) {
      throw InputError(args.data + ": missing Y column (expected input columns followed by the output)");
    }
    X = data.values.leftCols(data.values.cols() - 1);
    Y = data.values.col(data.values.cols() - 1);
  }

  std::optional<Box> box;
  if (args.rescale) {
    box = bounding_box(X, args.data);
    X = scale_to_unit(X, *box);
  }

  const Index d = X.cols();
  MultistartPlan plan = MultistartPlan::defaults(d);
  if (args.control) {
    if (args.control->size() != 3) throw InputError("--control takes three counts: n_candidates,n_best,n_clusters");
    plan.n_candidates = (*args.control)[0];
    plan.n_best = (*args.control)[1];
    plan.n_clusters = (*args.control)[2];
  }
  plan.maxit = args.maxit;
  plan.validate();

  FitOptions opts;
  opts.plan = plan;
  opts.nug_thres = args.nug_thres;
  opts.seed = args.seed;
  opts.trace = args.trace ? &err : nullptr;

  const FitResult result = fit(X, Y, opts);
  for (const std::string& w : result.warnings) err << "warning: " << w << '\n';
  for (const std::string& f : result.report.failures) err << "warning: optimizer run failed: " << f << '\n';

  save_model(args.model, ModelFile{result.model, args.seed, plan, result.report.total_evaluations, box});

  out << format_summary(result.model, args.digits);
  if (!args.trace) err << "deviance evaluations: " << result.report.total_evaluations << '\n';
}

void run_predict(const PredictArgs& args, std::ostream& out, std::ostream& err) {
  const ModelFile mf = load_model(args.model);
  const GpModel& model = mf.model;

  DesignMatrix native;
  if (args.xnew) {
    native = read_csv(*args.xnew).values;
    if (native.cols() != model.d()) {
      throw DimensionError(*args.xnew + ": has " + std::to_string(native.cols()) + " columns, the model has d = " +
                           std::to_string(model.d()));
    }
  } else {
    native = to_native(model.X(), mf.input_box);
  }

  const Prediction p = predict(model, args.xnew ? to_unit(native, mf.input_box) : model.X());
  report_prediction_diagnostics(p, err);

  Matrix table(native.rows(), model.d() + 2);
  table << native, p.y_hat, p.mse;
  std::vector<std::string> header = numbered("xnew.", model.d());
  header.push_back("Y_hat");
  header.push_back("MSE");
  emit(args.output, to_csv(header, table), out);
}

void run_grid(const GridArgs& args, std::ostream& out, std::ostream& err) {
  if (args.what != "response" && args.what != "mse") {
    throw InputError("--what must be 'response' or 'mse', got '" + args.what + "'");
  }
  const ModelFile mf = load_model(args.model);
  const GpModel& model = mf.model;
  const Index d = model.d();
  if (d > 2) {
    throw UnsupportedError("grid output is only available for d <= 2; this model has d = " + std::to_string(d));
  }

  Box native_range = mf.input_box.value_or(Box::uniform(d, 0.0, 1.0));
  if (args.range) {
    if (args.range->size() != 2) throw InputError("--range takes two numbers: lower,upper");
    native_range = Box::uniform(d, (*args.range)[0], (*args.range)[1]);
  }
  const std::size_t resolution = args.resolution.value_or(d == 1 ? 100 : 50);

  DesignMatrix corners(2, d);
  corners.row(0) = native_range.lower().transpose();
  corners.row(1) = native_range.upper().transpose();
  const DesignMatrix unit_corners = to_unit(corners, mf.input_box);
  const Box unit_range(unit_corners.row(0).transpose(), unit_corners.row(1).transpose());

  const Prediction p = grid_predict(model, unit_range, resolution);
  report_prediction_diagnostics(p, err);
  const DesignMatrix grid = to_native(p.inputs, mf.input_box);

  std::vector<std::string> header;
  Matrix table;
  if (d == 1 && args.what == "response") {
    header = {"x", "y_hat", "lower", "upper"};
    const Vector s = p.mse.cwiseSqrt();
    table.resize(grid.rows(), 4);
    table << grid.col(0), p.y_hat, p.y_hat - 2.0 * s, p.y_hat + 2.0 * s;
  } else if (d == 1) {
    header = {"x", "mse"};
    table.resize(grid.rows(), 2);
    table << grid.col(0), p.mse;
  } else {
    header = {"x1", "x2", "value"};
    table.resize(grid.rows(), 3);
    table << grid, (args.what == "response" ? p.y_hat : p.mse);
  }
  emit(args.output, to_csv(header, table), out);
}

void run_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& /*err*/) {
  const bench::TestFunction& fn = bench::test_function(args.function);
  const DesignMatrix X = maximin_lhd(static_cast<Index>(args.n), fn.dim, args.seed);
  Matrix table(X.rows(), fn.dim + 1);
  table.leftCols(fn.dim) = X;
  for (Index i = 0; i < X.rows(); ++i) table(i, fn.dim) = fn(X.row(i).transpose());
  std::vector<std::string> header = numbered("x", fn.dim);
  header.push_back("y");
  emit(args.output, to_csv(header, table), out);
}

void run_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  const bench::TestFunction& fn = bench::test_function(args.function);
  if (args.sizes.empty()) throw InputError("--sizes needs at least one sample size");
  for (const std::size_t n : args.sizes) {
    if (n < 2) throw DomainError("sample size " + std::to_string(n) + " is below 2");
  }

  std::vector<bench::BenchResult> results;
  for (const std::size_t n : args.sizes) {
    bench::BenchOptions opts;
    opts.n = n;
    opts.replicates = args.replicates;
    opts.seed = args.seed;
    opts.nug_thres = args.nug_thres;
    results.push_back(bench::run_benchmark(fn, opts));
    for (const bench::ReplicateOutcome& o : results.back().outcomes) {
      if (o.failed) err << "warning: n = " << n << " replicate " << o.index << " failed: " << o.error << '\n';
    }
  }
  out << bench::format_bench_table(fn, results);
  if (args.csv) write_file_atomic(*args.csv, bench::format_bench_csv(results));
}

}  // namespace gpfit::cli
