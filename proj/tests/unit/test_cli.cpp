#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <gpfit/bench.hpp>
#include <gpfit/design.hpp>
#include <gpfit/errors.hpp>
#include <gpfit/gp.hpp>
#include <gpfit_cli/commands.hpp>
#include <gpfit_cli/io.hpp>
#include <gpfit_cli/model_file.hpp>

using namespace gpfit;
using namespace gpfit::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("gpfit_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run_tool(const TempDir& dir, const std::string& args) {
  const std::string out = dir / "stdout.txt";
  const std::string err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + GPFIT_EXE + "\" " + args + " > \"" + out + "\" 2> \"" + err + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream o(out), e(err);
  std::stringstream so, se;
  so << o.rdbuf();
  se << e.rdbuf();
  r.out = so.str();
  r.err = se.str();
  return r;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

void write(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  f << text;
}

CsvTable parse(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in, "memory.csv");
}

}  // namespace

TEST_CASE("CSV parsing") {
  const CsvTable a = parse("x1,x2,y\n0.1,0.2,3\n0.5,0.6,-1e-3\n");
  CHECK(a.header == std::vector<std::string>{"x1", "x2", "y"});
  CHECK(a.values.rows() == 2);
  CHECK(a.values(1, 2) == -1e-3);

  const CsvTable b = parse("0.1, 0.2\n\n0.3,0.4\n");
  CHECK(b.header.empty());
  CHECK(b.values.rows() == 2);
  CHECK(b.values(1, 1) == 0.4);

  try {
    parse("x,y\n1,2\n3\n");
    FAIL("expected InputError");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("memory.csv") != std::string::npos);
    CHECK(msg.find("3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("1,2\n3,abc\n"), InputError);
  CHECK_THROWS_AS(parse(""), InputError);
  CHECK_THROWS_AS(read_csv("/nonexistent/file.csv"), InputError);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.302585092994046, 1e-300, 6.02e23}) {
    CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
  }
  CHECK(parse_number_list("1, 2.5,3", "--x") == std::vector<double>{1.0, 2.5, 3.0});
  CHECK_THROWS_AS(parse_number_list("1,,3", "--x"), InputError);
}

TEST_CASE("model files restore every field bit for bit") {
  const DesignMatrix X = maximin_lhd(9, 2, 4);
  Vector Y(9);
  for (Index i = 0; i < 9; ++i) Y[i] = bench::goldprice(X.row(i).transpose());
  FitOptions o;
  o.seed = 17;
  const FitResult r = fit(X, Y, o);
  ModelFile mf{r.model, 17, MultistartPlan::defaults(2), r.report.total_evaluations,
               Box(Vector::Constant(2, -2.0), Vector::Constant(2, 2.0))};

  std::istringstream in(serialize_model(mf));
  const ModelFile back = parse_model(in, "model.txt");
  CHECK(back.model.X() == r.model.X());
  CHECK(back.model.Y() == r.model.Y());
  CHECK(back.model.beta_hat().beta() == r.model.beta_hat().beta());
  CHECK(back.model.mu_hat() == r.model.mu_hat());
  CHECK(back.model.sigma2_hat() == r.model.sigma2_hat());
  CHECK(back.model.delta_lb() == r.model.delta_lb());
  CHECK(back.model.nug_thres() == r.model.nug_thres());
  CHECK(back.model.deviance_at_fit() == r.model.deviance_at_fit());
  CHECK(back.seed == 17);
  CHECK(back.plan.n_candidates == 400);
  CHECK(back.total_evaluations == r.report.total_evaluations);
  REQUIRE(back.input_box.has_value());
  CHECK(back.input_box->lower() == mf.input_box->lower());

  const Prediction p1 = predict(r.model);
  const Prediction p2 = predict(back.model);
  CHECK(p1.y_hat == p2.y_hat);
  CHECK(p1.mse == p2.mse);
}

TEST_CASE("model file errors name the line") {
  std::istringstream bad_version("schema_version = 7\n");
  CHECK_THROWS_AS(parse_model(bad_version, "m.txt"), InputError);
  std::istringstream garbage("schema_version = 1\nn = 2\nthis line is nonsense\n");
  try {
    parse_model(garbage, "m.txt");
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("m.txt") != std::string::npos);
  }
}

TEST_CASE("exit codes") {
  CHECK(exit_code(InputError("x")) == 2);
  CHECK(exit_code(DimensionError("x")) == 2);
  CHECK(exit_code(DomainError("x")) == 2);
  CHECK(exit_code(UnsupportedError("x")) == 4);
  CHECK(exit_code(DegenerateOutputError("x")) == 3);
  CHECK(exit_code(OptimizationError("x")) == 3);
}

TEST_CASE("simulate, fit, predict and grid through the executable") {
  TempDir dir;
  Run sim = run_tool(dir, "simulate goldprice 15 --seed 3 -o \"" + (dir / "gp.csv") + "\"");
  REQUIRE(sim.code == 0);
  const CsvTable data = read_csv(dir / "gp.csv");
  CHECK(data.header == std::vector<std::string>{"x1", "x2", "y"});
  CHECK(data.values.rows() == 15);

  Run f = run_tool(dir, "fit \"" + (dir / "gp.csv") + "\" -m \"" + (dir / "gp.model") + "\" --seed 5");
  REQUIRE(f.code == 0);
  CHECK(f.out.find("Number Of Observations: n = 15") != std::string::npos);
  CHECK(f.err.find("deviance evaluations:") != std::string::npos);

  Run p = run_tool(dir, "predict \"" + (dir / "gp.model") + "\"");
  REQUIRE(p.code == 0);
  const CsvTable pred = parse(p.out);
  CHECK(pred.header == std::vector<std::string>{"xnew.1", "xnew.2", "Y_hat", "MSE"});
  CHECK(pred.values.rows() == 15);
  const ModelFile mf = load_model(dir / "gp.model");
  const double range = data.values.col(2).maxCoeff() - data.values.col(2).minCoeff();
  if (mf.model.delta_lb() == 0.0) {
    CHECK((pred.values.col(2) - data.values.col(2)).cwiseAbs().maxCoeff() <= 1e-8 * range);
  }

  Run g = run_tool(dir, "grid \"" + (dir / "gp.model") + "\" --resolution 7");
  REQUIRE(g.code == 0);
  CHECK(count_lines(g.out) == 1 + 49);
  CHECK(g.out.rfind("x1,x2,value", 0) == 0);

  Run gm = run_tool(dir, "grid \"" + (dir / "gp.model") + "\" --what mse --range 0.2,0.4 --resolution 3");
  REQUIRE(gm.code == 0);
  const CsvTable gmt = parse(gm.out);
  CHECK(gmt.values.rows() == 9);
  CHECK(gmt.values(0, 0) == 0.2);
  CHECK(gmt.values(8, 1) == 0.4);
  CHECK(gmt.values.col(2).minCoeff() >= 0.0);

  write(dir / "xnew.csv", "a,b\n0.1,0.9\n0.5,0.5\n");
  Run px = run_tool(dir, "predict \"" + (dir / "gp.model") + "\" \"" + (dir / "xnew.csv") + "\" -o \"" +
                             (dir / "pred.csv") + "\"");
  REQUIRE(px.code == 0);
  CHECK(read_csv(dir / "pred.csv").values.rows() == 2);
}

TEST_CASE("one-dimensional grid columns and rescaled inputs") {
  TempDir dir;
  write(dir / "d.csv", "x,y\n10,1\n12,4\n15,2\n17,0.5\n20,3\n");
  Run f = run_tool(dir, "fit \"" + (dir / "d.csv") + "\" -m \"" + (dir / "d.model") + "\" --rescale");
  REQUIRE(f.code == 0);
  Run g = run_tool(dir, "grid \"" + (dir / "d.model") + "\" --resolution 11");
  REQUIRE(g.code == 0);
  const CsvTable t = parse(g.out);
  CHECK(t.header == std::vector<std::string>{"x", "y_hat", "lower", "upper"});
  CHECK(t.values.rows() == 11);
  CHECK(t.values(0, 0) == 10.0);
  CHECK(t.values(10, 0) == 20.0);
  for (Index i = 0; i < t.values.rows(); ++i) CHECK(t.values(i, 2) <= t.values(i, 3));

  Run p = run_tool(dir, "predict \"" + (dir / "d.model") + "\"");
  REQUIRE(p.code == 0);
  const CsvTable pt = parse(p.out);
  CHECK(pt.values(0, 0) == doctest::Approx(10.0));
  CHECK(pt.values(4, 0) == doctest::Approx(20.0));

  Run unscaled = run_tool(dir, "fit \"" + (dir / "d.csv") + "\" -m \"" + (dir / "e.model") + "\"");
  CHECK(unscaled.code == 2);
  CHECK(unscaled.err.find("[0,1]") != std::string::npos);
}

TEST_CASE("error exits") {
  TempDir dir;
  write(dir / "const.csv", "x,y\n0.1,1\n0.5,1\n0.9,1\n");
  CHECK(run_tool(dir, "fit \"" + (dir / "const.csv") + "\" -m \"" + (dir / "c.model") + "\"").code == 3);
  CHECK(!fs::exists(dir / "c.model"));

  write(dir / "one.csv", "x\n0.1\n0.5\n");
  const Run missing = run_tool(dir, "fit \"" + (dir / "one.csv") + "\" -m \"" + (dir / "c.model") + "\"");
  CHECK(missing.code == 2);
  CHECK(missing.err.find("missing Y column") != std::string::npos);

  CHECK(run_tool(dir, "fit \"" + (dir / "nope.csv") + "\" -m \"" + (dir / "c.model") + "\"").code == 2);
  CHECK(run_tool(dir, "simulate branin 5").code == 2);
  CHECK(run_tool(dir, "bogus").code == 2);

  REQUIRE(run_tool(dir, "simulate hartmann6 12 -o \"" + (dir / "h.csv") + "\"").code == 0);
  REQUIRE(run_tool(dir, "fit \"" + (dir / "h.csv") + "\" -m \"" + (dir / "h.model") + "\" --control 60,24,2").code ==
          0);
  CHECK(run_tool(dir, "grid \"" + (dir / "h.model") + "\"").code == 4);
  CHECK(run_tool(dir, "fit \"" + (dir / "h.csv") + "\" -m \"" + (dir / "x.model") + "\" --control 5,9,1").code == 2);
}

TEST_CASE("bench through the executable is deterministic") {
  TempDir dir;
  const std::string args = "bench example1 --sizes 6,8 --replicates 3 --seed 2 --csv \"" + (dir / "b.csv") + "\"";
  const Run a = run_tool(dir, args);
  REQUIRE(a.code == 0);
  std::ifstream f1(dir / "b.csv");
  std::stringstream c1;
  c1 << f1.rdbuf();
  const Run b = run_tool(dir, args);
  REQUIRE(b.code == 0);
  std::ifstream f2(dir / "b.csv");
  std::stringstream c2;
  c2 << f2.rdbuf();
  CHECK(a.out == b.out);
  CHECK(c1.str() == c2.str());
  CHECK(a.out.find("n = 6") != std::string::npos);
  CHECK(a.out.find("n = 8") != std::string::npos);
  CHECK(count_lines(c1.str()) == 1 + 6);
}
