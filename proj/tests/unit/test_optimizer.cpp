#include <doctest.h>

#include <cmath>
#include <random>

#include <gpfit/design.hpp>
#include <gpfit/errors.hpp>
#include <gpfit/optimizer.hpp>

#include "oracle.hpp"

using namespace gpfit;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

double rosenbrock(const Vector& x) {
  const double a = 1.0 - x[0];
  const double b = x[1] - x[0] * x[0];
  return a * a + 100.0 * b * b;
}

void check_path(const RunResult& r, const Box& box) {
  REQUIRE(!r.path.empty());
  CHECK(r.path.front().x == r.x0);
  for (std::size_t i = 0; i < r.path.size(); ++i) {
    CHECK(box.contains(r.path[i].x));
    if (i > 0) CHECK(r.path[i].f <= r.path[i - 1].f);
  }
  CHECK(r.path.back().x == r.x_opt);
  CHECK(r.path.back().f == r.f_opt);
}

}  // namespace

TEST_CASE("ObjectiveHandle counts every call") {
  const ObjectiveHandle f([](const Vector& x) { return x.sum(); });
  CHECK(f.evaluations() == 0);
  (void)f(vec({1.0}));
  (void)f(vec({2.0}));
  CHECK(f.evaluations() == 2);

  const ObjectiveHandle bad([](const Vector&) -> double { throw DomainError("nope"); });
  CHECK_THROWS_AS(bad(vec({1.0})), DomainError);
  CHECK(bad.evaluations() == 1);
}

TEST_CASE("numeric_gradient on linear and quadratic functions") {
  const Vector c = vec({1.5, -2.0, 0.25});
  const ObjectiveHandle lin([&](const Vector& x) { return c.dot(x); });
  const Vector g = numeric_gradient(lin, vec({0.3, 0.1, -0.7}));
  CHECK((g - c).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(lin.evaluations() == 6);

  const ObjectiveHandle sq([](const Vector& x) { return x.squaredNorm(); });
  const Vector gs = numeric_gradient(sq, vec({1.0, 2.0}), 1e-4);
  CHECK(gs[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(gs[1] == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(sq.evaluations() == 4);
}

TEST_CASE("numeric_gradient reports the failing probe") {
  const ObjectiveHandle f([](const Vector& x) { return x[0] > 1.00005 ? NAN : x[0]; });
  try {
    (void)numeric_gradient(f, vec({1.0}), 1e-4);
    FAIL("expected ObjectiveError");
  } catch (const ObjectiveError& e) {
    CHECK(e.probe()[0] == doctest::Approx(1.0001));
  }
  CHECK_THROWS_AS(numeric_gradient(f, vec({0.0}), 0.0), DomainError);
}

TEST_CASE("numeric_gradient matches Richardson extrapolation") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> ud(1, 5);
  for (int trial = 0; trial < 50; ++trial) {
    const Index d = ud(rng);
    Vector a(d), b(d), x(d);
    Matrix Q(d, d);
    for (Index k = 0; k < d; ++k) {
      a[k] = g(rng);
      b[k] = g(rng);
      x[k] = g(rng);
      for (Index j = 0; j < d; ++j) Q(k, j) = 0.3 * g(rng);
    }
    auto smooth = [=](const Vector& z) {
      return std::sin(a.dot(z)) + std::exp(0.2 * b.dot(z)) + 0.5 * z.dot(Q * z) + std::log(1.0 + z.squaredNorm());
    };
    const ObjectiveHandle f(smooth);
    const Vector ng = numeric_gradient(f, x);
    const Vector ref = oracle::richardson_gradient(smooth, x);
    CHECK((ng - ref).norm() <= 1e-4 * std::max(1.0, ref.norm()));
  }
}

TEST_CASE("lbfgsb on an interior quadratic") {
  const Vector c = vec({0.3, -1.2, 2.0});
  const ObjectiveHandle f([&](const Vector& x) { return (x - c).squaredNorm(); });
  const Box box = Box::uniform(3, -5.0, 5.0);
  const RunResult r = lbfgsb(f, vec({4.0, 4.0, -4.0}), box, 100);
  CHECK((r.x_opt - c).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(r.converged);
  CHECK(r.evals == f.evaluations());
  check_path(r, box);
}

TEST_CASE("lbfgsb clamps a separable quadratic onto the box") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector c = vec({u(rng), u(rng), u(rng)});
    const Vector w = vec({1.0, 3.0, 0.5});
    const ObjectiveHandle f([&](const Vector& x) { return (x - c).cwiseAbs2().dot(w); });
    const Box box = Box::uniform(3, -1.0, 1.0);
    const RunResult r = lbfgsb(f, vec({0.0, 0.0, 0.0}), box, 100);
    const Vector expect = box.clamp(c);
    CHECK((r.x_opt - expect).cwiseAbs().maxCoeff() <= 1e-6);
    check_path(r, box);

    // Grid search confirms the clamped point is the constrained minimum.
    double grid_best = 1e300;
    for (int i = 0; i <= 40; ++i) {
      for (int j = 0; j <= 40; ++j) {
        for (int k = 0; k <= 40; ++k) {
          grid_best = std::min(grid_best, f(vec({-1 + i / 20.0, -1 + j / 20.0, -1 + k / 20.0})));
        }
      }
    }
    CHECK(r.f_opt <= grid_best + 1e-9);
  }
}

TEST_CASE("lbfgsb solves Rosenbrock") {
  const ObjectiveHandle f(rosenbrock);
  const Box box = Box::uniform(2, -5.0, 5.0);
  const RunResult r = lbfgsb(f, vec({-1.2, 1.0}), box, 1000);
  CHECK(r.f_opt <= 1e-8);
  CHECK(std::abs(r.x_opt[0] - 1.0) <= 1e-3);
  CHECK(std::abs(r.x_opt[1] - 1.0) <= 1e-3);
  check_path(r, box);

  double local_best = 1e300;
  for (int i = -50; i <= 50; ++i) {
    for (int j = -50; j <= 50; ++j) local_best = std::min(local_best, rosenbrock(vec({1 + i * 1e-3, 1 + j * 1e-3})));
  }
  CHECK(local_best == 0.0);
}

TEST_CASE("lbfgsb respects maxit and its preconditions") {
  const ObjectiveHandle f(rosenbrock);
  const Box box = Box::uniform(2, -5.0, 5.0);
  const RunResult r = lbfgsb(f, vec({-1.2, 1.0}), box, 3);
  CHECK(r.iterations == 3);
  CHECK(r.reason == Termination::max_iterations);
  CHECK(!r.converged);
  CHECK(r.f_opt <= rosenbrock(vec({-1.2, 1.0})));

  CHECK_THROWS_AS(lbfgsb(f, vec({6.0, 0.0}), box, 10), DomainError);
  const ObjectiveHandle nan_f([](const Vector&) { return NAN; });
  CHECK_THROWS_AS(lbfgsb(nan_f, vec({0.0, 0.0}), box, 10), ObjectiveError);
}

TEST_CASE("lbfgsb stops at an active corner") {
  const ObjectiveHandle f([](const Vector& x) { return x[0] + 2.0 * x[1]; });
  const Box box = Box::uniform(2, 0.0, 1.0);
  const RunResult r = lbfgsb(f, vec({0.7, 0.4}), box, 100);
  CHECK(r.x_opt[0] == 0.0);
  CHECK(r.x_opt[1] == 0.0);
  CHECK(r.reason == Termination::gradient_tol);
}

TEST_CASE("MultistartPlan defaults and validation") {
  const MultistartPlan p = MultistartPlan::defaults(3);
  CHECK(p.n_candidates == 600);
  CHECK(p.n_best == 240);
  CHECK(p.n_clusters == 6);
  CHECK(p.maxit == 100);
  CHECK_NOTHROW(p.validate());

  MultistartPlan bad = p;
  bad.n_best = 700;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = p;
  bad.n_clusters = 300;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = p;
  bad.maxit = 0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

namespace {

double bumpy(const Vector& x) {
  double s = 0.0;
  for (Index k = 0; k < x.size(); ++k) s += (x[k] - 0.4) * (x[k] - 0.4) + 0.3 * std::sin(3.0 * x[k]);
  return s;
}

}  // namespace

TEST_CASE("multistart accounting and structure") {
  for (Index d = 1; d <= 3; ++d) {
    const ObjectiveHandle f(bumpy);
    const MultistartResult res = multistart_minimize(f, omega0(d), MultistartPlan::defaults(d), 42);
    const MultistartReport& rep = res.report;

    CHECK(rep.candidate_count == static_cast<std::size_t>(200 * d));
    CHECK(rep.start_points.size() == static_cast<std::size_t>(d == 1 ? 2 : 2 * d + 1));
    CHECK(rep.per_run.size() == rep.start_points.size());
    CHECK(rep.diagonal_runs.size() == static_cast<std::size_t>(d == 1 ? 0 : 3));
    CHECK(rep.diagonal_result.has_value() == (d >= 2));

    std::uint64_t sum = rep.candidate_count;
    for (const RunResult& r : rep.per_run) sum += r.evals;
    for (const RunResult& r : rep.diagonal_runs) sum += r.evals;
    CHECK(rep.total_evaluations == sum);
    CHECK(rep.total_evaluations == f.evaluations());

    CHECK(res.best.f_opt <= rep.best_candidate_value);
    CHECK(res.best.f_opt == f(res.best.x_opt));
    for (const RunResult& r : rep.per_run) {
      check_path(r, final_search_box(d));
      CHECK(res.best.f_opt <= r.f_opt);
    }
    for (const RunResult& r : rep.diagonal_runs) {
      for (const Iterate& it : r.path) {
        CHECK(it.x[0] >= omega0(d).lower()[0]);
        CHECK(it.x[0] <= omega0(d).upper()[0]);
      }
    }
  }
}

TEST_CASE("multistart is deterministic in its seed") {
  const ObjectiveHandle f1(bumpy);
  const ObjectiveHandle f2(bumpy);
  const MultistartResult a = multistart_minimize(f1, omega0(2), MultistartPlan::defaults(2), 9);
  const MultistartResult b = multistart_minimize(f2, omega0(2), MultistartPlan::defaults(2), 9);
  CHECK(a.best.x_opt == b.best.x_opt);
  CHECK(a.best.f_opt == b.best.f_opt);
  CHECK(a.report.total_evaluations == b.report.total_evaluations);
  REQUIRE(a.report.start_points.size() == b.report.start_points.size());
  for (std::size_t i = 0; i < a.report.start_points.size(); ++i) {
    CHECK(a.report.start_points[i] == b.report.start_points[i]);
  }
}

TEST_CASE("multistart keeps counting through failed runs") {
  // The first evaluation after the candidate phase throws, so the first
  // optimizer run dies at its starting point and the others proceed.
  std::uint64_t calls = 0;
  const ObjectiveHandle f([&calls](const Vector& x) {
    ++calls;
    if (calls == 201) throw DomainError("outside the model's support");
    return (x.array() + 1.0).square().sum();
  });
  const MultistartResult res = multistart_minimize(f, omega0(1), MultistartPlan::defaults(1), 3);
  std::uint64_t sum = res.report.candidate_count;
  for (const RunResult& r : res.report.per_run) sum += r.evals;
  for (const RunResult& r : res.report.diagonal_runs) sum += r.evals;
  CHECK(res.report.total_evaluations == sum);
  CHECK(res.report.total_evaluations == f.evaluations());
  CHECK(res.best.f_opt <= res.report.best_candidate_value);
  REQUIRE(!res.report.failures.empty());
  CHECK(res.report.per_run.front().failed);
  CHECK(res.report.per_run.front().evals >= 1);
  CHECK(res.best.f_opt == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("multistart fails loudly when nothing can be evaluated") {
  const ObjectiveHandle f([](const Vector&) -> double { throw DomainError("always"); });
  CHECK_THROWS_AS(multistart_minimize(f, omega0(1), MultistartPlan::defaults(1), 0), OptimizationError);
}
