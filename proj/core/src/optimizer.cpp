#include "gpfit/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "gpfit/cluster.hpp"
#include "gpfit/errors.hpp"

namespace gpfit {

std::string to_string(Termination t) {
  switch (t) {
    case Termination::gradient_tol:
      return "gradient_tol";
    case Termination::function_tol:
      return "function_tol";
    case Termination::max_iterations:
      return "max_iterations";
    case Termination::line_search_failure:
      return "line_search_failure";
  }
  return "unknown";
}

namespace {

std::string format_point(const Vector& x) {
  std::ostringstream os;
  os.precision(6);
  os << '(';
  for (Index k = 0; k < x.size(); ++k) os << (k ? ", " : "") << x[k];
  os << ')';
  return os.str();
}

double checked_eval(const ObjectiveHandle& f, const Vector& x) {
  const double v = f(x);
  if (!std::isfinite(v)) throw ObjectiveError("objective is not finite at " + format_point(x), x);
  return v;
}

}  // namespace

Vector numeric_gradient(const ObjectiveHandle& f, const Vector& x, double h) {
  if (!(h > 0.0)) throw DomainError("gradient step must be positive");
  if (!x.allFinite()) throw DomainError("gradient requested at a non-finite point");
  Vector g(x.size());
  Vector probe = x;
  for (Index k = 0; k < x.size(); ++k) {
    probe[k] = x[k] + h;
    const double fp = checked_eval(f, probe);
    probe[k] = x[k] - h;
    const double fm = checked_eval(f, probe);
    probe[k] = x[k];
    g[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

namespace {

// Dense limited-memory BFGS matrix: m BFGS updates of theta * I with the
// stored pairs, theta = y'y / s'y of the newest pair. Algebraically equal
// to the compact form theta I - W M W'; the problems solved here have a
// handful of variables, so the dense form is the simpler choice.
class LbfgsMatrix {
 public:
  LbfgsMatrix(Index n, std::size_t memory) : n_(n), memory_(memory) {}

  void clear() {
    s_.clear();
    y_.clear();
  }
  bool empty() const { return s_.empty(); }

  void push(Vector s, Vector y) {
    const double sy = s.dot(y);
    if (!(sy > std::numeric_limits<double>::epsilon() * y.squaredNorm())) return;
    s_.push_back(std::move(s));
    y_.push_back(std::move(y));
    if (s_.size() > memory_) {
      s_.pop_front();
      y_.pop_front();
    }
  }

  Matrix dense() const {
    if (s_.empty()) return Matrix::Identity(n_, n_);
    const double theta = y_.back().squaredNorm() / s_.back().dot(y_.back());
    Matrix B = theta * Matrix::Identity(n_, n_);
    for (std::size_t i = 0; i < s_.size(); ++i) {
      const Vector Bs = B * s_[i];
      B += y_[i] * y_[i].transpose() / y_[i].dot(s_[i]) - Bs * Bs.transpose() / s_[i].dot(Bs);
    }
    return 0.5 * (B + B.transpose());
  }

 private:
  Index n_;
  std::size_t memory_;
  std::deque<Vector> s_;
  std::deque<Vector> y_;
};

// Generalized Cauchy point: first local minimizer of the quadratic model
// m(z) = g'z + z'Bz/2 along the projected steepest-descent path x(t) = P(x - t g).
Vector cauchy_point(const Vector& x, const Vector& g, const Matrix& B, const Box& box) {
  const Index n = x.size();
  const double inf = std::numeric_limits<double>::infinity();
  Vector t(n);
  Vector p(n);
  for (Index i = 0; i < n; ++i) {
    if (g[i] < 0.0) {
      t[i] = (x[i] - box.upper()[i]) / g[i];
    } else if (g[i] > 0.0) {
      t[i] = (x[i] - box.lower()[i]) / g[i];
    } else {
      t[i] = inf;
    }
    p[i] = t[i] > 0.0 ? -g[i] : 0.0;
  }

  std::vector<Index> order;
  for (Index i = 0; i < n; ++i) {
    if (t[i] > 0.0 && t[i] < inf) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return t[a] < t[b] || (t[a] == t[b] && a < b); });

  Vector z = Vector::Zero(n);
  double t_prev = 0.0;
  for (const Index b : order) {
    if (p.isZero(0.0)) return box.clamp(x + z);
    const Vector Bp = B * p;
    const double f1 = g.dot(p) + z.dot(Bp);
    const double f2 = p.dot(Bp);
    if (f1 >= 0.0) return box.clamp(x + z);
    const double dt_min = f2 > 0.0 ? -f1 / f2 : inf;
    const double dt = t[b] - t_prev;
    if (dt_min < dt) return box.clamp(x + z + dt_min * p);
    z += dt * p;
    z[b] = (g[b] < 0.0 ? box.upper()[b] : box.lower()[b]) - x[b];
    p[b] = 0.0;
    t_prev = t[b];
  }
  if (!p.isZero(0.0)) {
    const Vector Bp = B * p;
    const double f1 = g.dot(p) + z.dot(Bp);
    const double f2 = p.dot(Bp);
    if (f1 < 0.0 && f2 > 0.0) z += (-f1 / f2) * p;
  }
  return box.clamp(x + z);
}

// Minimize the model over the variables free at the Cauchy point, then pull
// the step back inside the box along its own direction.
Vector subspace_minimum(const Vector& x, const Vector& g, const Matrix& B, const Box& box, const Vector& xc) {
  const Index n = x.size();
  std::vector<Index> free;
  for (Index i = 0; i < n; ++i) {
    if (xc[i] > box.lower()[i] && xc[i] < box.upper()[i]) free.push_back(i);
  }
  if (free.empty()) return xc;

  const Vector r = g + B * (xc - x);
  const Index nf = static_cast<Index>(free.size());
  Matrix Bff(nf, nf);
  Vector rf(nf);
  for (Index a = 0; a < nf; ++a) {
    rf[a] = r[free[a]];
    for (Index b = 0; b < nf; ++b) Bff(a, b) = B(free[a], free[b]);
  }
  Eigen::LLT<Matrix> llt(Bff);
  if (llt.info() != Eigen::Success) return xc;
  const Vector du = llt.solve(-rf);
  if (!du.allFinite()) return xc;

  double alpha = 1.0;
  for (Index a = 0; a < nf; ++a) {
    const Index i = free[a];
    if (du[a] > 0.0) {
      alpha = std::min(alpha, (box.upper()[i] - xc[i]) / du[a]);
    } else if (du[a] < 0.0) {
      alpha = std::min(alpha, (box.lower()[i] - xc[i]) / du[a]);
    }
  }
  alpha = std::max(alpha, 0.0);
  Vector xbar = xc;
  for (Index a = 0; a < nf; ++a) xbar[free[a]] += alpha * du[a];
  return box.clamp(xbar);
}

double max_feasible_step(const Vector& x, const Vector& d, const Box& box) {
  double step = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < x.size(); ++i) {
    if (d[i] > 0.0) {
      step = std::min(step, (box.upper()[i] - x[i]) / d[i]);
    } else if (d[i] < 0.0) {
      step = std::min(step, (box.lower()[i] - x[i]) / d[i]);
    }
  }
  return step;
}

double projected_gradient_norm(const Vector& x, const Vector& g, const Box& box) {
  return (box.clamp(x - g) - x).lpNorm<Eigen::Infinity>();
}

}  // namespace

RunResult lbfgsb(const ObjectiveHandle& f, const Vector& x0, const Box& bounds, std::size_t maxit,
                 const LbfgsbOptions& opt) {
  if (x0.size() != bounds.dim()) throw DimensionError("start point and bounds differ in dimension");
  if (!bounds.contains(x0)) throw DomainError("start point " + format_point(x0) + " is outside the bounds");

  const std::uint64_t evals_before = f.evaluations();
  RunResult run;
  run.x0 = x0;

  Vector x = x0;
  double fx = checked_eval(f, x);
  Vector g = numeric_gradient(f, x, opt.gradient_step);
  run.path.push_back({x, fx});

  LbfgsMatrix memory(x.size(), opt.memory);
  auto finish = [&](Termination reason, bool converged) {
    run.x_opt = x;
    run.f_opt = fx;
    run.reason = reason;
    run.converged = converged;
    run.evals = f.evaluations() - evals_before;
    return run;
  };

  while (true) {
    if (projected_gradient_norm(x, g, bounds) <= opt.pgtol * std::max(1.0, std::abs(fx))) {
      return finish(Termination::gradient_tol, true);
    }
    if (run.iterations >= maxit) return finish(Termination::max_iterations, false);

    // One attempt with the current memory; on failure retry once from a
    // steepest-descent model.
    bool stepped = false;
    Vector x_new;
    double f_new = 0.0;
    for (int attempt = 0; attempt < 2 && !stepped; ++attempt) {
      if (attempt == 1) {
        if (memory.empty()) break;
        memory.clear();
      }
      const Matrix B = memory.dense();
      const Vector xc = cauchy_point(x, g, B, bounds);
      const Vector xbar = subspace_minimum(x, g, B, bounds, xc);
      const Vector d = xbar - x;
      const double slope = g.dot(d);
      if (!(slope < 0.0)) continue;

      const double step_max = max_feasible_step(x, d, bounds);
      double alpha = memory.empty() ? std::min(1.0 / d.norm(), step_max) : std::min(1.0, step_max);
      for (std::size_t trial = 0; trial < opt.max_backtracks; ++trial, alpha *= 0.5) {
        const Vector candidate = bounds.clamp(x + alpha * d);
        double fc = std::numeric_limits<double>::infinity();
        try {
          fc = f(candidate);
        } catch (const Error&) {
          continue;
        }
        if (std::isfinite(fc) && fc <= fx + opt.armijo * alpha * slope) {
          x_new = candidate;
          f_new = fc;
          stepped = true;
          break;
        }
      }
    }
    if (!stepped) return finish(Termination::line_search_failure, false);

    const Vector g_new = numeric_gradient(f, x_new, opt.gradient_step);
    memory.push(x_new - x, g_new - g);
    const double f_old = fx;
    x = x_new;
    fx = f_new;
    g = g_new;
    ++run.iterations;
    run.path.push_back({x, fx});

    if (f_old - fx <= opt.ftol * std::max({std::abs(f_old), std::abs(fx), 1.0})) {
      return finish(Termination::function_tol, true);
    }
  }
}

MultistartPlan MultistartPlan::defaults(Index d) {
  const auto dd = static_cast<std::size_t>(std::max<Index>(d, 1));
  return {200 * dd, 80 * dd, 2 * dd, 100};
}

void MultistartPlan::validate() const {
  if (n_candidates < 2) throw DomainError("control: need at least 2 candidate points");
  if (n_best < 1 || n_best > n_candidates) throw DomainError("control: need 1 <= n_best <= n_candidates");
  if (n_clusters < 1 || n_clusters > n_best) throw DomainError("control: need 1 <= n_clusters <= n_best");
  if (maxit < 1) throw DomainError("maxit must be at least 1");
}

Box final_search_box(Index d) { return Box::uniform(d, -10.0, 10.0); }

namespace {

bool lexicographically_less(const Vector& a, const Vector& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

// Runs lbfgsb, turning a thrown error into a failed RunResult that still
// carries its evaluation count.
RunResult guarded_run(const ObjectiveHandle& f, const Vector& x0, const Box& box, std::size_t maxit,
                      const LbfgsbOptions& opt) {
  const std::uint64_t before = f.evaluations();
  try {
    return lbfgsb(f, x0, box, maxit, opt);
  } catch (const Error& e) {
    RunResult run;
    run.x0 = x0;
    run.x_opt = x0;
    run.f_opt = std::numeric_limits<double>::infinity();
    run.evals = f.evaluations() - before;
    run.converged = false;
    run.reason = Termination::line_search_failure;
    run.failed = true;
    run.error = e.what();
    run.path.push_back({x0, run.f_opt});
    return run;
  }
}

void trace_run(std::ostream* os, const std::string& label, const RunResult& r) {
  if (os == nullptr) return;
  *os << label << ": start " << format_point(r.x0) << " -> ";
  if (r.failed) {
    *os << "failed (" << r.error << ")";
  } else {
    *os << format_point(r.x_opt) << " deviance " << r.f_opt << ", " << r.iterations << " iterations, "
        << r.evals << " evaluations, " << to_string(r.reason);
  }
  *os << '\n';
}

}  // namespace

MultistartResult multistart_minimize(const ObjectiveHandle& f, const Box& omega0, const MultistartPlan& plan,
                                     std::uint64_t seed, const MultistartOptions& options) {
  plan.validate();
  const Index d = omega0.dim();
  const Box final_box = options.final_box.value_or(final_search_box(d));
  if (final_box.dim() != d) throw DimensionError("final box and omega0 differ in dimension");

  const std::uint64_t evals_before = f.evaluations();
  MultistartResult out;
  MultistartReport& report = out.report;
  report.seed = seed;

  // Step 1: candidate design over omega0.
  const DesignMatrix candidates =
      scale_to_box(maximin_lhd(static_cast<Index>(plan.n_candidates), d, derive_seed(seed, 1)), omega0);
  const Index m = candidates.rows();
  Vector values(m);
  std::string first_error;
  for (Index i = 0; i < m; ++i) {
    double v = std::numeric_limits<double>::infinity();
    try {
      v = f(candidates.row(i).transpose());
    } catch (const Error& e) {
      if (first_error.empty()) first_error = e.what();
    }
    values[i] = std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  }
  report.candidate_count = static_cast<std::size_t>(m);

  // Step 2: keep the n_best lowest.
  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return values[a] < values[b]; });
  if (!std::isfinite(values[order.front()])) {
    throw OptimizationError("objective failed at every candidate point" +
                            (first_error.empty() ? std::string() : ": " + first_error));
  }
  report.best_candidate = candidates.row(order.front()).transpose();
  report.best_candidate_value = values[order.front()];

  std::size_t keep = 0;
  while (keep < plan.n_best && std::isfinite(values[order[keep]])) ++keep;
  Matrix best(static_cast<Index>(keep), d);
  for (std::size_t i = 0; i < keep; ++i) best.row(static_cast<Index>(i)) = candidates.row(order[i]);

  // Step 3: cluster the survivors.
  const Index k = static_cast<Index>(std::min(plan.n_clusters, keep));
  const Clustering clusters = kmeans(best, k, options.kmeans_restarts, derive_seed(seed, 2));
  for (Index c = 0; c < clusters.centers.rows(); ++c) {
    report.start_points.push_back(clusters.centers.row(c).transpose());
  }

  // Step 4: best of three runs along the main diagonal.
  if (d >= 2) {
    const double lo = omega0.lower().maxCoeff();
    const double hi = omega0.upper().minCoeff();
    const ObjectiveHandle along([&f, d](const Vector& t) { return f(Vector::Constant(d, t[0])); });
    const Box segment(Vector::Constant(1, lo), Vector::Constant(1, hi));
    for (const double q : {0.25, 0.5, 0.75}) {
      RunResult r = guarded_run(along, Vector::Constant(1, lo + q * (hi - lo)), segment, plan.maxit, options.lbfgsb);
      trace_run(options.trace, "diagonal run", r);
      report.diagonal_runs.push_back(std::move(r));
    }
    const RunResult* pick = nullptr;
    for (const RunResult& r : report.diagonal_runs) {
      if (!r.failed && (pick == nullptr || r.f_opt < pick->f_opt)) pick = &r;
    }
    if (pick != nullptr) {
      RunResult full = *pick;
      full.x0 = Vector::Constant(d, pick->x0[0]);
      full.x_opt = Vector::Constant(d, pick->x_opt[0]);
      for (Iterate& it : full.path) it.x = Vector::Constant(d, it.x[0]);
      report.start_points.push_back(full.x_opt);
      report.diagonal_result = std::move(full);
    }
  }

  // Step 5: full runs from every start over the final box.
  for (std::size_t s = 0; s < report.start_points.size(); ++s) {
    RunResult r = guarded_run(f, final_box.clamp(report.start_points[s]), final_box, plan.maxit, options.lbfgsb);
    trace_run(options.trace, "final run " + std::to_string(s + 1), r);
    if (r.failed) report.failures.push_back(r.error);
    report.per_run.push_back(std::move(r));
  }

  const RunResult* winner = nullptr;
  for (const RunResult& r : report.per_run) {
    if (r.failed) continue;
    if (winner == nullptr || r.f_opt < winner->f_opt ||
        (r.f_opt == winner->f_opt && lexicographically_less(r.x_opt, winner->x_opt))) {
      winner = &r;
    }
  }
  if (winner == nullptr) {
    std::string msg = "every optimizer run failed:";
    for (const std::string& e : report.failures) msg += "\n  " + e;
    throw OptimizationError(msg);
  }
  out.best = *winner;

  if (report.best_candidate_value < out.best.f_opt) {
    RunResult c;
    c.x0 = report.best_candidate;
    c.x_opt = report.best_candidate;
    c.f_opt = report.best_candidate_value;
    c.evals = 1;
    c.converged = false;
    c.reason = Termination::max_iterations;
    c.path.push_back({c.x0, c.f_opt});
    out.best = std::move(c);
    report.candidate_returned = true;
  }

  report.total_evaluations = f.evaluations() - evals_before;
  if (options.trace != nullptr) {
    *options.trace << "deviance evaluations: " << report.total_evaluations << '\n';
  }
  return out;
}

}  // namespace gpfit
