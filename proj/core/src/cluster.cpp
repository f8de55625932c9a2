#include "gpfit/cluster.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "gpfit/errors.hpp"

namespace gpfit {

Index nearest_center(const Matrix& centers, const Eigen::Ref<const Vector>& x) {
  Index best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index c = 0; c < centers.rows(); ++c) {
    const double dist = (centers.row(c).transpose() - x).squaredNorm();
    if (dist < best_d) {
      best_d = dist;
      best = c;
    }
  }
  return best;
}

namespace {

std::vector<Index> assign_all(const Matrix& points, const Matrix& centers) {
  std::vector<Index> out(static_cast<std::size_t>(points.rows()));
  for (Index i = 0; i < points.rows(); ++i) out[i] = nearest_center(centers, points.row(i).transpose());
  return out;
}

double within_ss(const Matrix& points, const Matrix& centers, const std::vector<Index>& assign) {
  double ss = 0.0;
  for (Index i = 0; i < points.rows(); ++i) ss += (points.row(i) - centers.row(assign[i])).squaredNorm();
  return ss;
}

// Centers as cluster means. An empty cluster takes over the point farthest
// from its center (among clusters that can spare one), which may rewrite
// `assign`.
Matrix update_centers(const Matrix& points, Index k, std::vector<Index>& assign) {
  const Index d = points.cols();
  auto means = [&] {
    Matrix centers = Matrix::Zero(k, d);
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < points.rows(); ++i) {
      centers.row(assign[i]) += points.row(i);
      ++counts[assign[i]];
    }
    for (Index c = 0; c < k; ++c) {
      if (counts[c] > 0) centers.row(c) /= static_cast<double>(counts[c]);
    }
    return std::pair{centers, counts};
  };

  auto [centers, counts] = means();
  for (Index c = 0; c < k; ++c) {
    if (counts[c] > 0) continue;
    Index far = -1;
    double far_d = -1.0;
    for (Index i = 0; i < points.rows(); ++i) {
      if (counts[assign[i]] < 2) continue;
      const double dist = (points.row(i) - centers.row(assign[i])).squaredNorm();
      if (dist > far_d) {
        far_d = dist;
        far = i;
      }
    }
    if (far < 0) break;  // fewer points than clusters; cannot happen for m >= k
    assign[far] = c;
    std::tie(centers, counts) = means();
  }
  return centers;
}

std::vector<Index> distinct_start(const Matrix& points, Index k, Rng& rng) {
  std::vector<Index> order(static_cast<std::size_t>(points.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<Index> chosen;
  std::vector<Index> spare;
  for (const Index i : order) {
    if (static_cast<Index>(chosen.size()) == k) break;
    const bool repeat = std::any_of(chosen.begin(), chosen.end(),
                                    [&](Index c) { return points.row(c) == points.row(i); });
    (repeat ? spare : chosen).push_back(i);
  }
  for (std::size_t s = 0; static_cast<Index>(chosen.size()) < k; ++s) chosen.push_back(spare[s]);
  return chosen;
}

}  // namespace

LloydRun lloyd(const Matrix& points, Matrix initial_centers, std::size_t max_iterations) {
  if (initial_centers.cols() != points.cols()) throw DimensionError("centers and points differ in dimension");
  const Index k = initial_centers.rows();
  if (k < 1 || points.rows() < k) throw DomainError("k-means needs 1 <= k <= number of points");

  LloydRun run;
  std::vector<Index> assign = assign_all(points, initial_centers);
  Matrix centers = std::move(initial_centers);
  std::size_t it = 0;
  bool converged = false;
  while (it < max_iterations) {
    ++it;
    centers = update_centers(points, k, assign);
    run.ss_history.push_back(within_ss(points, centers, assign));
    std::vector<Index> next = assign_all(points, centers);
    if (next == assign) {
      converged = true;
      break;
    }
    assign = std::move(next);
  }
  if (!converged) {
    centers = update_centers(points, k, assign);
    run.ss_history.push_back(within_ss(points, centers, assign));
  }

  run.clustering.centers = std::move(centers);
  run.clustering.assignment = std::move(assign);
  run.clustering.within_ss = run.ss_history.back();
  run.clustering.iterations = it;
  return run;
}

Clustering kmeans(const Matrix& points, Index k, std::size_t restarts, std::uint64_t seed) {
  const Index m = points.rows();
  if (k < 1) throw DomainError("k-means needs k >= 1");
  if (m < k) {
    throw DomainError("k-means with k = " + std::to_string(k) + " needs at least k points, got " +
                      std::to_string(m));
  }
  restarts = std::max<std::size_t>(restarts, 1);

  bool all_same = true;
  for (Index i = 1; i < m && all_same; ++i) all_same = points.row(i) == points.row(0);
  if (all_same && k > 1) {
    Clustering c;
    c.centers = points.row(0);
    c.assignment.assign(static_cast<std::size_t>(m), 0);
    c.degenerate = true;
    c.restart_within_ss.assign(restarts, 0.0);
    return c;
  }

  Clustering best;
  bool have = false;
  std::vector<double> per_restart;
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(seed, r));
    const std::vector<Index> start = distinct_start(points, k, rng);
    Matrix init(k, points.cols());
    for (Index c = 0; c < k; ++c) init.row(c) = points.row(start[c]);
    LloydRun run = lloyd(points, std::move(init));
    per_restart.push_back(run.clustering.within_ss);
    if (!have || run.clustering.within_ss < best.within_ss) {
      best = std::move(run.clustering);
      have = true;
    }
  }
  best.restart_within_ss = std::move(per_restart);
  return best;
}

}  // namespace gpfit
