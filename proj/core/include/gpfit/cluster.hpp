#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gpfit/common.hpp"

namespace gpfit {

struct Clustering {
  Matrix centers;                  ///< k x d
  std::vector<Index> assignment;   ///< cluster index per input row
  double within_ss = 0.0;          ///< sum of squared distances to assigned centers
  std::size_t iterations = 0;      ///< Lloyd iterations of the selected run
  /// All input points coincide, so only one center is reported.
  bool degenerate = false;
  /// within_ss of every restart in restart order.
  std::vector<double> restart_within_ss;
};

struct LloydRun {
  Clustering clustering;
  /// within_ss after each assign + update step; non-increasing.
  std::vector<double> ss_history;
};

/// Lloyd iterations from the given centers until the assignment stops
/// changing (at most `max_iterations`). An emptied cluster is re-seeded with
/// the point farthest from its current center.
LloydRun lloyd(const Matrix& points, Matrix initial_centers, std::size_t max_iterations = 100);

/// Best of `restarts` Lloyd runs, each started from k distinct input points
/// drawn with a restart-specific seed. Ties go to the lowest restart index.
/// Throws DomainError when the point count is below k or k == 0.
Clustering kmeans(const Matrix& points, Index k, std::size_t restarts = 5, std::uint64_t seed = 0);

/// Nearest center (lowest index on ties).
Index nearest_center(const Matrix& centers, const Eigen::Ref<const Vector>& x);

}  // namespace gpfit
