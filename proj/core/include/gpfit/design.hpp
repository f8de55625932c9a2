#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "gpfit/common.hpp"

namespace gpfit {

/// Axis-aligned box; lower_k < upper_k for every coordinate.
class Box {
 public:
  Box() = default;
  Box(Vector lower, Vector upper);
  /// [lo, hi]^d
  static Box uniform(Index d, double lo, double hi);

  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  Index dim() const { return lower_.size(); }
  bool contains(const Vector& x) const;
  Vector clamp(const Vector& x) const;

 private:
  Vector lower_;
  Vector upper_;
};

/// Search box for the log10 correlation parameters:
/// -2 - log10(d) <= beta_k <= log10(500) - log10(d).
Box omega0(Index d);

struct MaximinResult {
  DesignMatrix design;
  /// Minimum pairwise distance after the initial random LHD and after every
  /// accepted swap; non-decreasing.
  std::vector<double> min_distance_history;
};

/// Random Latin hypercube in [0,1]^d (random permutation per column, uniform
/// jitter inside each stratum) improved toward maximin by coordinate swaps
/// between two rows. A swap is kept only when the minimum inter-point
/// distance strictly increases, so every column stays a stratification.
/// `swap_budget` defaults to 10 n d proposals. Throws DomainError for n < 2
/// or d < 1.
MaximinResult maximin_lhd_with_history(Index n, Index d, std::uint64_t seed,
                                       std::optional<std::size_t> swap_budget = std::nullopt);

DesignMatrix maximin_lhd(Index n, Index d, std::uint64_t seed,
                         std::optional<std::size_t> swap_budget = std::nullopt);

/// lower + U .* (upper - lower), row by row.
DesignMatrix scale_to_box(const DesignMatrix& U, const Box& box);

/// Inverse of scale_to_box.
DesignMatrix scale_to_unit(const DesignMatrix& X, const Box& box);

double min_pairwise_distance(const DesignMatrix& X);

}  // namespace gpfit
