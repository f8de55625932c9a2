#include "gpfit/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gpfit/errors.hpp"

namespace gpfit {

Box::Box(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) throw DimensionError("box bounds differ in length");
  for (Index k = 0; k < lower_.size(); ++k) {
    if (!(lower_[k] < upper_[k]) || !std::isfinite(lower_[k]) || !std::isfinite(upper_[k])) {
      throw DomainError("invalid box: lower[" + std::to_string(k) + "] must be below upper[" +
                        std::to_string(k) + "]");
    }
  }
}

Box Box::uniform(Index d, double lo, double hi) {
  return Box(Vector::Constant(d, lo), Vector::Constant(d, hi));
}

bool Box::contains(const Vector& x) const {
  if (x.size() != dim()) return false;
  for (Index k = 0; k < dim(); ++k) {
    if (x[k] < lower_[k] || x[k] > upper_[k]) return false;
  }
  return true;
}

Vector Box::clamp(const Vector& x) const { return x.cwiseMax(lower_).cwiseMin(upper_); }

Box omega0(Index d) {
  if (d < 1) throw DomainError("omega0 needs d >= 1");
  const double shift = std::log10(static_cast<double>(d));
  return Box::uniform(d, -2.0 - shift, std::log10(500.0) - shift);
}

namespace {

double squared_distance(const DesignMatrix& X, Index a, Index b) {
  return (X.row(a) - X.row(b)).squaredNorm();
}

// Pairwise squared distances with each row's nearest neighbour, so a swap
// touching two rows can be scored in O(n d) instead of O(n^2 d).
class DistanceState {
 public:
  explicit DistanceState(const DesignMatrix& X) : n_(X.rows()), dist_(n_, n_), nn_val_(n_), nn_idx_(n_) {
    for (Index a = 0; a < n_; ++a) {
      dist_(a, a) = std::numeric_limits<double>::infinity();
      for (Index b = a + 1; b < n_; ++b) dist_(a, b) = dist_(b, a) = squared_distance(X, a, b);
    }
    for (Index r = 0; r < n_; ++r) refresh_row(r);
  }

  double min_value() const { return nn_val_.minCoeff(); }

  std::pair<Index, Index> critical_pair() const {
    Index r = 0;
    nn_val_.minCoeff(&r);
    return {r, nn_idx_[r]};
  }

  // Minimum over all pairs after rows i and j took the distances in new_i /
  // new_j (entries at i and j ignored).
  double min_after(Index i, Index j, const Vector& new_i, const Vector& new_j) const {
    double best = std::numeric_limits<double>::infinity();
    for (Index s = 0; s < n_; ++s) {
      if (s != i) best = std::min(best, new_i[s]);
      if (s != j && s != i) best = std::min(best, new_j[s]);
    }
    for (Index r = 0; r < n_; ++r) {
      if (r == i || r == j) continue;
      if (nn_idx_[r] != i && nn_idx_[r] != j) {
        best = std::min(best, nn_val_[r]);
      } else {
        for (Index s = 0; s < n_; ++s) {
          if (s != r && s != i && s != j) best = std::min(best, dist_(r, s));
        }
      }
    }
    return best;
  }

  void commit(Index i, Index j, const Vector& new_i, const Vector& new_j) {
    for (Index s = 0; s < n_; ++s) {
      if (s != i) dist_(i, s) = dist_(s, i) = new_i[s];
    }
    for (Index s = 0; s < n_; ++s) {
      if (s != j) dist_(j, s) = dist_(s, j) = new_j[s];
    }
    for (Index r = 0; r < n_; ++r) {
      if (r == i || r == j || nn_idx_[r] == i || nn_idx_[r] == j) {
        refresh_row(r);
      } else {
        if (dist_(r, i) < nn_val_[r]) {
          nn_val_[r] = dist_(r, i);
          nn_idx_[r] = i;
        }
        if (dist_(r, j) < nn_val_[r]) {
          nn_val_[r] = dist_(r, j);
          nn_idx_[r] = j;
        }
      }
    }
  }

 private:
  void refresh_row(Index r) {
    Index idx = 0;
    nn_val_[r] = dist_.row(r).minCoeff(&idx);
    nn_idx_[r] = idx;
  }

  Index n_;
  Matrix dist_;
  Vector nn_val_;
  Eigen::Matrix<Index, Eigen::Dynamic, 1> nn_idx_;
};

Vector row_distances(const DesignMatrix& X, Index r) {
  Vector out(X.rows());
  for (Index s = 0; s < X.rows(); ++s) {
    out[s] = s == r ? std::numeric_limits<double>::infinity() : squared_distance(X, r, s);
  }
  return out;
}

}  // namespace

MaximinResult maximin_lhd_with_history(Index n, Index d, std::uint64_t seed,
                                       std::optional<std::size_t> swap_budget) {
  if (n < 2) throw DomainError("a Latin hypercube needs n >= 2 points");
  if (d < 1) throw DomainError("a Latin hypercube needs d >= 1");

  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double nd = static_cast<double>(n);

  DesignMatrix X(n, d);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index k = 0; k < d; ++k) {
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    for (Index i = 0; i < n; ++i) {
      const double stratum = static_cast<double>(perm[i]);
      double x = 0.0;
      // Redraw the (vanishingly rare) jitter that rounds onto the stratum's
      // lower edge.
      do {
        x = (stratum + unif(rng)) / nd;
      } while (perm[i] > 0 && std::ceil(nd * x) != stratum + 1.0);
      X(i, k) = x;
    }
  }

  MaximinResult result;
  DistanceState state(X);
  result.min_distance_history.push_back(std::sqrt(state.min_value()));

  const std::size_t budget =
      swap_budget.value_or(10 * static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
  // With one column a swap only relabels rows, so the point set never changes.
  if (d > 1) {
    std::uniform_int_distribution<Index> pick_row(0, n - 2);
    std::uniform_int_distribution<Index> pick_col(0, d - 1);
    std::bernoulli_distribution pick_end(0.5);
    for (std::size_t it = 0; it < budget; ++it) {
      const auto [ca, cb] = state.critical_pair();
      const Index i = pick_end(rng) ? ca : cb;
      Index j = pick_row(rng);
      if (j >= i) ++j;
      const Index k = pick_col(rng);

      const double current = state.min_value();
      std::swap(X(i, k), X(j, k));
      const Vector new_i = row_distances(X, i);
      const Vector new_j = row_distances(X, j);
      const double proposed = state.min_after(i, j, new_i, new_j);
      if (proposed > current) {
        state.commit(i, j, new_i, new_j);
        result.min_distance_history.push_back(std::sqrt(state.min_value()));
      } else {
        std::swap(X(i, k), X(j, k));
      }
    }
  }

  result.design = std::move(X);
  return result;
}

DesignMatrix maximin_lhd(Index n, Index d, std::uint64_t seed, std::optional<std::size_t> swap_budget) {
  return maximin_lhd_with_history(n, d, seed, swap_budget).design;
}

DesignMatrix scale_to_box(const DesignMatrix& U, const Box& box) {
  if (U.cols() != box.dim()) throw DimensionError("design and box dimensions disagree");
  const Vector width = box.upper() - box.lower();
  DesignMatrix X(U.rows(), U.cols());
  for (Index i = 0; i < U.rows(); ++i) {
    for (Index k = 0; k < U.cols(); ++k) X(i, k) = box.lower()[k] + U(i, k) * width[k];
  }
  return X;
}

DesignMatrix scale_to_unit(const DesignMatrix& X, const Box& box) {
  if (X.cols() != box.dim()) throw DimensionError("design and box dimensions disagree");
  const Vector width = box.upper() - box.lower();
  DesignMatrix U(X.rows(), X.cols());
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index k = 0; k < X.cols(); ++k) U(i, k) = (X(i, k) - box.lower()[k]) / width[k];
  }
  return U;
}

double min_pairwise_distance(const DesignMatrix& X) {
  double best = std::numeric_limits<double>::infinity();
  for (Index a = 0; a < X.rows(); ++a) {
    for (Index b = a + 1; b < X.rows(); ++b) best = std::min(best, squared_distance(X, a, b));
  }
  return std::sqrt(best);
}

}  // namespace gpfit
