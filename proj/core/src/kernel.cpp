#include "gpfit/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gpfit/errors.hpp"

namespace gpfit {

CorrParams::CorrParams(Vector beta) : beta_(std::move(beta)) {
  for (Index k = 0; k < beta_.size(); ++k) {
    if (!std::isfinite(beta_[k])) {
      throw DomainError("correlation parameter beta[" + std::to_string(k) + "] is not finite");
    }
  }
}

double CorrParams::theta(Index k) const { return std::pow(10.0, beta_[k]); }

CorrMatrix::CorrMatrix(Matrix values, double nugget) : values_(std::move(values)), nugget_(nugget) {
  if (values_.rows() != values_.cols()) {
    throw DimensionError("correlation matrix must be square");
  }
  if (!(nugget_ >= 0.0) || !std::isfinite(nugget_)) {
    throw DomainError("nugget must be finite and non-negative");
  }
}

CorrMatrix CorrMatrix::with_nugget(double delta) const {
  Matrix v = values_;
  v.diagonal().setConstant(1.0 + delta);
  return CorrMatrix(std::move(v), delta);
}

SquaredDistances::SquaredDistances(const DesignMatrix& X) : n_(X.rows()), d_(X.cols()) {
  pairs_.resize(n_ * (n_ - 1) / 2, d_);
  Index p = 0;
  for (Index i = 0; i < n_; ++i) {
    for (Index j = i + 1; j < n_; ++j, ++p) {
      for (Index k = 0; k < d_; ++k) {
        const double diff = X(i, k) - X(j, k);
        pairs_(p, k) = diff * diff;
      }
    }
  }
}

namespace {

Vector thetas(const CorrParams& beta) {
  Vector theta(beta.size());
  for (Index k = 0; k < beta.size(); ++k) theta[k] = beta.theta(k);
  return theta;
}

}  // namespace

CorrMatrix corr_matrix(const SquaredDistances& dist, const CorrParams& beta) {
  if (beta.size() != dist.dim()) {
    throw DimensionError("beta has " + std::to_string(beta.size()) + " entries but the design has " +
                         std::to_string(dist.dim()) + " columns");
  }
  const Index n = dist.points();
  const Vector theta = thetas(beta);
  Matrix R(n, n);
  Index p = 0;
  for (Index i = 0; i < n; ++i) {
    R(i, i) = 1.0;
    for (Index j = i + 1; j < n; ++j, ++p) {
      double expo = 0.0;
      for (Index k = 0; k < dist.dim(); ++k) expo += theta[k] * dist.pairs()(p, k);
      const double r = std::exp(-expo);
      R(i, j) = r;
      R(j, i) = r;
    }
  }
  return CorrMatrix(std::move(R), 0.0);
}

CorrMatrix corr_matrix(const DesignMatrix& X, const CorrParams& beta) {
  if (beta.size() != X.cols()) {
    throw DimensionError("beta has " + std::to_string(beta.size()) + " entries but the design has " +
                         std::to_string(X.cols()) + " columns");
  }
  return corr_matrix(SquaredDistances(X), beta);
}

Vector corr_vector(const DesignMatrix& X, const Vector& xstar, const CorrParams& beta) {
  if (xstar.size() != X.cols() || beta.size() != X.cols()) {
    throw DimensionError("query point, design and beta dimensions disagree");
  }
  const Vector theta = thetas(beta);
  Vector r(X.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    double expo = 0.0;
    for (Index k = 0; k < X.cols(); ++k) {
      const double diff = X(i, k) - xstar[k];
      expo += theta[k] * (diff * diff);
    }
    r[i] = std::exp(-expo);
  }
  return r;
}

Vector symmetric_eigenvalues(const Matrix& sym) {
  using real = long double;
  const Index n = sym.rows();
  if (sym.cols() != n) throw DimensionError("eigenvalues need a square matrix");
  if (n == 0) return Vector();
  if (!sym.allFinite()) throw ConditioningError("matrix has non-finite entries");

  // Cyclic Jacobi on the upper triangle (row-major), eigenvalues only.
  std::vector<real> a(static_cast<std::size_t>(n * n));
  auto at = [&a, n](Index i, Index j) -> real& { return a[static_cast<std::size_t>(i * n + j)]; };
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) at(i, j) = static_cast<real>(sym(i, j));
  }
  std::vector<real> diag(static_cast<std::size_t>(n)), acc(diag.size()), z(diag.size(), 0.0L);
  for (Index i = 0; i < n; ++i) diag[i] = acc[i] = at(i, i);

  auto rotate = [&](Index i, Index j, Index k, Index l, real s, real tau) {
    const real g = at(i, j);
    const real h = at(k, l);
    at(i, j) = g - s * (h + g * tau);
    at(k, l) = h + s * (g - h * tau);
  };

  for (int sweep = 1; sweep <= 100; ++sweep) {
    real off = 0.0L;
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) off += std::fabs(at(p, q));
    }
    if (off == 0.0L) break;
    const real tresh = sweep < 4 ? 0.2L * off / static_cast<real>(n * n) : 0.0L;

    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const real g = 100.0L * std::fabs(at(p, q));
        if (sweep > 4 && std::fabs(diag[p]) + g == std::fabs(diag[p]) &&
            std::fabs(diag[q]) + g == std::fabs(diag[q])) {
          at(p, q) = 0.0L;
          continue;
        }
        if (std::fabs(at(p, q)) <= tresh) continue;

        real h = diag[q] - diag[p];
        real t;
        if (std::fabs(h) + g == std::fabs(h)) {
          t = at(p, q) / h;
        } else {
          const real theta = 0.5L * h / at(p, q);
          t = 1.0L / (std::fabs(theta) + std::sqrt(1.0L + theta * theta));
          if (theta < 0.0L) t = -t;
        }
        const real c = 1.0L / std::sqrt(1.0L + t * t);
        const real s = t * c;
        const real tau = s / (1.0L + c);
        h = t * at(p, q);
        z[p] -= h;
        z[q] += h;
        diag[p] -= h;
        diag[q] += h;
        at(p, q) = 0.0L;
        for (Index j = 0; j < p; ++j) rotate(j, p, j, q, s, tau);
        for (Index j = p + 1; j < q; ++j) rotate(p, j, j, q, s, tau);
        for (Index j = q + 1; j < n; ++j) rotate(p, j, q, j, s, tau);
      }
    }
    for (Index i = 0; i < n; ++i) {
      acc[i] += z[i];
      diag[i] = acc[i];
      z[i] = 0.0L;
    }
  }

  std::sort(diag.begin(), diag.end());
  Vector out(n);
  for (Index i = 0; i < n; ++i) out[i] = static_cast<double>(diag[i]);
  return out;
}

namespace {

constexpr double kPdFloor = 1e-15;

struct Extremes {
  double lo;
  double hi;
};

Extremes extreme_eigenvalues(const CorrMatrix& R) {
  const Vector ev = symmetric_eigenvalues(R.values());
  if (ev.size() == 0) throw DimensionError("empty correlation matrix");
  return {ev[0], ev[ev.size() - 1]};
}

}  // namespace

ConditionInfo condition_number(const CorrMatrix& R) {
  const auto [lo, hi] = extreme_eigenvalues(R);
  if (!(hi > 0.0) || lo <= kPdFloor * hi) {
    throw ConditioningError("correlation matrix is not positive definite (lambda_min = " +
                            std::to_string(lo) + ", lambda_max = " + std::to_string(hi) + ")");
  }
  return {hi / lo, hi, lo};
}

double nugget_lower_bound(const CorrMatrix& R, double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("nugget threshold a must be positive");
  if (R.nugget() != 0.0) throw DomainError("nugget_lower_bound expects a nugget-free matrix");

  const auto [lo, hi] = extreme_eigenvalues(R);
  if (!(hi > 0.0)) throw ConditioningError("correlation matrix has no positive eigenvalue");

  const double ea = std::exp(a);
  const double excess = hi - ea * lo;
  if (!(excess > 0.0)) return 0.0;  // kappa(R) <= e^a

  const double delta = excess / (ea - 1.0);
  double diag = 1.0 + delta;
  if (diag - 1.0 < delta) diag = std::nextafter(diag, std::numeric_limits<double>::infinity());
  return diag - 1.0;
}

CholFactor cholesky(const CorrMatrix& R) {
  const Matrix& A = R.values();
  const Index n = A.rows();
  Matrix L = Matrix::Zero(n, n);
  double log_det = 0.0;
  for (Index j = 0; j < n; ++j) {
    double s = A(j, j);
    for (Index k = 0; k < j; ++k) s -= L(j, k) * L(j, k);
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw ConditioningError("Cholesky factorization failed at pivot " + std::to_string(j),
                              static_cast<std::size_t>(j));
    }
    const double ljj = std::sqrt(s);
    L(j, j) = ljj;
    log_det += 2.0 * std::log(ljj);
    for (Index i = j + 1; i < n; ++i) {
      double t = A(i, j);
      for (Index k = 0; k < j; ++k) t -= L(i, k) * L(j, k);
      L(i, j) = t / ljj;
    }
  }
  return CholFactor(std::move(L), log_det);
}

Vector forward_substitute(const CholFactor& F, const Vector& b) {
  const Matrix& L = F.lower();
  const Index n = L.rows();
  if (b.size() != n) throw DimensionError("right-hand side length does not match the factor");
  Vector x(n);
  for (Index i = 0; i < n; ++i) {
    double s = b[i];
    for (Index k = 0; k < i; ++k) s -= L(i, k) * x[k];
    x[i] = s / L(i, i);
  }
  return x;
}

namespace {

void back_substitute_in_place(const Matrix& L, Vector& x) {
  const Index n = L.rows();
  for (Index i = n - 1; i >= 0; --i) {
    double s = x[i];
    for (Index k = i + 1; k < n; ++k) s -= L(k, i) * x[k];
    x[i] = s / L(i, i);
  }
}

}  // namespace

Vector solve(const CholFactor& F, const Vector& b) {
  Vector x = forward_substitute(F, b);
  back_substitute_in_place(F.lower(), x);
  return x;
}

Matrix solve(const CholFactor& F, const Matrix& B) {
  if (B.rows() != F.size()) throw DimensionError("right-hand side rows do not match the factor");
  Matrix X(B.rows(), B.cols());
  for (Index c = 0; c < B.cols(); ++c) X.col(c) = solve(F, Vector(B.col(c)));
  return X;
}

}  // namespace gpfit
