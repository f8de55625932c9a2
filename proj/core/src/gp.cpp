#include "gpfit/gp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <vector>

#include "gpfit/errors.hpp"

namespace gpfit {

MuSigma mu_sigma_hat(const CholFactor& F, const Vector& Y) {
  const Index n = F.size();
  if (Y.size() != n) throw DimensionError("output vector length does not match the factor");
  const Vector w = forward_substitute(F, Vector::Ones(n));
  const Vector v = forward_substitute(F, Y);
  const double mu = w.dot(v) / w.squaredNorm();
  const Vector u = v - mu * w;
  return {mu, u.squaredNorm() / static_cast<double>(n)};
}

namespace {

bool is_constant(const Vector& Y) { return Y.size() == 0 || Y.maxCoeff() == Y.minCoeff(); }

double deviance_from(const CorrMatrix& R, const Vector& Y, double a) {
  if (Y.size() != R.size()) throw DimensionError("output vector length does not match the design");
  if (is_constant(Y)) throw DegenerateOutputError("outputs are constant; the deviance is undefined");
  const double delta = nugget_lower_bound(R, a);
  const CholFactor F = cholesky(delta > 0.0 ? R.with_nugget(delta) : R);
  // Same arithmetic as GpModel so a fitted model reproduces the optimum bit for bit.
  const Vector w = forward_substitute(F, Vector::Ones(Y.size()));
  const Vector v = forward_substitute(F, Y);
  const double mu = w.dot(v) / w.squaredNorm();
  const double quad = (v - mu * w).squaredNorm();
  if (!(quad > 0.0) || !std::isfinite(quad)) {
    throw DegenerateOutputError("residual quadratic form vanished; the deviance is undefined");
  }
  return F.log_det() + static_cast<double>(Y.size()) * std::log(quad);
}

}  // namespace

double deviance(const CorrParams& beta, const DesignMatrix& X, const Vector& Y, double a) {
  return deviance_from(corr_matrix(X, beta), Y, a);
}

DevianceFunction::DevianceFunction(const DesignMatrix& X, Vector Y, double a) : dist_(X), Y_(std::move(Y)), a_(a) {
  if (Y_.size() != X.rows()) throw DimensionError("output vector length does not match the design");
}

double DevianceFunction::operator()(const Vector& beta) const { return (*this)(CorrParams(beta)); }

double DevianceFunction::operator()(const CorrParams& beta) const {
  return deviance_from(corr_matrix(dist_, beta), Y_, a_);
}

GpModel::GpModel(DesignMatrix X, Vector Y, CorrParams beta, double nug_thres, double delta, CholFactor factor)
    : X_(std::move(X)),
      Y_(std::move(Y)),
      beta_(std::move(beta)),
      nug_thres_(nug_thres),
      delta_(delta),
      factor_(std::move(factor)) {
  const Index n = X_.rows();
  w_ = forward_substitute(factor_, Vector::Ones(n));
  const Vector v = forward_substitute(factor_, Y_);
  mu_ = w_.dot(v) / w_.squaredNorm();
  u_ = v - mu_ * w_;
  const double quad = u_.squaredNorm();
  sigma2_ = quad / static_cast<double>(n);
  deviance_ = quad > 0.0 ? factor_.log_det() + static_cast<double>(n) * std::log(quad)
                         : std::numeric_limits<double>::quiet_NaN();
}

GpModel GpModel::at(DesignMatrix X, Vector Y, CorrParams beta, double nug_thres) {
  if (Y.size() != X.rows()) throw DimensionError("output vector length does not match the design");
  const CorrMatrix R = corr_matrix(X, beta);
  const double delta = nugget_lower_bound(R, nug_thres);
  CholFactor F = cholesky(delta > 0.0 ? R.with_nugget(delta) : R);
  return GpModel(std::move(X), std::move(Y), std::move(beta), nug_thres, delta, std::move(F));
}

GpModel GpModel::restore(DesignMatrix X, Vector Y, CorrParams beta, double nug_thres, double mu_hat,
                         double sigma2_hat, double delta_lb, double deviance_at_fit) {
  if (Y.size() != X.rows()) throw DimensionError("output vector length does not match the design");
  const CorrMatrix R = corr_matrix(X, beta);
  CholFactor F = cholesky(delta_lb > 0.0 ? R.with_nugget(delta_lb) : R);
  GpModel model(std::move(X), std::move(Y), std::move(beta), nug_thres, delta_lb, std::move(F));
  model.mu_ = mu_hat;
  model.sigma2_ = sigma2_hat;
  model.deviance_ = deviance_at_fit;
  model.u_ = forward_substitute(model.factor_, model.Y_) - mu_hat * model.w_;
  return model;
}

FitResult fit(const DesignMatrix& X, const Vector& Y, const FitOptions& options) {
  const Index n = X.rows();
  const Index d = X.cols();
  if (d < 1) throw DimensionError("design has no columns");
  if (Y.size() != n) {
    throw DimensionError("design has " + std::to_string(n) + " rows but there are " + std::to_string(Y.size()) +
                         " outputs");
  }
  if (n < 2) throw DomainError("at least two design points are needed");
  if (!X.allFinite() || X.minCoeff() < 0.0 || X.maxCoeff() > 1.0) {
    throw DomainError("design points must lie in [0,1]^d (rescale the inputs first)");
  }
  if (!Y.allFinite()) throw DomainError("outputs must be finite");
  if (is_constant(Y)) throw DegenerateOutputError("outputs are constant; nothing to fit");
  if (!(options.nug_thres > 0.0)) throw DomainError("nugget threshold must be positive");

  std::vector<std::string> warnings;
  if (n < d + 2) {
    warnings.push_back("only " + std::to_string(n) + " points for d = " + std::to_string(d) +
                       "; at least d + 2 are recommended");
  }
  {
    std::set<std::vector<double>> rows;
    for (Index i = 0; i < n; ++i) {
      std::vector<double> row;
      row.reserve(static_cast<std::size_t>(d));
      for (Index k = 0; k < d; ++k) row.push_back(X(i, k));
      if (!rows.insert(std::move(row)).second) {
        warnings.push_back("duplicated design rows; delta_lb will be positive");
        break;
      }
    }
  }

  // The optimizer sees (Y - Y_1) / max|Y - Y_1|. Whenever Y + c or c Y is
  // exactly representable this vector is bit-identical to the one for Y, so
  // beta_hat is unchanged under output shifts and rescalings.
  const Vector centered = Y.array() - Y[0];
  const Vector Ys = centered / centered.cwiseAbs().maxCoeff();

  const MultistartPlan plan = options.plan.value_or(MultistartPlan::defaults(d));
  const DevianceFunction dev(X, Ys, options.nug_thres);
  const ObjectiveHandle objective([&dev](const Vector& beta) { return dev(beta); });

  MultistartOptions mopts;
  mopts.trace = options.trace;
  MultistartResult opt = multistart_minimize(objective, omega0(d), plan, options.seed, mopts);

  GpModel model = GpModel::at(X, Y, CorrParams(opt.best.x_opt), options.nug_thres);
  return FitResult{std::move(model), std::move(opt.report), std::move(warnings)};
}

Prediction predict(const GpModel& model, const DesignMatrix& xnew) {
  if (xnew.cols() != model.d()) {
    throw DimensionError("query points have " + std::to_string(xnew.cols()) + " columns, the model has d = " +
                         std::to_string(model.d()));
  }
  const Index m = xnew.rows();
  const Vector& w = model.whitened_ones();
  const Vector& u = model.whitened_residual();
  const double ones_quad = w.squaredNorm();

  Prediction p;
  p.inputs = xnew;
  p.y_hat.resize(m);
  p.mse.resize(m);
  for (Index i = 0; i < m; ++i) {
    const Vector xs = xnew.row(i).transpose();
    if (xs.minCoeff() < 0.0 || xs.maxCoeff() > 1.0) ++p.extrapolated;
    const Vector v = forward_substitute(model.factor(), corr_vector(model.X(), xs, model.beta_hat()));
    p.y_hat[i] = model.mu_hat() + v.dot(u);
    const double lack = 1.0 - w.dot(v);
    double s2 = model.sigma2_hat() * (1.0 - v.squaredNorm() + lack * lack / ones_quad);
    if (s2 < 0.0) {
      s2 = 0.0;
      ++p.clamped;
    }
    p.mse[i] = s2;
  }
  return p;
}

Prediction predict(const GpModel& model) { return predict(model, model.X()); }

Prediction grid_predict(const GpModel& model, const Box& range, std::size_t resolution) {
  const Index d = model.d();
  if (d > 2) throw UnsupportedError("grid predictions are only available for d <= 2 (model has d = " +
                                    std::to_string(d) + ")");
  if (resolution < 2) throw DomainError("grid resolution must be at least 2");
  if (range.dim() != d) throw DimensionError("grid range and model dimension disagree");

  const auto res = static_cast<Index>(resolution);
  auto tick = [&](Index k, Index i) {
    if (i == res - 1) return range.upper()[k];
    return range.lower()[k] + (range.upper()[k] - range.lower()[k]) * static_cast<double>(i) /
                                  static_cast<double>(res - 1);
  };

  DesignMatrix grid(d == 1 ? res : res * res, d);
  if (d == 1) {
    for (Index i = 0; i < res; ++i) grid(i, 0) = tick(0, i);
  } else {
    for (Index i = 0; i < res; ++i) {
      for (Index j = 0; j < res; ++j) {
        grid(i * res + j, 0) = tick(0, i);
        grid(i * res + j, 1) = tick(1, j);
      }
    }
  }
  return predict(model, grid);
}

namespace {

std::string fmt_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", std::max(1, digits), v);
  return buf;
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

}  // namespace

std::string format_summary(const GpModel& model, int digits) {
  std::ostringstream os;
  os << "Number Of Observations: n = " << model.n() << '\n';
  os << "Input Dimensions: d = " << model.d() << "\n\n";
  os << "Correlation: Exponential (power = 2)\n";
  os << "Correlation Parameters:\n";

  std::string header = "   ";
  std::string values = "[1]";
  for (Index k = 0; k < model.d(); ++k) {
    const std::string name = model.d() == 1 ? "beta_hat" : "beta_hat." + std::to_string(k + 1);
    const std::string val = fmt_sig(model.beta_hat()[k], digits);
    const std::size_t width = std::max(name.size(), val.size());
    header += ' ' + pad_left(name, width);
    values += ' ' + pad_left(val, width);
  }
  os << header << '\n' << values << "\n\n";
  os << "sigma^2_hat: [1] " << fmt_sig(model.sigma2_hat(), digits) << '\n';
  os << "delta_lb(beta_hat): [1] " << fmt_sig(model.delta_lb(), digits) << '\n';
  os << "nugget threshold parameter: " << fmt_sig(model.nug_thres(), digits) << '\n';
  return os.str();
}

}  // namespace gpfit
