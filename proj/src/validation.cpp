#include "netfactor/validation.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace netfactor {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

Matrix standardize(const Matrix& X) {
  const Index T = X.rows();
  if (T < 2) fail("standardize needs at least two rows");
  Matrix out(T, X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    const double mean = X.col(j).mean();
    const double sd = std::sqrt((X.col(j).array() - mean).square().sum()
                                / static_cast<double>(T - 1));
    if (sd == 0.0) fail("constant column " + std::to_string(j));
    out.col(j) = (X.col(j).array() - mean) / sd;
  }
  return out;
}

Matrix align_columns(const Matrix& prev, const Matrix& cur) {
  Matrix aligned = cur;
  for (Index k = 0; k < cur.cols(); ++k)
    if (prev.col(k).dot(cur.col(k)) < 0.0) aligned.col(k) = -aligned.col(k);
  return aligned;
}

double loading_drift(const Matrix& prev, const Matrix& cur) {
  if (prev.rows() != cur.rows() || prev.cols() != cur.cols())
    fail("loading shapes do not match");
  return (align_columns(prev, cur) - prev).squaredNorm()
         / (static_cast<double>(prev.rows()) * static_cast<double>(prev.cols()));
}

ValidationReport recursive_validate(const Matrix& X, const LaplacianSpectrum& spec,
                                    PenaltyKind method, int window, int r,
                                    const TuningGrids& grids,
                                    const ValidationOptions& options) {
  const Index T = X.rows();
  const Index p = X.cols();
  if (p != spec.p) fail("panel width does not match spectrum");
  if (window < 2 || T <= window) fail("need 2 <= window < T");
  if (r < 1 || r >= window || r > p) fail("need 1 <= r < window and r <= p");

  ValidationReport report;
  report.method = method;
  report.window = window;
  report.r = r;
  report.retuned_each_window = options.retune_each_window && method != PenaltyKind::none;

  ShrinkageOperator op = identity_operator(spec.p);
  if (method != PenaltyKind::none) {
    if (options.alpha) {
      if (method == PenaltyKind::projection && !options.m)
        fail("projection with fixed alpha also needs m");
      op = shrink_weights(spec, method, *options.alpha, options.m.value_or(0));
    } else {
      const TuningResult tuned =
          tune(X.topRows(window), spec, method, r, grids);
      op = shrink_weights(spec, method, tuned.alpha_star, tuned.m_star);
    }
  }
  report.alpha_used = op.alpha;
  report.m_used = op.m;

  Matrix prev_loadings;
  for (Index t = window; t < T; ++t) {
    const Matrix panel = X.middleRows(t - window, window);
    ShrinkageOperator step_op = op;
    if (report.retuned_each_window) {
      const TuningResult tuned = tune(panel, spec, method, r, grids);
      step_op = shrink_weights(spec, method, tuned.alpha_star, tuned.m_star);
    }
    const FactorEstimate est = fit(panel, spec, step_op, r);
    const Matrix& loadings = est.loadings;

    const Vector x = X.row(t).transpose();
    const Matrix gram = loadings.transpose() * loadings;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() != Eigen::Success)
      fail("singular loading Gram matrix: r too large for the window");
    const Vector scores = llt.solve(loadings.transpose() * x);
    const Vector resid = x - loadings * scores;

    ValidationStep step;
    step.step = static_cast<int>(t);
    step.mse = resid.squaredNorm() / static_cast<double>(p);
    const double tss = (x.array() - x.mean()).square().sum();
    if (tss > 0.0)
      step.r2 = 1.0 - resid.squaredNorm() / tss;
    else
      step.r2 = resid.squaredNorm() == 0.0 ? 1.0
                : -std::numeric_limits<double>::infinity();
    if (prev_loadings.size() == 0) {
      step.b_drift = std::numeric_limits<double>::quiet_NaN();
      prev_loadings = loadings;
    } else {
      const Matrix aligned = align_columns(prev_loadings, loadings);
      step.b_drift = (aligned - prev_loadings).squaredNorm()
                     / (static_cast<double>(p) * r);
      prev_loadings = aligned;
    }
    report.steps.push_back(step);
  }

  double drift_sum = 0.0;
  int drift_count = 0;
  for (const ValidationStep& step : report.steps) {
    report.ave_mse += step.mse;
    report.ave_r2 += step.r2;
    if (!std::isnan(step.b_drift)) {
      drift_sum += step.b_drift;
      ++drift_count;
    }
  }
  const double n_steps = static_cast<double>(report.steps.size());
  report.ave_mse /= n_steps;
  report.ave_r2 /= n_steps;
  report.var_b = drift_count > 0 ? drift_sum / drift_count : 0.0;

  report.sigma2_hat = estimate_noise_variance(X, spec, r);
  const FactorEstimate full = fit(X, spec, op, r);
  report.adj_error =
      adjusted_error(cl_score(X, full, op, report.sigma2_hat, r), report.sigma2_hat);
  return report;
}

}  // namespace netfactor
