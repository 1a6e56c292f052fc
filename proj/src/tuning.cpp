#include "netfactor/tuning.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace netfactor {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

// Residual sum of squares of the closed-form fit for the given spectral
// weights, computed entirely in the eigenbasis (Frobenius norms are
// rotation invariant). `gram` must equal Xt diag(w) Xt^T.
double fit_rss(const Matrix& Xt, const Vector& weights, const Matrix& gram, int r) {
  const Index T = Xt.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  if (solver.info() != Eigen::Success) fail("eigendecomposition failed");
  const Matrix scores =
      solver.eigenvectors().rightCols(r) * std::sqrt(static_cast<double>(T));
  const Matrix loadings_rot = weights.asDiagonal() * (Xt.transpose() * scores)
                              / static_cast<double>(T);
  return (Xt - scores * loadings_rot.transpose()).squaredNorm();
}

}  // namespace

TuningGrids default_grids(int p) {
  if (p < 2) fail("default grids require p >= 2");
  TuningGrids grids;
  for (int k = 20; k >= 1; --k) grids.alpha.push_back(20.0 / k - 1.0);
  grids.alpha.push_back(static_cast<double>(p));
  std::sort(grids.alpha.begin(), grids.alpha.end());
  grids.alpha.erase(std::unique(grids.alpha.begin(), grids.alpha.end()), grids.alpha.end());
  for (int k = 1; k <= 9; ++k) {
    const int m = static_cast<int>(std::llround(std::pow(p, k / 10.0)));
    if (grids.m.empty() || grids.m.back() != m) grids.m.push_back(m);
  }
  return grids;
}

double estimate_noise_variance(const Matrix& X, const LaplacianSpectrum& spec, int r) {
  const FactorEstimate base = fit(X, spec, identity_operator(spec.p), r);
  return (X - common_components(base)).squaredNorm()
         / (static_cast<double>(X.rows()) * static_cast<double>(X.cols()));
}

double cl_score(const Matrix& X, const FactorEstimate& est, const ShrinkageOperator& op,
                double sigma2, int r) {
  if (sigma2 < 0.0) fail("sigma2 must be nonnegative");
  const double scale = static_cast<double>(X.rows()) * static_cast<double>(X.cols());
  const double rss = (X - common_components(est)).squaredNorm();
  return rss / scale + 2.0 * r * sigma2 * op.trace_inv() / scale;
}

TuningResult tune(const Matrix& X, const LaplacianSpectrum& spec, PenaltyKind kind,
                  int r, const TuningGrids& grids) {
  if (kind == PenaltyKind::none) fail("tune expects a penalized kind");
  if (grids.alpha.empty()) fail("empty alpha grid");
  if (kind == PenaltyKind::projection && grids.m.empty()) fail("empty m grid");

  const Index T = X.rows();
  const Index p = X.cols();
  if (p != spec.p) fail("panel width does not match spectrum");

  std::vector<double> alphas = grids.alpha;
  std::sort(alphas.begin(), alphas.end());
  std::vector<int> ms = kind == PenaltyKind::projection ? grids.m : std::vector<int>{0};
  std::sort(ms.begin(), ms.end());
  for (int m : ms)
    if (m < 0 || m > p) fail("truncation parameter m out of range [0, p]");

  TuningResult result;
  result.kind = kind;
  result.sigma2_hat = estimate_noise_variance(X, spec, r);

  const Matrix Xt = X * spec.eigvecs;
  const double scale = static_cast<double>(p) * static_cast<double>(T);
  const double penalty_unit = 2.0 * r * result.sigma2_hat / scale;

  // For the projection penalty the Gram matrix splits into shrunk and
  // untouched parts, so per-m suffix Grams make every (alpha, m) cell an
  // O(T^2) update instead of a fresh O(T^2 p) product.
  Matrix total_gram, shrunk_base;
  std::vector<Matrix> suffix_grams;
  if (kind == PenaltyKind::projection) {
    total_gram = Xt * Xt.transpose();
    suffix_grams.reserve(ms.size());
    for (int m : ms) {
      if (m == 0)
        suffix_grams.push_back(Matrix::Zero(T, T));
      else
        suffix_grams.push_back(Xt.rightCols(m) * Xt.rightCols(m).transpose());
    }
  }

  bool first = true;
  for (double alpha : alphas) {
    if (alpha < 0.0) fail("alpha must be nonnegative");
    Matrix lap_gram;
    if (kind == PenaltyKind::laplacian) {
      const Vector w = spec.empty_network
                           ? Vector(Vector::Ones(p))
                           : Vector((1.0 + alpha * spec.eigvals.array()).inverse());
      lap_gram = Xt * w.asDiagonal() * Xt.transpose();
      const double score = fit_rss(Xt, w, lap_gram, r) / scale + penalty_unit * w.sum();
      result.score_table.push_back({alpha, 0, score});
      if (first || score < result.best_score) {
        first = false;
        result.best_score = score;
        result.alpha_star = alpha;
        result.m_star = 0;
      }
      continue;
    }
    for (std::size_t mi = 0; mi < ms.size(); ++mi) {
      const int m = ms[mi];
      const ShrinkageOperator op = shrink_weights(spec, kind, alpha, m);
      const Matrix gram = spec.empty_network
                              ? total_gram
                              : ((total_gram - suffix_grams[mi]) / (1.0 + alpha)
                                 + suffix_grams[mi]).eval();
      const double score =
          fit_rss(Xt, op.weights, gram, r) / scale + penalty_unit * op.trace_inv();
      result.score_table.push_back({alpha, m, score});
      if (first || score < result.best_score) {
        first = false;
        result.best_score = score;
        result.alpha_star = alpha;
        result.m_star = m;
      }
    }
  }
  return result;
}

std::string to_string(CountMethod method) {
  switch (method) {
    case CountMethod::er: return "er";
    case CountMethod::one_step_lap: return "one_step_lap";
    case CountMethod::one_step_proj: return "one_step_proj";
  }
  return "er";
}

FactorCountResult select_r_er(const Matrix& X, const LaplacianSpectrum& spec,
                              const ShrinkageOperator& op, int k_max) {
  const Index T = X.rows();
  const Index p = X.cols();
  if (k_max < 1 || k_max + 1 > std::min(T, p))
    fail("k_max out of range: need 1 <= k_max and k_max + 1 <= min(T, p)");
  if (p != spec.p) fail("panel width does not match spectrum");

  const Matrix Xt = X * spec.eigvecs;
  const Matrix gram = Xt * op.weights.asDiagonal() * Xt.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  if (solver.info() != Eigen::Success) fail("eigendecomposition failed");
  const Vector eigvals = solver.eigenvalues().reverse();

  FactorCountResult result;
  result.ratios.resize(k_max);
  for (int k = 1; k <= k_max; ++k) {
    const double next = eigvals(k);
    result.ratios[k - 1] = next < 1e-12 ? std::numeric_limits<double>::infinity()
                                        : eigvals(k - 1) / next;
  }
  result.r_hat = 1;
  for (int k = 2; k <= k_max; ++k)
    if (result.ratios[k - 1] > result.ratios[result.r_hat - 1]) result.r_hat = k;
  result.stage_r = {result.r_hat};
  return result;
}

FactorCountResult select_r_one_step(const Matrix& X, const LaplacianSpectrum& spec,
                                    PenaltyKind kind, int k_max, const TuningGrids& grids,
                                    int extra_steps) {
  if (kind == PenaltyKind::none) fail("one-step selection expects a penalized kind");
  if (extra_steps < 1) fail("extra_steps must be at least 1");

  FactorCountResult current = select_r_er(X, spec, identity_operator(spec.p), k_max);
  std::vector<int> stages = {current.r_hat};
  for (int step = 0; step < extra_steps; ++step) {
    const TuningResult tuned = tune(X, spec, kind, current.r_hat, grids);
    const ShrinkageOperator op = shrink_weights(spec, kind, tuned.alpha_star, tuned.m_star);
    current = select_r_er(X, spec, op, k_max);
    stages.push_back(current.r_hat);
  }
  current.method = kind == PenaltyKind::laplacian ? CountMethod::one_step_lap
                                                  : CountMethod::one_step_proj;
  current.stage_r = stages;
  current.fixed_point = stages[stages.size() - 1] == stages[stages.size() - 2];
  return current;
}

OracleAlpha oracle_alpha(PenaltyKind kind, const Matrix& loadings,
                         const LaplacianSpectrum& spec, int T, int m) {
  if (T < 1) fail("T must be positive");
  if (loadings.rows() != spec.p) fail("loadings do not match spectrum");
  const int p = spec.p;

  double denom = 0.0;
  if (kind == PenaltyKind::projection) {
    if (m < 0 || m > p) fail("truncation parameter m out of range [0, p]");
    denom = (spec.eigvecs.leftCols(p - m).transpose() * loadings).squaredNorm();
    if (denom == 0.0) return {std::numeric_limits<double>::infinity(), true};
    return {static_cast<double>(p) / (T * denom), false};
  }
  if (kind == PenaltyKind::laplacian) {
    const Matrix rotated = spec.eigvecs.transpose() * loadings;
    denom = (spec.eigvals.array() * rotated.rowwise().squaredNorm().array()).maxCoeff();
    if (denom <= 0.0) return {std::numeric_limits<double>::infinity(), true};
    return {1.0 / (T * denom), false};
  }
  fail("oracle alpha expects a penalized kind");
}

double h_value(const Matrix& loadings, const LaplacianSpectrum& spec,
               const ShrinkageOperator& op, int T) {
  if (loadings.rows() != spec.p) fail("loadings do not match spectrum");
  const double p = static_cast<double>(spec.p);
  const Matrix rotated = spec.eigvecs.transpose() * loadings;
  const double bias = ((1.0 - op.weights.array()).square()
                       * rotated.rowwise().squaredNorm().array()).sum() / p;
  return bias + op.trace_inv_sq() / (p * T);
}

Vector assumption_e_eigs(const Matrix& loadings, const LaplacianSpectrum& spec,
                         const ShrinkageOperator& op) {
  if (loadings.rows() != spec.p) fail("loadings do not match spectrum");
  const Matrix rotated = spec.eigvecs.transpose() * loadings;
  const Matrix s = rotated.transpose() * op.weights.asDiagonal() * rotated
                   / static_cast<double>(spec.p);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(s);
  if (solver.info() != Eigen::Success) fail("eigendecomposition failed");
  return solver.eigenvalues().reverse();
}

}  // namespace netfactor
