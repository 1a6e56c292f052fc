#pragma once

#include <optional>
#include <vector>

#include "netfactor/tuning.hpp"

namespace netfactor {

/// Demeans each column and scales it to unit sample standard deviation
/// (denominator T-1). Constant columns are rejected with their index.
Matrix standardize(const Matrix& X);

/// (pr)^{-1} ||cur - prev||_F^2 after aligning each column of cur to prev
/// by sign (flip when the inner product is negative).
double loading_drift(const Matrix& prev, const Matrix& cur);

/// Aligns cur's column signs to prev and returns the flipped copy.
Matrix align_columns(const Matrix& prev, const Matrix& cur);

struct ValidationStep {
  int step = 0;       // 0-based row index of the predicted observation
  double mse = 0.0;
  double r2 = 0.0;
  double b_drift = 0.0;  // NaN on the first step
};

struct ValidationOptions {
  std::optional<double> alpha;  // bypass tuning
  std::optional<int> m;
  bool retune_each_window = false;
};

struct ValidationReport {
  PenaltyKind method = PenaltyKind::none;
  int window = 0;
  int r = 0;
  double alpha_used = 0.0;
  int m_used = 0;
  bool retuned_each_window = false;
  std::vector<ValidationStep> steps;
  double ave_mse = 0.0;
  double ave_r2 = 0.0;
  double var_b = 0.0;      // mean drift over steps with a predecessor
  double adj_error = 0.0;  // full-sample adjusted C_L error
  double sigma2_hat = 0.0;
};

/// Rolling one-step-ahead validation: for each t past the window, fit
/// loadings on the trailing window, regress x_t on them, and record the
/// cross-sectional MSE, R^2 and the loading drift between consecutive
/// fits. Tuning parameters are either fixed via options, or selected once
/// on the first window (optionally re-tuned per window).
ValidationReport recursive_validate(const Matrix& X, const LaplacianSpectrum& spec,
                                    PenaltyKind method, int window, int r,
                                    const TuningGrids& grids,
                                    const ValidationOptions& options = {});

}  // namespace netfactor
