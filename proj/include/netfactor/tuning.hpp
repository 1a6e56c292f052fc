#pragma once

#include <string>
#include <vector>

#include "netfactor/estimator.hpp"

namespace netfactor {

struct TuningGrids {
  std::vector<double> alpha;
  std::vector<int> m;
};

/// alpha in {1/b - 1 : b = 0.05, 0.10, ..., 1.00} united with {p},
/// sorted ascending and deduplicated; m = round(p^q) for q = 0.1 ... 0.9,
/// deduplicated.
TuningGrids default_grids(int p);

/// Plug-in noise variance: (pT)^{-1} ||X - C_hat||_F^2 from the plain PCA
/// fit at the same r.
double estimate_noise_variance(const Matrix& X, const LaplacianSpectrum& spec, int r);

/// Mallows-style score (pT)^{-1} ||X - C_hat||_F^2 + 2 r sigma2 tr(D^{-1}) / (pT).
double cl_score(const Matrix& X, const FactorEstimate& est, const ShrinkageOperator& op,
                double sigma2, int r);

/// cl_score minus sigma2; tracks the estimation error of the common
/// components rather than the in-sample residual.
inline double adjusted_error(double score, double sigma2) { return score - sigma2; }

struct ScoreEntry {
  double alpha = 0.0;
  int m = 0;
  double score = 0.0;
};

struct TuningResult {
  PenaltyKind kind = PenaltyKind::none;
  double alpha_star = 0.0;
  int m_star = 0;
  std::vector<ScoreEntry> score_table;
  double sigma2_hat = 0.0;
  double best_score = 0.0;
};

/// Grid search minimizing cl_score. One fit per grid point, reusing
/// X U across the grid; sigma2 is estimated once. Ties break toward
/// smaller alpha, then smaller m.
TuningResult tune(const Matrix& X, const LaplacianSpectrum& spec, PenaltyKind kind,
                  int r, const TuningGrids& grids);

enum class CountMethod { er, one_step_lap, one_step_proj };

std::string to_string(CountMethod method);

struct FactorCountResult {
  int r_hat = 0;
  std::vector<double> ratios;  // ratios[k-1] = lambda_k / lambda_{k+1}
  CountMethod method = CountMethod::er;
  std::vector<int> stage_r;    // per-stage estimates, stage 0 = plain ER
  bool fixed_point = true;     // last two stages agree
};

/// Eigenvalue-ratio estimate of the factor count on X D^{-1} X^T.
/// A trailing eigenvalue below 1e-12 makes the ratio +infinity; ties in
/// the argmax go to the smallest k.
FactorCountResult select_r_er(const Matrix& X, const LaplacianSpectrum& spec,
                              const ShrinkageOperator& op, int k_max);

/// Pilot ER estimate, C_L tuning at that estimate, then ER on the shrunk
/// matrix. `extra_steps` > 1 repeats tune+ER from the previous estimate;
/// fixed_point reports whether the last step changed the answer.
FactorCountResult select_r_one_step(const Matrix& X, const LaplacianSpectrum& spec,
                                    PenaltyKind kind, int k_max, const TuningGrids& grids,
                                    int extra_steps = 1);

struct OracleAlpha {
  double value = 0.0;
  bool unbounded = false;  // zero denominator; callers cap at the grid max
};

/// Rate-optimal alpha computed from the true loadings:
/// projection -> p / (T ||U_1^T B||_F^2), laplacian -> 1 / (T max_j tau_j ||b_tilde_j||^2).
OracleAlpha oracle_alpha(PenaltyKind kind, const Matrix& loadings,
                         const LaplacianSpectrum& spec, int T, int m = 0);

/// Loading-risk rate function p^{-1} ||(D^{-1} - I) B||_F^2 + tr(D^{-2}) / (pT),
/// evaluated diagonally in the U basis.
double h_value(const Matrix& loadings, const LaplacianSpectrum& spec,
               const ShrinkageOperator& op, int T);

/// Eigenvalues of S = p^{-1} B^T D^{-1} B, sorted descending (diagnostic).
Vector assumption_e_eigs(const Matrix& loadings, const LaplacianSpectrum& spec,
                         const ShrinkageOperator& op);

}  // namespace netfactor
