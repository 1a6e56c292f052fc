#pragma once

#include <string>

#include "netfactor/graph.hpp"
#include "netfactor/types.hpp"

namespace netfactor {

enum class PenaltyKind { none, laplacian, projection };

std::string to_string(PenaltyKind kind);
PenaltyKind penalty_kind_from_string(const std::string& name);

/// Diagonal representation of D^{-1} in the Laplacian eigenbasis.
/// weights[j] multiplies the j-th spectral coordinate:
///   none        -> 1
///   laplacian   -> 1 / (1 + alpha * tau_j)
///   projection  -> 1 / (1 + alpha) for j < p - m, else 1
struct ShrinkageOperator {
  PenaltyKind kind = PenaltyKind::none;
  double alpha = 0.0;
  int m = 0;  // projection only
  Vector weights;

  double trace_inv() const { return weights.sum(); }
  double trace_inv_sq() const { return weights.squaredNorm(); }
};

ShrinkageOperator shrink_weights(const LaplacianSpectrum& spec, PenaltyKind kind,
                                 double alpha, int m = 0);

/// Operator with unit weights (plain PCA).
ShrinkageOperator identity_operator(int p);

/// Penalized principal-component estimate of an r-factor model.
/// scores (T x r) satisfy F^T F / T = I_r; loadings (p x r) are the
/// closed-form minimizer B = T^{-1} D^{-1} X^T F; eigvals are the leading
/// r eigenvalues of (pT)^{-1} X D^{-1} X^T.
struct FactorEstimate {
  int r = 0;
  Matrix scores;
  Matrix loadings;
  ShrinkageOperator op;
  Vector eigvals;
  bool eigengap_degenerate = false;  // set when eigvals[r-1] - next < 1e-10
};

FactorEstimate fit(const Matrix& X, const LaplacianSpectrum& spec,
                   const ShrinkageOperator& op, int r);

/// C_hat = F_hat * B_hat^T.
Matrix common_components(const FactorEstimate& est);

/// Penalized least-squares objective evaluated at (F, B):
/// (pT)^{-1} ||X - F B^T||_F^2 plus the spectral penalty of `op`.
/// F must satisfy F^T F / T = I_r within 1e-6.
double objective_q2(const Matrix& X, const Matrix& scores, const Matrix& loadings,
                    const LaplacianSpectrum& spec, const ShrinkageOperator& op);

}  // namespace netfactor
