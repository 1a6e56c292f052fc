#include "netfactor/estimator.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace netfactor {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void fix_column_signs(Matrix& mat) {
  for (Index j = 0; j < mat.cols(); ++j) {
    Index lead = 0;
    for (Index i = 1; i < mat.rows(); ++i)
      if (std::abs(mat(i, j)) > std::abs(mat(lead, j))) lead = i;
    if (mat(lead, j) < 0.0) mat.col(j) = -mat.col(j);
  }
}

}  // namespace

std::string to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::none: return "pca";
    case PenaltyKind::laplacian: return "lap";
    case PenaltyKind::projection: return "proj";
  }
  return "pca";
}

PenaltyKind penalty_kind_from_string(const std::string& name) {
  if (name == "pca" || name == "none") return PenaltyKind::none;
  if (name == "lap" || name == "laplacian") return PenaltyKind::laplacian;
  if (name == "proj" || name == "projection") return PenaltyKind::projection;
  fail("unknown method '" + name + "' (expected pca, lap or proj)");
}

ShrinkageOperator shrink_weights(const LaplacianSpectrum& spec, PenaltyKind kind,
                                 double alpha, int m) {
  if (alpha < 0.0) fail("alpha must be nonnegative");
  const int p = spec.p;
  ShrinkageOperator op;
  op.kind = kind;
  op.alpha = alpha;
  op.weights = Vector::Ones(p);
  switch (kind) {
    case PenaltyKind::none:
      break;
    case PenaltyKind::laplacian:
      if (!spec.empty_network)
        op.weights = (1.0 + alpha * spec.eigvals.array()).inverse();
      break;
    case PenaltyKind::projection:
      if (m < 0 || m > p) fail("truncation parameter m out of range [0, p]");
      op.m = m;
      if (!spec.empty_network)
        op.weights.head(p - m).setConstant(1.0 / (1.0 + alpha));
      break;
  }
  return op;
}

ShrinkageOperator identity_operator(int p) {
  ShrinkageOperator op;
  op.weights = Vector::Ones(p);
  return op;
}

FactorEstimate fit(const Matrix& X, const LaplacianSpectrum& spec,
                   const ShrinkageOperator& op, int r) {
  const Index T = X.rows();
  const Index p = X.cols();
  if (p != spec.p) fail("panel width does not match spectrum");
  if (op.weights.size() != p) fail("operator does not match spectrum");
  if (r < 1 || r > std::min(T, p)) fail("factor count r out of range [1, min(T,p)]");
  if (!X.allFinite()) fail("panel contains non-finite values");

  // Work in the Laplacian eigenbasis: X D^{-1} X^T = Xt diag(w) Xt^T.
  const Matrix Xt = X * spec.eigvecs;
  const Matrix gram = Xt * op.weights.asDiagonal() * Xt.transpose();

  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  if (solver.info() != Eigen::Success) fail("eigendecomposition failed");

  FactorEstimate est;
  est.r = r;
  est.op = op;
  est.scores = solver.eigenvectors().rightCols(r).rowwise().reverse()
               * std::sqrt(static_cast<double>(T));
  fix_column_signs(est.scores);
  est.loadings = spec.eigvecs
                 * (op.weights.asDiagonal() * (Xt.transpose() * est.scores))
                 / static_cast<double>(T);
  const double scale = static_cast<double>(p) * static_cast<double>(T);
  est.eigvals = solver.eigenvalues().tail(r).reverse() / scale;
  if (r < T) {
    const double next = solver.eigenvalues()(T - r - 1) / scale;
    est.eigengap_degenerate = est.eigvals(r - 1) - next < 1e-10;
  }
  return est;
}

Matrix common_components(const FactorEstimate& est) {
  return est.scores * est.loadings.transpose();
}

double objective_q2(const Matrix& X, const Matrix& scores, const Matrix& loadings,
                    const LaplacianSpectrum& spec, const ShrinkageOperator& op) {
  const Index T = X.rows();
  const Index p = X.cols();
  const Index r = scores.cols();
  if (scores.rows() != T || loadings.rows() != p || loadings.cols() != r)
    fail("shape mismatch between panel, scores and loadings");

  const Matrix gram_f = scores.transpose() * scores / static_cast<double>(T);
  if ((gram_f - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-6)
    fail("scores are not orthonormal: F^T F / T != I");

  const double scale = static_cast<double>(p) * static_cast<double>(T);
  double value = (X - scores * loadings.transpose()).squaredNorm() / scale;

  if (op.kind == PenaltyKind::laplacian) {
    const Matrix rotated = spec.eigvecs.transpose() * loadings;
    value += op.alpha / static_cast<double>(p)
             * (spec.eigvals.array() * rotated.rowwise().squaredNorm().array()).sum();
  } else if (op.kind == PenaltyKind::projection) {
    const Matrix rotated = spec.eigvecs.leftCols(p - op.m).transpose() * loadings;
    value += op.alpha / static_cast<double>(p) * rotated.squaredNorm();
  }
  return value;
}

}  // namespace netfactor
