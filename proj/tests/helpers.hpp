#pragma once

// Test-only oracles, kept independent of the library's computation paths.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>
#include <vector>

#include "netfactor/estimator.hpp"
#include "netfactor/graph.hpp"

namespace test_util {

using netfactor::Matrix;
using netfactor::Vector;

// Union-find connected-component count on the adjacency matrix.
inline int component_count(const netfactor::Network& net) {
  const int p = net.node_count();
  std::vector<int> parent(p);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (net.adjacency(i, j) != 0.0) parent[find(i)] = find(j);
  int count = 0;
  for (int i = 0; i < p; ++i)
    if (find(i) == i) ++count;
  return count;
}

// Ordered double sum over all pairs, the literal network-cohesion penalty.
inline double brute_force_penalty(const Matrix& loadings, const netfactor::Network& net) {
  double total = 0.0;
  for (int i = 0; i < net.node_count(); ++i)
    for (int j = 0; j < net.node_count(); ++j)
      if (net.adjacency(i, j) != 0.0)
        total += (loadings.row(i) - loadings.row(j)).squaredNorm();
  return total;
}

// Reference estimator forming D^{-1} by dense inversion instead of the
// diagonal eigenbasis shortcut. The common components are sign-invariant,
// so no column-sign convention is needed here.
inline Matrix dense_reference_common(const Matrix& X, const netfactor::Network& net,
                                     const netfactor::LaplacianSpectrum& spec,
                                     netfactor::PenaltyKind kind, double alpha, int m,
                                     int r) {
  const int p = net.node_count();
  const auto T = X.rows();
  Matrix shrink = Matrix::Identity(p, p);
  if (kind == netfactor::PenaltyKind::laplacian) {
    const Vector degrees = net.adjacency.rowwise().sum();
    Matrix lap_n = -net.adjacency;
    lap_n.diagonal() += degrees;
    lap_n /= degrees.mean();
    shrink += alpha * lap_n;
  } else if (kind == netfactor::PenaltyKind::projection) {
    const Matrix u1 = spec.eigvecs.leftCols(p - m);
    shrink += alpha * u1 * u1.transpose();
  }
  const Matrix shrink_inv = shrink.inverse();
  const Matrix gram = X * shrink_inv * X.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
  const Matrix scores =
      solver.eigenvectors().rightCols(r) * std::sqrt(static_cast<double>(T));
  const Matrix loadings = shrink_inv * X.transpose() * scores / static_cast<double>(T);
  return scores * loadings.transpose();
}

}  // namespace test_util
