#include "netfactor/graph.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

namespace netfactor {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

Network build_network(const EdgeList& edges, int p) {
  if (p <= 0) fail("node count must be positive");
  Matrix adj = Matrix::Zero(p, p);
  for (const auto& [i, j] : edges) {
    if (i < 0 || i >= p || j < 0 || j >= p)
      fail("edge index out of range: (" + std::to_string(i) + "," + std::to_string(j) + ")");
    if (i == j) fail("self-loop at node " + std::to_string(i));
    adj(i, j) = 1.0;
    adj(j, i) = 1.0;
  }
  return Network{std::move(adj)};
}

Network build_network(const Matrix& dense, int p) {
  if (p <= 0) fail("node count must be positive");
  if (dense.rows() != p || dense.cols() != p)
    fail("dense adjacency must be " + std::to_string(p) + "x" + std::to_string(p));
  for (Index i = 0; i < p; ++i) {
    if (dense(i, i) != 0.0) fail("nonzero diagonal at node " + std::to_string(i));
    for (Index j = 0; j < p; ++j) {
      const double v = dense(i, j);
      if (v != 0.0 && v != 1.0)
        fail("adjacency entry not 0/1 at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      if (v != dense(j, i))
        fail("asymmetric adjacency at (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
  return Network{dense};
}

LaplacianSpectrum laplacian_spectrum(const Network& net) {
  const int p = net.node_count();
  LaplacianSpectrum spec;
  spec.p = p;

  const Vector degrees = net.adjacency.rowwise().sum();
  spec.mean_degree = degrees.mean();
  if (spec.mean_degree == 0.0) {
    spec.eigvecs = Matrix::Identity(p, p);
    spec.eigvals = Vector::Zero(p);
    spec.empty_network = true;
    return spec;
  }

  Matrix lap_n = (-net.adjacency) / spec.mean_degree;
  lap_n.diagonal() += degrees / spec.mean_degree;

  Eigen::SelfAdjointEigenSolver<Matrix> solver(lap_n);
  if (solver.info() != Eigen::Success) fail("eigendecomposition failed");

  // Eigen sorts ascending; store nonincreasing.
  spec.eigvals = solver.eigenvalues().reverse();
  spec.eigvecs = solver.eigenvectors().rowwise().reverse();

  for (Index j = 0; j < p; ++j) {
    if (std::abs(spec.eigvals(j)) < 1e-12) spec.eigvals(j) = 0.0;
    Index lead = 0;
    for (Index i = 1; i < p; ++i)
      if (std::abs(spec.eigvecs(i, j)) > std::abs(spec.eigvecs(lead, j))) lead = i;
    if (spec.eigvecs(lead, j) < 0.0) spec.eigvecs.col(j) = -spec.eigvecs.col(j);
  }
  return spec;
}

double penalty_quadratic(const Matrix& loadings, const Network& net,
                         const LaplacianSpectrum& spec) {
  if (loadings.rows() != net.node_count())
    fail("loadings must have one row per network node");
  if (spec.p != net.node_count()) fail("spectrum does not match network");
  const Matrix rotated = spec.eigvecs.transpose() * loadings;
  return 2.0 * spec.mean_degree * (spec.eigvals.array() * rotated.rowwise().squaredNorm().array()).sum();
}

}  // namespace netfactor
