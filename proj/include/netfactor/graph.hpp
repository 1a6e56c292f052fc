#pragma once

#include <utility>
#include <vector>

#include "netfactor/types.hpp"

namespace netfactor {

/// Undirected prior network on p nodes, stored as a dense 0/1 adjacency
/// matrix with zero diagonal.
struct Network {
  Matrix adjacency;

  int node_count() const { return static_cast<int>(adjacency.rows()); }
};

using EdgeList = std::vector<std::pair<int, int>>;

/// Builds a Network from an edge list. Indices are 0-based; each pair sets
/// both (i,j) and (j,i). Rejects self-loops and out-of-range indices.
Network build_network(const EdgeList& edges, int p);

/// Builds a Network from a dense matrix, which must be square, symmetric,
/// {0,1}-valued and zero on the diagonal.
Network build_network(const Matrix& dense, int p);

/// Spectral decomposition of the normalized Laplacian L/d_bar, with
/// eigenvalues sorted nonincreasing and a deterministic sign convention
/// (largest-magnitude entry of each eigenvector made positive, lowest
/// index winning ties).
///
/// An empty network (mean degree 0) has no normalized Laplacian; the
/// fallback spectrum (all eigenvalues 0, U = I) makes every penalty act
/// as plain PCA and is flagged via `empty_network`.
struct LaplacianSpectrum {
  int p = 0;
  Matrix eigvecs;       // p x p orthonormal, columns u_1..u_p
  Vector eigvals;       // nonincreasing, nonnegative
  double mean_degree = 0.0;
  bool empty_network = false;
};

LaplacianSpectrum laplacian_spectrum(const Network& net);

/// Quadratic network-cohesion form sum_ij A_ij ||b_i - b_j||^2, evaluated
/// spectrally as 2 * d_bar * sum_j tau_j ||row_j(U^T B)||^2.
double penalty_quadratic(const Matrix& loadings, const Network& net,
                         const LaplacianSpectrum& spec);

}  // namespace netfactor
