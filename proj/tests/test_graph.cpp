#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "netfactor/graph.hpp"
#include "netfactor/simulation.hpp"

using namespace netfactor;

TEST_CASE("single edge builds a symmetric adjacency") {
  const Network net = build_network(EdgeList{{0, 1}}, 2);
  Matrix expected(2, 2);
  expected << 0, 1, 1, 0;
  CHECK(net.adjacency == expected);
}

TEST_CASE("edge-list validation") {
  CHECK_THROWS_WITH(build_network(EdgeList{{0, 0}}, 2), doctest::Contains("self-loop"));
  CHECK_THROWS_WITH(build_network(EdgeList{{0, 2}}, 2), doctest::Contains("out of range"));
  CHECK_THROWS_WITH(build_network(EdgeList{{-1, 0}}, 2), doctest::Contains("out of range"));
}

TEST_CASE("dense validation") {
  Matrix asym(2, 2);
  asym << 0, 1, 0, 0;
  CHECK_THROWS_WITH(build_network(asym, 2), doctest::Contains("asymmetric"));
  Matrix diag(2, 2);
  diag << 1, 0, 0, 0;
  CHECK_THROWS_WITH(build_network(diag, 2), doctest::Contains("diagonal"));
  Matrix weighted(2, 2);
  weighted << 0, 0.5, 0.5, 0;
  CHECK_THROWS_WITH(build_network(weighted, 2), doctest::Contains("not 0/1"));
  Matrix wrong(3, 3);
  wrong.setZero();
  CHECK_THROWS(build_network(wrong, 2));

  Matrix ok(2, 2);
  ok << 0, 1, 1, 0;
  CHECK(build_network(ok, 2).adjacency == ok);
}

TEST_CASE("spectrum of a single edge") {
  const LaplacianSpectrum spec = laplacian_spectrum(build_network(EdgeList{{0, 1}}, 2));
  CHECK(spec.mean_degree == doctest::Approx(1.0));
  CHECK(spec.eigvals(0) == doctest::Approx(2.0));
  CHECK(spec.eigvals(1) == doctest::Approx(0.0));
  // sign convention: magnitude tie resolved toward the first entry
  CHECK(spec.eigvecs(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(spec.eigvecs(1, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK_FALSE(spec.empty_network);
}

TEST_CASE("spectrum of the triangle") {
  const LaplacianSpectrum spec =
      laplacian_spectrum(build_network(EdgeList{{0, 1}, {0, 2}, {1, 2}}, 3));
  CHECK(spec.mean_degree == doctest::Approx(2.0));
  CHECK(spec.eigvals(0) == doctest::Approx(1.5));
  CHECK(spec.eigvals(1) == doctest::Approx(1.5));
  CHECK(spec.eigvals(2) == doctest::Approx(0.0));
}

TEST_CASE("empty network falls back to the identity basis") {
  const LaplacianSpectrum spec = laplacian_spectrum(build_network(EdgeList{}, 3));
  CHECK(spec.empty_network);
  CHECK(spec.eigvals.isZero(0.0));
  CHECK(spec.eigvecs == Matrix::Identity(3, 3));
}

TEST_CASE("penalty on a single edge") {
  const Network net = build_network(EdgeList{{0, 1}}, 2);
  const LaplacianSpectrum spec = laplacian_spectrum(net);
  Matrix loadings(2, 1);
  loadings << 1, 0;
  CHECK(penalty_quadratic(loadings, net, spec) == doctest::Approx(2.0));
}

TEST_CASE("penalty vanishes for identical rows") {
  const Network net = build_network(EdgeList{{0, 1}, {1, 2}, {0, 3}}, 4);
  const LaplacianSpectrum spec = laplacian_spectrum(net);
  const Matrix loadings = Vector::Ones(4) * Eigen::RowVector2d(0.7, -1.3);
  CHECK(penalty_quadratic(loadings, net, spec) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("penalty rejects row-count mismatch") {
  const Network net = build_network(EdgeList{{0, 1}}, 2);
  const LaplacianSpectrum spec = laplacian_spectrum(net);
  CHECK_THROWS(penalty_quadratic(Matrix::Zero(3, 1), net, spec));
}

TEST_CASE("spectral penalty equals the brute-force double sum") {
  std::mt19937_64 rng = replication_rng(20240601, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const int p = 4 + static_cast<int>(rng() % 9);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j)
        if (rng() % 3 == 0) edges.push_back({i, j});
    const Network net = build_network(edges, p);
    const LaplacianSpectrum spec = laplacian_spectrum(net);
    if (spec.empty_network) continue;
    const Matrix loadings = gaussian_matrix(p, 2, rng);
    const double expected = test_util::brute_force_penalty(loadings, net);
    CHECK(penalty_quadratic(loadings, net, spec)
          == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("zero eigenvalues count connected components") {
  std::mt19937_64 rng = replication_rng(20240601, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const int p = 5 + static_cast<int>(rng() % 10);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j)
        if (rng() % 4 == 0) edges.push_back({i, j});
    const Network net = build_network(edges, p);
    const LaplacianSpectrum spec = laplacian_spectrum(net);
    if (spec.empty_network) continue;
    const int zeros = static_cast<int>((spec.eigvals.array() < 1e-8).count());
    CHECK(zeros == test_util::component_count(net));
  }
}

TEST_CASE("spectrum reconstructs the normalized Laplacian") {
  std::mt19937_64 rng = replication_rng(20240601, 2);
  const int p = 12;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (rng() % 2 == 0) edges.push_back({i, j});
  const Network net = build_network(edges, p);
  const LaplacianSpectrum spec = laplacian_spectrum(net);

  CHECK((spec.eigvecs.transpose() * spec.eigvecs - Matrix::Identity(p, p))
            .cwiseAbs()
            .maxCoeff()
        < 1e-10);

  const Vector degrees = net.adjacency.rowwise().sum();
  Matrix lap_n = -net.adjacency;
  lap_n.diagonal() += degrees;
  lap_n /= degrees.mean();
  const Matrix rebuilt =
      spec.eigvecs * spec.eigvals.asDiagonal() * spec.eigvecs.transpose();
  CHECK((rebuilt - lap_n).cwiseAbs().maxCoeff() < 1e-8);

  for (Index j = 0; j + 1 < p; ++j) CHECK(spec.eigvals(j) >= spec.eigvals(j + 1));
  CHECK(spec.eigvals(p - 1) == 0.0);
}

TEST_CASE("repeated runs give bit-identical eigenvectors") {
  const Network net = build_network(EdgeList{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {1, 3}}, 5);
  const LaplacianSpectrum a = laplacian_spectrum(net);
  const LaplacianSpectrum b = laplacian_spectrum(net);
  CHECK(a.eigvecs == b.eigvecs);
  CHECK(a.eigvals == b.eigvals);
}
