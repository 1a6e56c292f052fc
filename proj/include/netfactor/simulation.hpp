#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "netfactor/tuning.hpp"

namespace netfactor {

uint64_t splitmix64(uint64_t x);

/// Seed for replication k of a run with the given master seed:
/// splitmix64(master + (k+1) * 0x9E3779B97F4A7C15). Stable across versions.
uint64_t replication_seed(uint64_t master, int rep);

std::mt19937_64 replication_rng(uint64_t master, int rep);

/// iid standard-normal matrix, filled row by row.
Matrix gaussian_matrix(int rows, int cols, std::mt19937_64& rng);

/// Column-orthonormal matrix from the thin QR of a Gaussian draw,
/// with column signs fixed by a positive R diagonal.
Matrix random_orthonormal(int rows, int cols, std::mt19937_64& rng);

/// Banded matrix with unit diagonal and 0.2 at offsets +-1 and +-2.
Matrix banded_correlation(int n);

struct SimulationConfig {
  int case_id = 1;  // 1..4
  int p = 100;
  int T = 50;
  int r = 3;
  double sigma_e2 = 1.0;
  int reps = 100;
  uint64_t seed = 1;
  int k_max = 10;
  TuningGrids grids;       // empty -> default_grids(p)
  bool with_mse = true;
  bool with_selection = true;
};

struct MethodStats {
  double mean_mse = 0.0;
  double sd_mse = 0.0;
};

struct SelectionStats {
  double mean_r = 0.0;
  int under = 0;
  int over = 0;
};

struct SimulationReport {
  SimulationConfig config;
  MethodStats pca, lap, proj;
  SelectionStats er, one_step_lap, one_step_proj;
  std::vector<double> mse_pca, mse_lap, mse_proj;      // per replication
  std::vector<int> r_er, r_one_step_lap, r_one_step_proj;
  double wall_seconds = 0.0;
};

/// Prior network of the given simulation case:
///   1, 2 -> Erdos-Renyi(0.5)
///   3    -> 50 random groups, within-group complete
///   4    -> last 50 nodes isolated; the rest active/inactive with
///           probability 1/2, active pairs always linked, inactive pairs
///           linked with probability 0.1, cross pairs unlinked
Network gen_network(int case_id, int p, std::mt19937_64& rng);

/// Loading matrix of the given case, built on the spectrum of the matching
/// network. Cases 2-4 mix a shrunk component on the leading eigenvectors
/// with a full-strength component on the trailing ones.
Matrix gen_loadings(int case_id, const LaplacianSpectrum& spec, int p, int r,
                    std::mt19937_64& rng);

/// Columns are independent AR(1) processes with coefficient 0.2 and unit
/// innovation variance, started from the stationary distribution.
Matrix gen_factors(int T, int r, std::mt19937_64& rng);

/// E = P1 * eps * P2 with eps iid N(0, sigma_e2) and banded P1, P2.
Matrix gen_errors(int T, int p, double sigma_e2, std::mt19937_64& rng);

/// (pT)^{-1} ||C_hat - C||_F^2.
double mse_common(const Matrix& c_hat, const Matrix& c_true);

/// Monte Carlo driver: per replication draws the DGP, records MSEs for
/// pca / tuned laplacian / tuned projection and the factor-count estimates
/// of ER and both one-step-further variants. Deterministic for a fixed
/// (config, seed) regardless of `threads`.
SimulationReport run_case(const SimulationConfig& config, int threads = 1);

struct AppendixBMse {
  double value = 0.0;    // leading + tail
  double leading = 0.0;  // dominant shrinkage term
  double tail = 0.0;     // O(q/(pT)) remainder
};

/// Analytic loading-MSE approximation for the block-group network whose
/// normalized-Laplacian spectrum repeats theta_k / theta_bar with
/// multiplicity p * theta_k plus q zeros, under constant tau_j ||b_j||^2 = z.
AppendixBMse appendix_b_mse(PenaltyKind kind, const std::vector<double>& group_shares,
                            double z, int p, int T);

}  // namespace netfactor
