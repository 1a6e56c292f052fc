#include "netfactor/simulation.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace netfactor {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

constexpr int kGroupCount = 50;     // case 3
constexpr int kIsolatedCount = 50;  // case 4
constexpr int kTrailingBlock = 50;  // case 2 eigenvector split
constexpr double kZeroEigTol = 1e-3;

double bernoulli(double prob, std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < prob ? 1.0 : 0.0;
}

}  // namespace

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

uint64_t replication_seed(uint64_t master, int rep) {
  return splitmix64(master + (static_cast<uint64_t>(rep) + 1) * 0x9E3779B97F4A7C15ULL);
}

std::mt19937_64 replication_rng(uint64_t master, int rep) {
  return std::mt19937_64(replication_seed(master, rep));
}

Matrix gaussian_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix mat(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) mat(i, j) = normal(rng);
  return mat;
}

Matrix random_orthonormal(int rows, int cols, std::mt19937_64& rng) {
  if (cols > rows) fail("cannot orthonormalize more columns than rows");
  const Matrix draw = gaussian_matrix(rows, cols, rng);
  Eigen::HouseholderQR<Matrix> qr(draw);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Matrix r_factor = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (int j = 0; j < cols; ++j)
    if (r_factor(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Matrix banded_correlation(int n) {
  Matrix mat = Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int off = 1; off <= 2; ++off)
      if (i + off < n) {
        mat(i, i + off) = 0.2;
        mat(i + off, i) = 0.2;
      }
  return mat;
}

Network gen_network(int case_id, int p, std::mt19937_64& rng) {
  switch (case_id) {
    case 1:
    case 2: {
      if (p < 2) fail("case 1/2 network needs p >= 2");
      Matrix adj = Matrix::Zero(p, p);
      for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
          const double edge = bernoulli(0.5, rng);
          adj(i, j) = edge;
          adj(j, i) = edge;
        }
      return Network{std::move(adj)};
    }
    case 3: {
      if (p < kGroupCount) fail("case 3 network needs p >= 50");
      std::uniform_int_distribution<int> pick(0, kGroupCount - 1);
      std::vector<int> group(p);
      for (int i = 0; i < p; ++i) group[i] = pick(rng);
      Matrix adj = Matrix::Zero(p, p);
      for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
          if (group[i] == group[j]) {
            adj(i, j) = 1.0;
            adj(j, i) = 1.0;
          }
      return Network{std::move(adj)};
    }
    case 4: {
      if (p <= kIsolatedCount) fail("case 4 network needs p > 50");
      const int linked = p - kIsolatedCount;
      std::vector<bool> active(linked);
      for (int i = 0; i < linked; ++i) active[i] = bernoulli(0.5, rng) > 0.5;
      Matrix adj = Matrix::Zero(p, p);
      for (int i = 0; i < linked; ++i)
        for (int j = i + 1; j < linked; ++j) {
          double edge = 0.0;
          if (active[i] && active[j])
            edge = 1.0;
          else if (!active[i] && !active[j])
            edge = bernoulli(0.1, rng);
          adj(i, j) = edge;
          adj(j, i) = edge;
        }
      return Network{std::move(adj)};
    }
    default:
      fail("unknown simulation case " + std::to_string(case_id));
  }
}

Matrix gen_loadings(int case_id, const LaplacianSpectrum& spec, int p, int r,
                    std::mt19937_64& rng) {
  if (spec.p != p) fail("spectrum does not match p");
  if (r < 1) fail("r must be positive");
  switch (case_id) {
    case 1:
      return gaussian_matrix(p, r, rng);
    case 2: {
      if (p <= kTrailingBlock + r) fail("case 2 loadings need p > 50 + r");
      const int head = p - kTrailingBlock;
      const Matrix gamma1 = random_orthonormal(head, r, rng);
      const Matrix gamma2 = random_orthonormal(kTrailingBlock, r, rng);
      const double root_p = std::sqrt(static_cast<double>(p));
      return 0.25 * root_p * spec.eigvecs.leftCols(head) * gamma1
             + root_p * spec.eigvecs.rightCols(kTrailingBlock) * gamma2;
    }
    case 3:
    case 4: {
      int d = 0;
      for (Index j = 0; j < p; ++j)
        if (spec.eigvals(j) < kZeroEigTol) ++d;
      if (d == 0 || d >= p) fail("degenerate eigenvalue split for case 3/4 loadings");
      if (d < r) fail("too few near-zero eigenvalues for orthonormal trailing block");
      const int head = p - d;
      Matrix gamma1(head, r);
      for (int j = 0; j < head; ++j)
        gamma1.row(j).setConstant(1.0 / std::sqrt(spec.eigvals(j)));
      const Matrix gamma2 = random_orthonormal(d, r, rng);
      const double s = static_cast<double>(p) * r / gamma1.squaredNorm();
      return 0.25 * std::sqrt(s) * spec.eigvecs.leftCols(head) * gamma1
             + std::sqrt(static_cast<double>(p)) * spec.eigvecs.rightCols(d) * gamma2;
    }
    default:
      fail("unknown simulation case " + std::to_string(case_id));
  }
}

Matrix gen_factors(int T, int r, std::mt19937_64& rng) {
  if (T < 1 || r < 1) fail("factor matrix needs positive dimensions");
  std::normal_distribution<double> normal(0.0, 1.0);
  const double phi = 0.2;
  const double stationary_sd = 1.0 / std::sqrt(1.0 - phi * phi);
  Matrix factors(T, r);
  for (int k = 0; k < r; ++k) {
    factors(0, k) = stationary_sd * normal(rng);
    for (int t = 1; t < T; ++t) factors(t, k) = phi * factors(t - 1, k) + normal(rng);
  }
  return factors;
}

Matrix gen_errors(int T, int p, double sigma_e2, std::mt19937_64& rng) {
  if (T < 3 || p < 3) fail("error matrix needs T, p >= 3");
  if (sigma_e2 < 0.0) fail("sigma_e2 must be nonnegative");
  const Matrix eps = std::sqrt(sigma_e2) * gaussian_matrix(T, p, rng);
  return banded_correlation(T) * eps * banded_correlation(p);
}

double mse_common(const Matrix& c_hat, const Matrix& c_true) {
  if (c_hat.rows() != c_true.rows() || c_hat.cols() != c_true.cols())
    fail("common-component shapes do not match");
  return (c_hat - c_true).squaredNorm()
         / (static_cast<double>(c_hat.rows()) * static_cast<double>(c_hat.cols()));
}

namespace {

struct RepResult {
  double mse_pca = 0.0, mse_lap = 0.0, mse_proj = 0.0;
  int r_er = 0, r_lap = 0, r_proj = 0;
};

void validate_config(const SimulationConfig& c) {
  if (c.case_id < 1 || c.case_id > 4) fail("case must be 1..4");
  if (c.reps < 1) fail("reps must be positive");
  if (c.r < 1 || c.r >= std::min(c.p, c.T)) fail("need 1 <= r < min(T, p)");
  if (c.sigma_e2 < 0.0) fail("sigma_e2 must be nonnegative");
  if (c.case_id == 2 && c.p <= 50) fail("case 2 requires p > 50");
  if (c.case_id == 3 && c.p < 50) fail("case 3 requires p >= 50");
  if (c.case_id == 4 && c.p <= 50) fail("case 4 requires p > 50");
  if (c.with_selection && c.k_max + 1 > std::min(c.p, c.T))
    fail("k_max too large for the panel");
}

RepResult run_replication(const SimulationConfig& c, const TuningGrids& grids, int rep) {
  std::mt19937_64 rng = replication_rng(c.seed, rep);
  const Network net = gen_network(c.case_id, c.p, rng);
  const LaplacianSpectrum spec = laplacian_spectrum(net);
  const Matrix loadings = gen_loadings(c.case_id, spec, c.p, c.r, rng);
  const Matrix factors = gen_factors(c.T, c.r, rng);
  const Matrix errors = gen_errors(c.T, c.p, c.sigma_e2, rng);
  const Matrix common = factors * loadings.transpose();
  const Matrix X = common + errors;

  RepResult out;
  if (c.with_mse) {
    const FactorEstimate pca = fit(X, spec, identity_operator(c.p), c.r);
    out.mse_pca = mse_common(common_components(pca), common);
    for (PenaltyKind kind : {PenaltyKind::laplacian, PenaltyKind::projection}) {
      const TuningResult tuned = tune(X, spec, kind, c.r, grids);
      const ShrinkageOperator op =
          shrink_weights(spec, kind, tuned.alpha_star, tuned.m_star);
      const double mse = mse_common(common_components(fit(X, spec, op, c.r)), common);
      (kind == PenaltyKind::laplacian ? out.mse_lap : out.mse_proj) = mse;
    }
  }
  if (c.with_selection) {
    out.r_er = select_r_er(X, spec, identity_operator(c.p), c.k_max).r_hat;
    out.r_lap = select_r_one_step(X, spec, PenaltyKind::laplacian, c.k_max, grids).r_hat;
    out.r_proj = select_r_one_step(X, spec, PenaltyKind::projection, c.k_max, grids).r_hat;
  }
  return out;
}

MethodStats summarize(const std::vector<double>& values) {
  MethodStats stats;
  if (values.empty()) return stats;
  const double n = static_cast<double>(values.size());
  for (double v : values) stats.mean_mse += v;
  stats.mean_mse /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - stats.mean_mse) * (v - stats.mean_mse);
    stats.sd_mse = std::sqrt(ss / (n - 1.0));
  }
  return stats;
}

SelectionStats summarize_selection(const std::vector<int>& values, int true_r) {
  SelectionStats stats;
  if (values.empty()) return stats;
  for (int v : values) {
    stats.mean_r += v;
    if (v < true_r) ++stats.under;
    if (v > true_r) ++stats.over;
  }
  stats.mean_r /= static_cast<double>(values.size());
  return stats;
}

}  // namespace

SimulationReport run_case(const SimulationConfig& config, int threads) {
  validate_config(config);
  const TuningGrids grids =
      config.grids.alpha.empty() ? default_grids(config.p) : config.grids;

  const auto start = std::chrono::steady_clock::now();
  std::vector<RepResult> results(config.reps);

  const int workers = std::max(1, std::min(threads, config.reps));
  if (workers == 1) {
    for (int k = 0; k < config.reps; ++k) results[k] = run_replication(config, grids, k);
  } else {
    std::vector<std::thread> pool;
    std::mutex error_mutex;
    std::exception_ptr first_error;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int k = w; k < config.reps; k += workers)
            results[k] = run_replication(config, grids, k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  SimulationReport report;
  report.config = config;
  report.config.grids = grids;
  for (const RepResult& res : results) {
    if (config.with_mse) {
      report.mse_pca.push_back(res.mse_pca);
      report.mse_lap.push_back(res.mse_lap);
      report.mse_proj.push_back(res.mse_proj);
    }
    if (config.with_selection) {
      report.r_er.push_back(res.r_er);
      report.r_one_step_lap.push_back(res.r_lap);
      report.r_one_step_proj.push_back(res.r_proj);
    }
  }
  report.pca = summarize(report.mse_pca);
  report.lap = summarize(report.mse_lap);
  report.proj = summarize(report.mse_proj);
  report.er = summarize_selection(report.r_er, config.r);
  report.one_step_lap = summarize_selection(report.r_one_step_lap, config.r);
  report.one_step_proj = summarize_selection(report.r_one_step_proj, config.r);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

AppendixBMse appendix_b_mse(PenaltyKind kind, const std::vector<double>& group_shares,
                            double z, int p, int T) {
  if (group_shares.empty()) fail("at least one group required");
  if (z <= 0.0) fail("z must be positive");
  if (p < 1 || T < 1) fail("p and T must be positive");
  for (double theta : group_shares)
    if (theta <= 0.0 || theta >= 1.0) fail("group shares must lie in (0, 1)");

  const double q = static_cast<double>(group_shares.size());
  const double pT = static_cast<double>(p) * T;
  double theta_bar = 0.0;
  for (double theta : group_shares) theta_bar += theta;
  theta_bar /= q;

  const double c = 1.0 / (T * z);
  AppendixBMse out;
  if (kind == PenaltyKind::laplacian) {
    double sum = 0.0;
    for (double theta : group_shares) {
      const double weight = theta_bar / theta;           // 1 / tau on this block
      sum += p * theta * weight / (weight + c);           // multiplicity p * theta
    }
    out.leading = sum / pT;
    out.tail = q / pT;
  } else if (kind == PenaltyKind::projection) {
    double sum_w = 0.0;
    for (double theta : group_shares) sum_w += p * theta * (theta_bar / theta);
    const double w_bar = sum_w / p;
    const double alpha = 1.0 / (T * z * w_bar);
    out.leading = w_bar / (w_bar + c) / T;
    out.tail = alpha * alpha / ((1.0 + alpha) * (1.0 + alpha)) * q / pT;
  } else {
    fail("appendix-b formula expects a penalized kind");
  }
  out.value = out.leading + out.tail;
  return out;
}

}  // namespace netfactor
