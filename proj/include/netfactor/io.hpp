#pragma once

#include <string>
#include <vector>

#include "netfactor/simulation.hpp"
#include "netfactor/validation.hpp"

namespace netfactor {

struct PanelData {
  Matrix values;  // T x p, rows are time points
  std::vector<std::string> labels;
};

/// Strict rectangular numeric CSV. Ragged rows, non-numeric cells and
/// non-finite values are rejected with their coordinates (1-based).
PanelData load_panel_csv(const std::string& path, bool header);

enum class AdjacencyFormat { edges, dense };

/// Edge lists are two-column integer CSVs (0-based unless `one_based`);
/// dense files are p x p 0/1 matrices. Validation is delegated to
/// build_network; parse errors carry line numbers.
Network load_adjacency(const std::string& path, AdjacencyFormat format, int p,
                       bool one_based = false);

/// Matrix CSV with 17-significant-digit floats (round-trip exact).
void write_matrix_csv(const std::string& path, const Matrix& mat);
Matrix read_matrix_csv(const std::string& path);

std::string format_double(double value);

struct EstimateOutput {
  std::string method;
  double alpha = 0.0;
  int m = 0;
  double sigma2_hat = 0.0;
  double cl = 0.0;
  double adj_error = 0.0;
  bool empty_network = false;
};

/// Emits F.csv, B.csv, C.csv and report.json under out_dir.
void write_estimate_report(const std::string& out_dir, const FactorEstimate& est,
                           const EstimateOutput& meta);

void write_tuning_report(const std::string& out_dir, const TuningResult& result, int r);

void write_selection_report(const std::string& out_dir, const FactorCountResult& result);

/// Emits table.csv (case,p,T,method,mean_mse,sd_mse,mean_r,under,over)
/// and report.json.
void write_simulation_report(const std::string& out_dir, const SimulationReport& report);

/// Emits steps.csv and report.json.
void write_validation_report(const std::string& out_dir, const ValidationReport& report);

}  // namespace netfactor
