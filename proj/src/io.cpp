#include "netfactor/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace netfactor {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream file(path);
  if (!file) fail("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(file, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) fail("empty file: " + path);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trimmed(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

double parse_cell(const std::string& raw, std::size_t line_no, std::size_t col_no) {
  const std::string cell = trimmed(raw);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value))
    fail("invalid numeric cell at (row " + std::to_string(line_no) + ", col "
         + std::to_string(col_no) + ")");
  return value;
}

long parse_index(const std::string& raw, std::size_t line_no) {
  const std::string cell = trimmed(raw);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size())
    fail("invalid node index at line " + std::to_string(line_no));
  return value;
}

Matrix parse_matrix(const std::vector<std::string>& lines, std::size_t first_line,
                    std::size_t line_offset) {
  const std::size_t rows = lines.size() - first_line;
  const std::size_t cols = split_csv(lines[first_line]).size();
  Matrix mat(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto cells = split_csv(lines[first_line + i]);
    const std::size_t line_no = first_line + i + line_offset;
    if (cells.size() != cols)
      fail("ragged row at line " + std::to_string(line_no) + ": expected "
           + std::to_string(cols) + " cells, got " + std::to_string(cells.size()));
    for (std::size_t j = 0; j < cols; ++j)
      mat(i, j) = parse_cell(cells[j], line_no, j + 1);
  }
  return mat;
}

void write_lines(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) fail("cannot write file: " + path);
  file << content;
  if (!file) fail("write failed: " + path);
}

void write_json_file(const std::string& path, const json& doc) {
  write_lines(path, doc.dump(2) + "\n");
}

json grids_to_json(const TuningGrids& grids) {
  return json{{"alpha", grids.alpha}, {"m", grids.m}};
}

}  // namespace

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

PanelData load_panel_csv(const std::string& path, bool header) {
  const auto lines = read_lines(path);
  PanelData panel;
  std::size_t first = 0;
  if (header) {
    if (lines.size() < 2) fail("panel file has a header but no data rows: " + path);
    for (const auto& label : split_csv(lines[0])) panel.labels.push_back(trimmed(label));
    first = 1;
  }
  panel.values = parse_matrix(lines, first, 1);
  if (header && panel.labels.size() != static_cast<std::size_t>(panel.values.cols()))
    fail("header width does not match data width");
  return panel;
}

Network load_adjacency(const std::string& path, AdjacencyFormat format, int p,
                       bool one_based) {
  if (format == AdjacencyFormat::dense) {
    const auto lines = read_lines(path);
    return build_network(parse_matrix(lines, 0, 1), p);
  }
  const auto lines = read_lines(path);
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trimmed(lines[i]).empty()) continue;
    const auto cells = split_csv(lines[i]);
    if (cells.size() != 2)
      fail("expected two columns at line " + std::to_string(i + 1));
    long a = parse_index(cells[0], i + 1);
    long b = parse_index(cells[1], i + 1);
    if (one_based) {
      --a;
      --b;
    }
    if (a < 0 || a >= p || b < 0 || b >= p)
      fail("node index out of range at line " + std::to_string(i + 1));
    edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
  }
  return build_network(edges, p);
}

void write_matrix_csv(const std::string& path, const Matrix& mat) {
  std::string out;
  out.reserve(static_cast<std::size_t>(mat.size()) * 12);
  for (Index i = 0; i < mat.rows(); ++i) {
    for (Index j = 0; j < mat.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(mat(i, j));
    }
    out += '\n';
  }
  write_lines(path, out);
}

Matrix read_matrix_csv(const std::string& path) {
  return parse_matrix(read_lines(path), 0, 1);
}

void write_estimate_report(const std::string& out_dir, const FactorEstimate& est,
                           const EstimateOutput& meta) {
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_matrix_csv((dir / "F.csv").string(), est.scores);
  write_matrix_csv((dir / "B.csv").string(), est.loadings);
  write_matrix_csv((dir / "C.csv").string(), common_components(est));

  json doc;
  doc["method"] = meta.method;
  doc["r"] = est.r;
  doc["alpha"] = meta.alpha;
  doc["m"] = meta.m;
  doc["sigma2_hat"] = meta.sigma2_hat;
  doc["cl_score"] = meta.cl;
  doc["adjusted_error"] = meta.adj_error;
  doc["trace_d_inv"] = est.op.trace_inv();
  doc["eigenvalues"] = std::vector<double>(est.eigvals.data(),
                                           est.eigvals.data() + est.eigvals.size());
  doc["eigengap_degenerate"] = est.eigengap_degenerate;
  doc["empty_network"] = meta.empty_network;
  write_json_file((dir / "report.json").string(), doc);
}

void write_tuning_report(const std::string& out_dir, const TuningResult& result, int r) {
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  json table = json::array();
  for (const ScoreEntry& entry : result.score_table)
    table.push_back({{"alpha", entry.alpha}, {"m", entry.m}, {"score", entry.score}});
  json doc;
  doc["method"] = to_string(result.kind);
  doc["r"] = r;
  doc["alpha"] = result.alpha_star;
  doc["m"] = result.m_star;
  doc["sigma2_hat"] = result.sigma2_hat;
  doc["cl_score"] = result.best_score;
  doc["score_table"] = table;
  write_json_file((dir / "report.json").string(), doc);
}

void write_selection_report(const std::string& out_dir, const FactorCountResult& result) {
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  json doc;
  doc["method"] = to_string(result.method);
  doc["r_hat"] = result.r_hat;
  json ratios = json::array();
  for (double ratio : result.ratios)
    ratios.push_back(std::isfinite(ratio) ? json(ratio) : json("inf"));
  doc["ratios"] = ratios;
  doc["stage_r"] = result.stage_r;
  doc["fixed_point"] = result.fixed_point;
  write_json_file((dir / "report.json").string(), doc);
}

void write_simulation_report(const std::string& out_dir, const SimulationReport& report) {
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  std::string table = "case,p,T,method,mean_mse,sd_mse,mean_r,under,over\n";
  const auto row = [&](const std::string& method, const MethodStats& mse,
                       const SelectionStats& sel) {
    table += std::to_string(report.config.case_id) + ','
             + std::to_string(report.config.p) + ',' + std::to_string(report.config.T)
             + ',' + method + ',' + format_double(mse.mean_mse) + ','
             + format_double(mse.sd_mse) + ',' + format_double(sel.mean_r) + ','
             + std::to_string(sel.under) + ',' + std::to_string(sel.over) + '\n';
  };
  row("pca", report.pca, report.er);
  row("lap", report.lap, report.one_step_lap);
  row("proj", report.proj, report.one_step_proj);
  write_lines((dir / "table.csv").string(), table);

  json doc;
  doc["config"] = {{"case", report.config.case_id},
                   {"p", report.config.p},
                   {"T", report.config.T},
                   {"r", report.config.r},
                   {"sigma_e2", report.config.sigma_e2},
                   {"reps", report.config.reps},
                   {"seed", report.config.seed},
                   {"k_max", report.config.k_max},
                   {"with_mse", report.config.with_mse},
                   {"with_selection", report.config.with_selection},
                   {"grids", grids_to_json(report.config.grids)}};
  const auto stats = [](const MethodStats& s) {
    return json{{"mean_mse", s.mean_mse}, {"sd_mse", s.sd_mse}};
  };
  const auto sel = [](const SelectionStats& s) {
    return json{{"mean_r", s.mean_r}, {"under", s.under}, {"over", s.over}};
  };
  doc["mse"] = {{"pca", stats(report.pca)},
                {"lap", stats(report.lap)},
                {"proj", stats(report.proj)}};
  doc["selection"] = {{"er", sel(report.er)},
                      {"one_step_lap", sel(report.one_step_lap)},
                      {"one_step_proj", sel(report.one_step_proj)}};
  doc["per_rep"] = {{"mse_pca", report.mse_pca},
                    {"mse_lap", report.mse_lap},
                    {"mse_proj", report.mse_proj},
                    {"r_er", report.r_er},
                    {"r_one_step_lap", report.r_one_step_lap},
                    {"r_one_step_proj", report.r_one_step_proj}};
  doc["wall_seconds"] = report.wall_seconds;
  write_json_file((dir / "report.json").string(), doc);
}

void write_validation_report(const std::string& out_dir, const ValidationReport& report) {
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);

  std::string steps = "step,mse,r2,b_drift\n";
  for (const ValidationStep& step : report.steps)
    steps += std::to_string(step.step) + ',' + format_double(step.mse) + ','
             + format_double(step.r2) + ',' + format_double(step.b_drift) + '\n';
  write_lines((dir / "steps.csv").string(), steps);

  json doc;
  doc["method"] = to_string(report.method);
  doc["window"] = report.window;
  doc["r"] = report.r;
  doc["alpha"] = report.alpha_used;
  doc["m"] = report.m_used;
  doc["retuned_each_window"] = report.retuned_each_window;
  doc["ave_mse"] = report.ave_mse;
  doc["ave_r2"] = report.ave_r2;
  doc["var_b"] = report.var_b;
  doc["adj_error"] = report.adj_error;
  doc["sigma2_hat"] = report.sigma2_hat;
  write_json_file((dir / "report.json").string(), doc);
}

}  // namespace netfactor
