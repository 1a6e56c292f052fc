#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "netfactor/io.hpp"

namespace {

using namespace netfactor;

struct CommonOpts {
  std::string data_path;
  std::string adj_path;
  std::string adj_format = "edges";
  bool one_based = false;
  bool header = false;
  std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool data_required = true) {
  auto* data = cmd->add_option("--data", opts.data_path, "panel CSV (rows = time)");
  if (data_required) data->required();
  cmd->add_option("--adj", opts.adj_path, "adjacency file (edge list or dense CSV)");
  cmd->add_option("--adj-format", opts.adj_format, "adjacency format: edges|dense")
      ->check(CLI::IsMember({"edges", "dense"}));
  cmd->add_flag("--one-based", opts.one_based, "edge list uses 1-based node indices");
  cmd->add_flag("--header", opts.header, "panel CSV has a header row of labels");
  cmd->add_option("--out-dir,-o", opts.out_dir, "output directory");
}

struct LoadedInputs {
  PanelData panel;
  Network net;
  LaplacianSpectrum spec;
};

LoadedInputs load_inputs(const CommonOpts& opts) {
  LoadedInputs in;
  in.panel = load_panel_csv(opts.data_path, opts.header);
  const int p = static_cast<int>(in.panel.values.cols());
  if (opts.adj_path.empty())
    in.net = build_network(EdgeList{}, p);
  else
    in.net = load_adjacency(opts.adj_path,
                            opts.adj_format == "dense" ? AdjacencyFormat::dense
                                                       : AdjacencyFormat::edges,
                            p, opts.one_based);
  in.spec = laplacian_spectrum(in.net);
  return in;
}

ShrinkageOperator resolve_operator(const LoadedInputs& in, PenaltyKind kind, int r,
                                   std::optional<double> alpha, std::optional<int> m,
                                   bool auto_tune, double* alpha_out, int* m_out) {
  if (kind == PenaltyKind::none) {
    *alpha_out = 0.0;
    *m_out = 0;
    return identity_operator(in.spec.p);
  }
  if (alpha) {
    if (kind == PenaltyKind::projection && !m)
      throw std::runtime_error("projection with --alpha also needs --m");
    *alpha_out = *alpha;
    *m_out = m.value_or(0);
    return shrink_weights(in.spec, kind, *alpha, m.value_or(0));
  }
  if (!auto_tune)
    throw std::runtime_error("penalized methods need --alpha (and --m) or --auto-tune");
  const TuningResult tuned =
      tune(in.panel.values, in.spec, kind, r, default_grids(in.spec.p));
  *alpha_out = tuned.alpha_star;
  *m_out = tuned.m_star;
  return shrink_weights(in.spec, kind, tuned.alpha_star, tuned.m_star);
}

int run(int argc, char** argv) {
  CLI::App app{"Network-assisted factor model estimation"};
  app.require_subcommand(1);

  // estimate
  CommonOpts est_opts;
  std::string est_method = "pca";
  int est_r = 0;
  std::optional<double> est_alpha;
  std::optional<int> est_m;
  bool est_auto = false;
  auto* est_cmd = app.add_subcommand("estimate", "fit factors, loadings and common components");
  add_common(est_cmd, est_opts);
  est_cmd->add_option("--method", est_method, "pca|lap|proj")
      ->check(CLI::IsMember({"pca", "lap", "proj"}));
  est_cmd->add_option("--r", est_r, "number of factors")->required();
  est_cmd->add_option("--alpha", est_alpha, "fixed shrinkage parameter");
  est_cmd->add_option("--m", est_m, "fixed truncation parameter (projection)");
  est_cmd->add_flag("--auto-tune", est_auto, "select alpha (and m) by the C_L criterion");

  // tune
  CommonOpts tune_opts;
  std::string tune_method = "lap";
  int tune_r = 0;
  auto* tune_cmd = app.add_subcommand("tune", "grid-search alpha (and m) by the C_L criterion");
  add_common(tune_cmd, tune_opts);
  tune_cmd->add_option("--method", tune_method, "lap|proj")
      ->check(CLI::IsMember({"lap", "proj"}));
  tune_cmd->add_option("--r", tune_r, "number of factors")->required();

  // select-r
  CommonOpts sel_opts;
  std::string sel_method = "pca";
  int sel_kmax = 10;
  int sel_steps = 1;
  auto* sel_cmd = app.add_subcommand("select-r", "choose the factor count by eigenvalue ratios");
  add_common(sel_cmd, sel_opts);
  sel_cmd->add_option("--method", sel_method, "pca (plain ER) | lap | proj (one step further)")
      ->check(CLI::IsMember({"pca", "lap", "proj"}));
  sel_cmd->add_option("--k-max", sel_kmax, "largest candidate r");
  sel_cmd->add_option("--extra-steps", sel_steps, "tune+ER repetitions after the pilot ER");

  // simulate
  SimulationConfig sim_config;
  std::string sim_out = ".";
  int sim_threads = 0;
  bool skip_mse = false, skip_selection = false;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo study of one simulation case");
  sim_cmd->add_option("--case", sim_config.case_id, "simulation case 1..4")->required();
  sim_cmd->add_option("--p", sim_config.p, "panel width")->required();
  sim_cmd->add_option("--T", sim_config.T, "panel length")->required();
  sim_cmd->add_option("--r", sim_config.r, "true factor count");
  sim_cmd->add_option("--sigma2", sim_config.sigma_e2, "idiosyncratic variance");
  sim_cmd->add_option("--reps", sim_config.reps, "replications");
  sim_cmd->add_option("--seed", sim_config.seed, "master seed");
  sim_cmd->add_option("--k-max", sim_config.k_max, "largest candidate r");
  sim_cmd->add_option("--threads", sim_threads, "worker threads (0 = all cores)");
  sim_cmd->add_flag("--skip-mse", skip_mse, "skip the estimation-error study");
  sim_cmd->add_flag("--skip-selection", skip_selection, "skip the factor-count study");
  sim_cmd->add_option("--out-dir,-o", sim_out, "output directory");

  // validate
  CommonOpts val_opts;
  std::string val_method = "pca";
  int val_window = 52;
  int val_r = 0;
  std::optional<double> val_alpha;
  std::optional<int> val_m;
  bool val_retune = false;
  bool val_standardize = false;
  auto* val_cmd = app.add_subcommand("validate", "rolling one-step-ahead validation");
  add_common(val_cmd, val_opts);
  val_cmd->add_option("--method", val_method, "pca|lap|proj")
      ->check(CLI::IsMember({"pca", "lap", "proj"}));
  val_cmd->add_option("--window", val_window, "rolling window length");
  val_cmd->add_option("--r", val_r, "number of factors")->required();
  val_cmd->add_option("--alpha", val_alpha, "fixed shrinkage parameter");
  val_cmd->add_option("--m", val_m, "fixed truncation parameter (projection)");
  val_cmd->add_flag("--retune-per-window", val_retune, "re-run C_L inside every window");
  val_cmd->add_flag("--standardize", val_standardize, "standardize columns first");

  CLI11_PARSE(app, argc, argv);

  if (est_cmd->parsed()) {
    const LoadedInputs in = load_inputs(est_opts);
    const PenaltyKind kind = penalty_kind_from_string(est_method);
    EstimateOutput meta;
    meta.method = est_method;
    meta.empty_network = in.spec.empty_network;
    const ShrinkageOperator op = resolve_operator(in, kind, est_r, est_alpha, est_m,
                                                  est_auto, &meta.alpha, &meta.m);
    const FactorEstimate est = fit(in.panel.values, in.spec, op, est_r);
    meta.sigma2_hat = estimate_noise_variance(in.panel.values, in.spec, est_r);
    meta.cl = cl_score(in.panel.values, est, op, meta.sigma2_hat, est_r);
    meta.adj_error = adjusted_error(meta.cl, meta.sigma2_hat);
    write_estimate_report(est_opts.out_dir, est, meta);
    std::cout << "estimate: method=" << est_method << " r=" << est_r
              << " alpha=" << meta.alpha << " m=" << meta.m
              << " cl_score=" << meta.cl << "\n";
    return 0;
  }

  if (tune_cmd->parsed()) {
    const LoadedInputs in = load_inputs(tune_opts);
    const PenaltyKind kind = penalty_kind_from_string(tune_method);
    const TuningResult result =
        tune(in.panel.values, in.spec, kind, tune_r, default_grids(in.spec.p));
    write_tuning_report(tune_opts.out_dir, result, tune_r);
    std::cout << "tune: method=" << tune_method << " alpha=" << result.alpha_star
              << " m=" << result.m_star << " score=" << result.best_score
              << " sigma2_hat=" << result.sigma2_hat << "\n";
    return 0;
  }

  if (sel_cmd->parsed()) {
    const LoadedInputs in = load_inputs(sel_opts);
    const PenaltyKind kind = penalty_kind_from_string(sel_method);
    FactorCountResult result;
    if (kind == PenaltyKind::none)
      result = select_r_er(in.panel.values, in.spec, identity_operator(in.spec.p), sel_kmax);
    else
      result = select_r_one_step(in.panel.values, in.spec, kind, sel_kmax,
                                 default_grids(in.spec.p), sel_steps);
    write_selection_report(sel_opts.out_dir, result);
    std::cout << "select-r: method=" << to_string(result.method)
              << " r_hat=" << result.r_hat
              << " fixed_point=" << (result.fixed_point ? "yes" : "no") << "\n";
    return 0;
  }

  if (sim_cmd->parsed()) {
    sim_config.with_mse = !skip_mse;
    sim_config.with_selection = !skip_selection;
    const int threads =
        sim_threads > 0 ? sim_threads
                        : std::max(1u, std::thread::hardware_concurrency());
    const SimulationReport report = run_case(sim_config, threads);
    write_simulation_report(sim_out, report);
    std::cout << "simulate: case=" << sim_config.case_id << " p=" << sim_config.p
              << " T=" << sim_config.T << " reps=" << sim_config.reps << " mse(pca/lap/proj)="
              << report.pca.mean_mse << "/" << report.lap.mean_mse << "/"
              << report.proj.mean_mse << " wall=" << report.wall_seconds << "s\n";
    return 0;
  }

  if (val_cmd->parsed()) {
    LoadedInputs in = load_inputs(val_opts);
    if (val_standardize) in.panel.values = standardize(in.panel.values);
    ValidationOptions options;
    options.alpha = val_alpha;
    options.m = val_m;
    options.retune_each_window = val_retune;
    const ValidationReport report =
        recursive_validate(in.panel.values, in.spec, penalty_kind_from_string(val_method),
                           val_window, val_r, default_grids(in.spec.p), options);
    write_validation_report(val_opts.out_dir, report);
    std::cout << "validate: method=" << val_method << " adj_error=" << report.adj_error
              << " ave_mse=" << report.ave_mse << " var_b=" << report.var_b
              << " ave_r2=" << report.ave_r2 << "\n";
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
