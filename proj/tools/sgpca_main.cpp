// Command-line interface: simulate | fit | tune | eval | theory.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sgpca/sgpca.hpp"

namespace fs = std::filesystem;
using namespace sgpca;

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UsageError:
    case ErrorCode::DomainError:
      return 1;
    case ErrorCode::DataError:
    case ErrorCode::IoError:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::SubsampleTooSmall:
      return 2;
    default:
      return 3;
  }
}

std::vector<double> parse_levels(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string field;
  while (std::getline(stream, field, ',')) {
    try {
      values.push_back(std::stod(field));
    } catch (...) {
      fail(ErrorCode::UsageError, flag + ": non-numeric level '" + field + "'");
    }
  }
  if (values.empty()) fail(ErrorCode::UsageError, flag + ": no levels given");
  return values;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void write_matrix_csv(const Matrix& values, const std::string& path,
                      const std::vector<std::string>& header = {}) {
  std::ofstream file(path);
  if (!file) fail(ErrorCode::IoError, "cannot write '" + path + "'");
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) file << (j ? "," : "") << header[j];
    file << "\n";
  }
  for (int i = 0; i < values.rows(); ++i) {
    for (int j = 0; j < values.cols(); ++j)
      file << (j ? "," : "") << format_double(values(i, j));
    file << "\n";
  }
}

struct SimulateArgs {
  std::string preset;
  std::string lambdas = "5";
  int num_groups = 300;
  int group_size = 10;
  double active_frac = 0.01;
  double within_frac = 0.8;
  double sigma_sq = 1.0;
  int n = 100;
  std::uint64_t seed = 1;
  std::string outdir;
};

int run_simulate(const SimulateArgs& args) {
  Timer timer;
  std::optional<SpikedModelSpec> spec;
  int samples = args.n;
  if (!args.preset.empty()) {
    auto [preset_spec, preset_n] = setting_preset(args.preset, args.seed);
    spec.emplace(std::move(preset_spec));
    if (args.n > 0) samples = args.n;
    else samples = preset_n;
  } else {
    const std::vector<double> lambdas = parse_levels(args.lambdas, "--lambda2");
    GroupPartition partition = GroupPartition::equal_blocks(args.num_groups, args.group_size);
    const int block = static_cast<int>(
        std::ceil(args.active_frac * static_cast<double>(args.num_groups)));
    std::vector<Spike> spikes;
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
      Vector v = gen_loading(partition, args.active_frac, args.within_frac,
                             Rng(args.seed).derive(11).derive(j).key(),
                             static_cast<int>(j) * block);
      spikes.push_back({lambdas[j], std::move(v)});
    }
    spec.emplace(std::move(spikes), args.sigma_sq, std::move(partition));
  }

  const DataMatrix data = gen_data(*spec, samples, args.seed);
  fs::create_directories(args.outdir);
  write_matrix_csv(data.values(), (fs::path(args.outdir) / "X.csv").string());
  write_groups(spec->partition, (fs::path(args.outdir) / "groups.csv").string());
  Matrix truth(spec->dim(), spec->num_spikes());
  std::vector<std::string> header;
  for (int j = 0; j < spec->num_spikes(); ++j) {
    truth.col(j) = spec->spikes[static_cast<std::size_t>(j)].loading;
    header.push_back("pc" + std::to_string(j + 1));
  }
  write_matrix_csv(truth, (fs::path(args.outdir) / "truth_loadings.csv").string(), header);

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.seed = args.seed;
  manifest.parameters["preset"] = args.preset;
  manifest.parameters["n"] = samples;
  manifest.parameters["p"] = spec->dim();
  manifest.parameters["num_groups"] = spec->partition.num_groups();
  std::vector<double> strengths;
  for (const auto& spike : spec->spikes) strengths.push_back(spike.lambda_sq);
  manifest.parameters["lambda_sq"] = strengths;
  manifest.parameters["sigma_sq"] = spec->sigma_sq;
  if (args.preset.empty()) {
    manifest.parameters["active_group_frac"] = args.active_frac;
    manifest.parameters["within_active_frac"] = args.within_frac;
  }
  manifest.wall_time_sec = timer.seconds();
  write_manifest(manifest, (fs::path(args.outdir) / "manifest.json").string());
  std::cout << "simulate: wrote " << samples << "x" << spec->dim() << " data to "
            << args.outdir << "\n";
  return 0;
}

struct FitArgs {
  std::string input, groups, outdir;
  bool has_header = false;
  std::string etas = "0", taus = "0";
  double tol = 1e-5;
  int max_iter = 1000;
  bool no_center = false;
  bool subspace = false;
  std::string deflation = "cov";
  double pi_const = 1.5;
  double omega_const = 0.3;
};

int run_fit(const FitArgs& args) {
  Timer timer;
  const DataMatrix data = read_matrix(args.input, args.has_header);
  const GroupPartition partition = read_groups(args.groups);
  if (partition.dim() != data.p())
    fail(ErrorCode::DataError, "fit: groups file covers " + std::to_string(partition.dim()) +
                                   " columns but '" + args.input + "' has " +
                                   std::to_string(data.p()));
  const std::vector<double> etas = parse_levels(args.etas, "--etas");
  const std::vector<double> taus = parse_levels(args.taus, "--taus");
  if (etas.size() != taus.size())
    fail(ErrorCode::UsageError, "fit: --etas and --taus must have the same length");
  const bool center = !args.no_center;
  const auto deflation_mode = args.deflation == "data" ? CovOperator::DeflationMode::Data
                                                       : CovOperator::DeflationMode::Covariance;

  SolverConfig config;
  config.tol = args.tol;
  config.max_iter = args.max_iter;
  config.components = static_cast<int>(etas.size());
  InitConfig init_config;
  init_config.pi_const = args.pi_const;
  init_config.omega_const = args.omega_const;

  std::vector<PCEstimate> estimates;
  if (args.subspace) {
    if (etas.size() != 1)
      fail(ErrorCode::UsageError, "fit --subspace: pass single shared --etas/--taus levels "
                                  "plus --J via repeated levels is not supported; use one pair");
    estimates = fit_subspace(data, partition, etas[0], taus[0], 1, config, center);
  } else {
    std::vector<ThresholdPair> pairs;
    for (std::size_t j = 0; j < etas.size(); ++j) pairs.push_back({etas[j], taus[j]});
    CovOperator op = CovOperator::from_data(data, center, deflation_mode);
    estimates =
        fit_with_init(op, partition, ThresholdSchedule(pairs), config, init_config, data.n());
  }

  RunManifest manifest;
  manifest.command = "fit";
  manifest.parameters["input"] = args.input;
  manifest.parameters["groups"] = args.groups;
  manifest.parameters["etas"] = etas;
  manifest.parameters["taus"] = taus;
  manifest.parameters["tol"] = args.tol;
  manifest.parameters["max_iter"] = args.max_iter;
  manifest.parameters["center"] = center;
  manifest.parameters["deflation"] = args.deflation;
  manifest.input_digests[args.input] = file_digest(args.input);
  manifest.input_digests[args.groups] = file_digest(args.groups);
  const Matrix scores_basis = center ? centered_columns(data.values()) : data.values();
  manifest.wall_time_sec = timer.seconds();
  write_results(estimates, {}, manifest, args.outdir, partition, &scores_basis);
  std::cout << "fit: " << estimates.size() << " component(s) written to " << args.outdir
            << "\n";
  return 0;
}

struct TuneArgs {
  std::string input, groups, outdir;
  bool has_header = false;
  int components = 1;
  std::string etas, taus;
  double rho = 0.5;
  int num_resamples = 20;
  std::uint64_t seed = 0;
  double tol = 1e-5;
  int max_iter = 200;
  bool no_center = false;
  std::string deflation = "cov";
  double pi_const = 1.5;
  double omega_const = 0.3;
};

int run_tune(const TuneArgs& args) {
  Timer timer;
  const DataMatrix data = read_matrix(args.input, args.has_header);
  const GroupPartition partition = read_groups(args.groups);
  if (partition.dim() != data.p())
    fail(ErrorCode::DataError, "tune: groups file covers " + std::to_string(partition.dim()) +
                                   " columns but '" + args.input + "' has " +
                                   std::to_string(data.p()));
  TuningGrid grid;
  grid.etas = parse_levels(args.etas, "--etas");
  grid.taus = parse_levels(args.taus, "--taus");
  grid.rho = args.rho;
  grid.num_resamples = args.num_resamples;
  grid.seed = args.seed;
  const bool center = !args.no_center;
  const auto deflation_mode = args.deflation == "data" ? CovOperator::DeflationMode::Data
                                                       : CovOperator::DeflationMode::Covariance;
  SolverConfig config;
  config.tol = args.tol;
  config.max_iter = args.max_iter;
  InitConfig init_config;
  init_config.pi_const = args.pi_const;
  init_config.omega_const = args.omega_const;

  const TuneFitResult result = tune_and_fit(data, partition, args.components, grid, config,
                                            init_config, center, deflation_mode);

  RunManifest manifest;
  manifest.command = "tune";
  manifest.seed = args.seed;
  manifest.parameters["input"] = args.input;
  manifest.parameters["groups"] = args.groups;
  manifest.parameters["J"] = args.components;
  manifest.parameters["etas"] = grid.etas;
  manifest.parameters["taus"] = grid.taus;
  manifest.parameters["rho"] = args.rho;
  manifest.parameters["B"] = args.num_resamples;
  manifest.parameters["tol"] = args.tol;
  manifest.parameters["max_iter"] = args.max_iter;
  manifest.parameters["center"] = center;
  manifest.parameters["deflation"] = args.deflation;
  manifest.parameters["pi"] = args.pi_const;
  manifest.parameters["omega"] = args.omega_const;
  nlohmann::json selected = nlohmann::json::array();
  for (const auto& report : result.reports) {
    const auto& cell = report.cells[static_cast<std::size_t>(report.selected)];
    selected.push_back({{"component", report.component},
                        {"eta", cell.eta},
                        {"tau", cell.tau},
                        {"align", cell.align},
                        {"rescale", report.rescale}});
  }
  manifest.parameters["selected"] = selected;
  manifest.input_digests[args.input] = file_digest(args.input);
  manifest.input_digests[args.groups] = file_digest(args.groups);
  const Matrix scores_basis = center ? centered_columns(data.values()) : data.values();
  manifest.wall_time_sec = timer.seconds();
  write_results(result.estimates, result.reports, manifest, args.outdir, partition,
                &scores_basis);
  for (const auto& report : result.reports) {
    const std::string svg_path =
        (fs::path(args.outdir) / ("alignment_pc" + std::to_string(report.component) + ".svg"))
            .string();
    emit_diagnostic_svg(report, svg_path);
  }
  std::cout << "tune: " << result.estimates.size() << " component(s), reports and SVGs in "
            << args.outdir << "\n";
  return 0;
}

struct EvalArgs {
  std::string estimates, truth, groups, outdir;
};

int run_eval(const EvalArgs& args) {
  Timer timer;
  const DataMatrix estimated = read_matrix(args.estimates, /*has_header=*/true);
  const DataMatrix truth = read_matrix(args.truth, /*has_header=*/true);
  if (estimated.n() != truth.n())
    fail(ErrorCode::DataError, "eval: '" + args.estimates + "' has " +
                                   std::to_string(estimated.n()) + " rows but '" + args.truth +
                                   "' has " + std::to_string(truth.n()));
  if (estimated.p() > truth.p())
    fail(ErrorCode::DataError, "eval: more estimated components than ground-truth components");
  const int p = estimated.n();
  GroupPartition partition = args.groups.empty()
                                 ? GroupPartition::equal_blocks(1, p)
                                 : read_groups(args.groups);
  std::vector<Spike> spikes;
  for (int j = 0; j < truth.p(); ++j) {
    Vector v = truth.values().col(j);
    spikes.push_back({static_cast<double>(truth.p() - j), std::move(v)});
  }
  const SpikedModelSpec spec(std::move(spikes), 1.0, std::move(partition));
  std::vector<PCEstimate> estimates(static_cast<std::size_t>(estimated.p()));
  for (int j = 0; j < estimated.p(); ++j) {
    auto& estimate = estimates[static_cast<std::size_t>(j)];
    estimate.loading = estimated.values().col(j);
    for (int c = 0; c < p; ++c)
      if (estimate.loading[c] != 0.0) estimate.support.push_back(c);
  }
  const EvalResult result = evaluate(estimates, spec);

  fs::create_directories(args.outdir);
  const std::string path = (fs::path(args.outdir) / "eval.csv").string();
  std::ofstream file(path);
  if (!file) fail(ErrorCode::IoError, "eval: cannot write '" + path + "'");
  file << "component,alignment,distance,type1,type2\n";
  for (std::size_t j = 0; j < result.alignment.size(); ++j)
    file << (j + 1) << "," << format_double(result.alignment[j]) << ","
         << format_double(result.distance[j]) << "," << format_double(result.type1_per[j])
         << "," << format_double(result.type2_per[j]) << "\n";
  file << "pooled,,," << format_double(result.type1) << "," << format_double(result.type2)
       << "\n";
  file.close();

  RunManifest manifest;
  manifest.command = "eval";
  manifest.parameters["estimates"] = args.estimates;
  manifest.parameters["truth"] = args.truth;
  manifest.input_digests[args.estimates] = file_digest(args.estimates);
  manifest.input_digests[args.truth] = file_digest(args.truth);
  manifest.wall_time_sec = timer.seconds();
  write_manifest(manifest, (fs::path(args.outdir) / "manifest.json").string());
  std::cout << "eval: metrics written to " << path << "\n";
  return 0;
}

struct TheoryArgs {
  double r = 1.0, m_G = 1.0, lambda_sq = 5.0;
  double num_groups = 300, group_size = 10, sample_size = 100;
  double alpha = 1.0, beta = 1.0, eta = 1.0, tau = 1.0;
  int cardG = 0;
  std::string outdir;
};

int run_theory(const TheoryArgs& args) {
  Timer timer;
  SparsityModel model;
  model.r = args.r;
  model.m_G = args.m_G;
  model.lambda_sq = args.lambda_sq;
  model.num_groups = args.num_groups;
  model.group_size = args.group_size;
  model.sample_size = args.sample_size;
  model.alpha = args.alpha;
  model.beta = args.beta;
  model.eta = args.eta;
  model.tau = args.tau;
  model.validate();

  const double h = snr(model.lambda_sq);
  const double alpha_n =
      model.alpha * std::sqrt(std::log(model.num_groups) / (model.sample_size * h));
  const int card = args.cardG >= 1 ? args.cardG : lemma1_cardinality_hint(model, alpha_n);
  const auto loadings = loading_thresholds(model, card);
  const auto iteration = iteration_thresholds(model, loadings.alpha_n, loadings.beta_n);
  const auto rate = theorem1_rate(model);

  std::vector<std::pair<std::string, double>> table = {
      {"h_lambda_sq", h},
      {"alpha_n", loadings.alpha_n},
      {"beta_n", loadings.beta_n},
      {"cardG_hint", static_cast<double>(card)},
      {"eta_n", iteration.eta_n},
      {"tau_n", iteration.tau_n},
      {"rate_group_term", rate.group_term},
      {"rate_entry_term", rate.entry_term},
      {"rate_parametric_term", rate.parametric_term},
      {"rate_total", rate.total()},
  };
  if (loadings.beta_n > 0.0) {
    const auto bounds = lemma1_bounds(model, loadings.alpha_n, loadings.beta_n, card);
    table.insert(table.begin() + 4, {"lemma1_bound_groups", bounds.bound_groups});
    table.insert(table.begin() + 5, {"lemma1_bound_coords", bounds.bound_coords});
  }
  for (const auto& [name, value] : table)
    std::cout << name << " = " << format_double(value) << "\n";

  if (!args.outdir.empty()) {
    fs::create_directories(args.outdir);
    const std::string path = (fs::path(args.outdir) / "theory.csv").string();
    std::ofstream file(path);
    if (!file) fail(ErrorCode::IoError, "theory: cannot write '" + path + "'");
    file << "quantity,value\n";
    for (const auto& [name, value] : table) file << name << "," << format_double(value) << "\n";
    RunManifest manifest;
    manifest.command = "theory";
    manifest.parameters["r"] = args.r;
    manifest.parameters["m_G"] = args.m_G;
    manifest.parameters["lambda_sq"] = args.lambda_sq;
    manifest.parameters["G"] = args.num_groups;
    manifest.parameters["T"] = args.group_size;
    manifest.parameters["n"] = args.sample_size;
    manifest.wall_time_sec = timer.seconds();
    write_manifest(manifest, (fs::path(args.outdir) / "manifest.json").string());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse group PCA via double-thresholding power iteration"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "generate spiked-covariance data");
  simulate->add_option("--preset", sim.preset, "1a|1b|1c|2i|2ii|3");
  simulate->add_option("--lambda2", sim.lambdas, "spike strengths, comma separated");
  simulate->add_option("--G", sim.num_groups, "number of groups");
  simulate->add_option("--T", sim.group_size, "group size");
  simulate->add_option("--active-frac", sim.active_frac, "fraction of active groups");
  simulate->add_option("--within-frac", sim.within_frac, "active fraction within groups");
  simulate->add_option("--sigma2", sim.sigma_sq, "noise variance");
  simulate->add_option("--n", sim.n, "sample count");
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--out", sim.outdir, "output directory")->required();

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "fit components at explicit thresholds");
  fit_cmd->add_option("--input", fit_args.input, "data CSV")->required();
  fit_cmd->add_option("--groups", fit_args.groups, "groups CSV or JSON")->required();
  fit_cmd->add_flag("--header", fit_args.has_header, "input has a header row");
  fit_cmd->add_option("--etas", fit_args.etas, "per-component group levels, comma separated");
  fit_cmd->add_option("--taus", fit_args.taus, "per-component entry levels, comma separated");
  fit_cmd->add_option("--tol", fit_args.tol, "convergence tolerance");
  fit_cmd->add_option("--max-iter", fit_args.max_iter, "iteration cap");
  fit_cmd->add_flag("--no-center", fit_args.no_center, "skip column centering");
  fit_cmd->add_flag("--subspace", fit_args.subspace, "orthogonal-iteration subspace mode");
  fit_cmd->add_option("--deflation", fit_args.deflation, "cov|data");
  fit_cmd->add_option("--pi", fit_args.pi_const, "init group constant");
  fit_cmd->add_option("--omega", fit_args.omega_const, "init entry constant");
  fit_cmd->add_option("--out", fit_args.outdir, "output directory")->required();

  TuneArgs tune_args;
  auto* tune_cmd = app.add_subcommand("tune", "resampling-based threshold selection + fit");
  tune_cmd->add_option("--input", tune_args.input, "data CSV")->required();
  tune_cmd->add_option("--groups", tune_args.groups, "groups CSV or JSON")->required();
  tune_cmd->add_flag("--header", tune_args.has_header, "input has a header row");
  tune_cmd->add_option("--J", tune_args.components, "number of components");
  tune_cmd->add_option("--etas", tune_args.etas, "candidate group levels")->required();
  tune_cmd->add_option("--taus", tune_args.taus, "candidate entry levels")->required();
  tune_cmd->add_option("--rho", tune_args.rho, "resample proportion");
  tune_cmd->add_option("--B", tune_args.num_resamples, "resample count");
  tune_cmd->add_option("--seed", tune_args.seed, "master seed");
  tune_cmd->add_option("--tol", tune_args.tol, "convergence tolerance");
  tune_cmd->add_option("--max-iter", tune_args.max_iter, "iteration cap");
  tune_cmd->add_flag("--no-center", tune_args.no_center, "skip column centering");
  tune_cmd->add_option("--deflation", tune_args.deflation, "cov|data");
  tune_cmd->add_option("--pi", tune_args.pi_const, "init group constant");
  tune_cmd->add_option("--omega", tune_args.omega_const, "init entry constant");
  tune_cmd->add_option("--out", tune_args.outdir, "output directory")->required();

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "score estimates against ground truth");
  eval_cmd->add_option("--estimates", eval_args.estimates, "loadings.csv")->required();
  eval_cmd->add_option("--truth", eval_args.truth, "truth_loadings.csv")->required();
  eval_cmd->add_option("--groups", eval_args.groups, "optional groups file");
  eval_cmd->add_option("--out", eval_args.outdir, "output directory")->required();

  TheoryArgs theory_args;
  auto* theory_cmd = app.add_subcommand("theory", "thresholds, bounds and rate table");
  theory_cmd->add_option("--r", theory_args.r, "weak-lr exponent");
  theory_cmd->add_option("--mG", theory_args.m_G, "group envelope radius");
  theory_cmd->add_option("--lambda2", theory_args.lambda_sq, "spike strength");
  theory_cmd->add_option("--G", theory_args.num_groups, "number of groups");
  theory_cmd->add_option("--T", theory_args.group_size, "group size");
  theory_cmd->add_option("--n", theory_args.sample_size, "sample count");
  theory_cmd->add_option("--alpha", theory_args.alpha, "alpha constant");
  theory_cmd->add_option("--beta", theory_args.beta, "beta constant");
  theory_cmd->add_option("--eta", theory_args.eta, "eta constant");
  theory_cmd->add_option("--tau", theory_args.tau, "tau constant");
  theory_cmd->add_option("--cardG", theory_args.cardG, "oracle group cardinality hint");
  theory_cmd->add_option("--out", theory_args.outdir, "optional output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (fit_cmd->parsed()) return run_fit(fit_args);
    if (tune_cmd->parsed()) return run_tune(tune_args);
    if (eval_cmd->parsed()) return run_eval(eval_args);
    if (theory_cmd->parsed()) return run_theory(theory_args);
  } catch (const Error& e) {
    std::cerr << "error (" << error_code_name(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
