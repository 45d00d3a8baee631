#include "gcrf/coef.hpp"
#include "gcrf/io.hpp"
#include "gcrf/metrics.hpp"
#include "gcrf/predict.hpp"
#include "gcrf/simulate.hpp"
#include "gcrf/solver.hpp"
#include "gcrf/types.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace gcrf;

namespace {

enum ExitCode { kOk = 0, kInputError = 1, kNumericalFailure = 2, kIterationStop = 3 };

enum class LogLevel { kQuiet = 0, kInfo = 1, kDebug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("GCRF_SSL_LOG");
  if (!env) return LogLevel::kQuiet;
  const std::string value = env;
  if (value == "debug") return LogLevel::kDebug;
  if (value == "info") return LogLevel::kInfo;
  return LogLevel::kQuiet;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::kInfo) std::cerr << "[gcrf_ssl] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::kDebug) std::cerr << "[gcrf_ssl] " << msg << "\n";
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int jobs = 1;
  double threshold = 0.5;
  bool header = false;
};

Hyperparams hyperparams_from_config(const KeyValueConfig& config, int n, int p, int q) {
  Hyperparams hp = default_hyperparams(ProblemDims{n, p, q});
  const double nu0 = config.get_double("nu0", hp.nu0_theta);
  hp.nu0_theta = config.get_double("nu0_theta", nu0);
  hp.nu0_lambda = config.get_double("nu0_lambda", nu0);
  const double nu1 = config.get_double("nu1", 1.0);
  hp.nu1_theta = config.get_double("nu1_theta", nu1);
  hp.nu1_lambda = config.get_double("nu1_lambda", nu1);
  hp.eta_theta = config.get_double("eta_theta", config.get_double("eta", hp.eta_theta));
  hp.eta_lambda =
      config.get_double("eta_lambda", config.get_double("eta", hp.eta_lambda));
  hp.rho = config.get_double("rho", 0.5);
  hp.spectral_bound_r = config.get_double("spectral_bound_r", 1e6);
  hp.outer_tol = config.get_double("outer_tol", 1e-5);
  hp.inner_tol = config.get_double("inner_tol", 1e-6);
  hp.max_outer_iters = config.get_int("max_outer_iters", 100);
  hp.max_inner_iters = config.get_int("max_inner_iters", 50);
  return hp;
}

SolverConfig solver_from_config(const KeyValueConfig& config) {
  SolverConfig sc;
  sc.armijo_sigma = config.get_double("armijo_sigma", 1e-4);
  sc.backtrack_beta = config.get_double("backtrack_beta", 0.5);
  sc.min_step = config.get_double("min_step", 1e-10);
  return sc;
}

void echo_hyperparams(KeyValueConfig& echo, const Hyperparams& hp,
                      const SolverConfig& sc) {
  echo.set_double("nu0_theta", hp.nu0_theta);
  echo.set_double("nu0_lambda", hp.nu0_lambda);
  echo.set_double("nu1_theta", hp.nu1_theta);
  echo.set_double("nu1_lambda", hp.nu1_lambda);
  echo.set_double("eta_theta", hp.eta_theta);
  echo.set_double("eta_lambda", hp.eta_lambda);
  echo.set_double("rho", hp.rho);
  echo.set_double("spectral_bound_r", hp.spectral_bound_r);
  echo.set_double("threshold_t", hp.threshold_t);
  echo.set_double("outer_tol", hp.outer_tol);
  echo.set_double("inner_tol", hp.inner_tol);
  echo.set_int("max_outer_iters", hp.max_outer_iters);
  echo.set_int("max_inner_iters", hp.max_inner_iters);
  echo.set_double("armijo_sigma", sc.armijo_sigma);
  echo.set_double("backtrack_beta", sc.backtrack_beta);
  echo.set_double("min_step", sc.min_step);
}

void write_trace_csv(const std::string& path, const SolverTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "series,index,value\n";
  for (size_t i = 0; i < trace.objective_per_outer_iter.size(); ++i)
    out << "objective," << i << ',' << format_double(trace.objective_per_outer_iter[i])
        << '\n';
  for (size_t i = 0; i < trace.lambda_spectral_norm_per_outer.size(); ++i)
    out << "lambda_spectral_norm," << i << ','
        << format_double(trace.lambda_spectral_norm_per_outer[i]) << '\n';
  for (size_t i = 0; i < trace.active_set_sizes.size(); ++i) {
    out << "active_theta," << i << ',' << trace.active_set_sizes[i].first << '\n';
    out << "active_lambda," << i << ',' << trace.active_set_sizes[i].second << '\n';
  }
  for (size_t i = 0; i < trace.step_sizes.size(); ++i)
    out << "step_size," << i << ',' << format_double(trace.step_sizes[i]) << '\n';
  out << "converged,0," << (trace.converged ? 1 : 0) << '\n';
  out << "stalled,0," << (trace.stalled ? 1 : 0) << '\n';
  out << "outer_iters_used,0," << trace.outer_iters_used << '\n';
  out << "skipped_updates,0," << trace.skipped_updates << '\n';
}

BEstimate estimate_b(const FitResult& result, const Matrix& x, const Matrix& y,
                     const KeyValueConfig& config) {
  const int p_threshold = config.get_int("b_plugin_threshold", 100);
  ProblemDims dims{static_cast<int>(x.rows()), static_cast<int>(y.cols()),
                   static_cast<int>(x.cols())};
  if (choose_b_method(dims, p_threshold) == BMethod::PlugIn)
    return plug_in_b(result.state);
  const std::vector<int> selected = selected_rows(result.state.theta);
  if (selected.empty()) {
    BEstimate b;
    b.method = BMethod::MultiRegression;
    b.b = Matrix::Zero(dims.p, dims.q);
    return b;
  }
  return multi_regression_b(x, y, selected);
}

int cmd_fit(const CommonOpts& opts, const std::string& x_path,
            const std::string& y_path, bool standardize) {
  Matrix x, y;
  try {
    x = read_matrix_csv(x_path, opts.header);
    y = read_matrix_csv(y_path, opts.header);
    if (x.rows() != y.rows()) {
      std::cerr << "error: " << x_path << " has " << x.rows() << " rows but "
                << y_path << " has " << y.rows() << " rows\n";
      return kInputError;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }

  KeyValueConfig config;
  if (!opts.config_path.empty()) {
    try {
      config = KeyValueConfig::load(opts.config_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kInputError;
    }
  }

  const SufficientStats stats = compute_sufficient_stats(x, y, standardize);
  Hyperparams hp = hyperparams_from_config(config, stats.dims.n, stats.dims.p,
                                           stats.dims.q);
  hp.threshold_t = opts.threshold;
  const SolverConfig sc = solver_from_config(config);

  fs::create_directories(opts.out_dir);
  KeyValueConfig echo;
  echo.set("command", "fit");
  echo.set("x", x_path);
  echo.set("y", y_path);
  echo.set_bool("header", opts.header);
  echo.set_bool("standardize", standardize);
  echo.set_int("n", stats.dims.n);
  echo.set_int("p", stats.dims.p);
  echo.set_int("q", stats.dims.q);
  echo_hyperparams(echo, hp, sc);
  echo.set_int("b_plugin_threshold", config.get_int("b_plugin_threshold", 100));
  echo.save((fs::path(opts.out_dir) / "resolved_config.txt").string());

  FitResult result;
  BEstimate b;
  try {
    log_info("fitting n=" + std::to_string(stats.dims.n) +
             " p=" + std::to_string(stats.dims.p) + " q=" + std::to_string(stats.dims.q));
    result = fit(stats, hp, sc);
    b = estimate_b(result, x, y, config);
  } catch (const std::exception& e) {
    std::cerr << "error: numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }

  const fs::path out(opts.out_dir);
  write_matrix_csv((out / "theta.csv").string(), result.state.theta);
  write_matrix_csv((out / "lambda.csv").string(), result.state.lambda);
  write_matrix_csv((out / "b.csv").string(), b.b);
  write_matrix_csv((out / "inclusion_theta.csv").string(), result.probs.p_theta);
  write_matrix_csv((out / "inclusion_lambda.csv").string(), result.probs.p_lambda);
  write_trace_csv((out / "trace.csv").string(), result.trace);

  log_info("fit " + std::string(result.trace.converged ? "converged" : "stopped") +
           " after " + std::to_string(result.trace.outer_iters_used) +
           " outer iterations");
  if (result.trace.converged) return kOk;
  // A stall before any accepted step means no progress was possible.
  if (result.trace.stalled && result.trace.step_sizes.empty())
    return kNumericalFailure;
  return kIterationStop;
}

int cmd_simulate(const CommonOpts& opts, const std::string& setup_name,
                 const std::vector<int>& n_list, int reps, bool dump_data) {
  if (reps < 1) {
    std::cerr << "error: --reps must be >= 1\n";
    return kInputError;
  }
  if (n_list.empty()) {
    std::cerr << "error: --n requires at least one sample size\n";
    return kInputError;
  }

  KeyValueConfig config;
  if (!opts.config_path.empty()) {
    try {
      config = KeyValueConfig::load(opts.config_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kInputError;
    }
  }

  SimConfig sim;
  try {
    sim = named_setup(setup_name);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  sim.seed = opts.seed;
  sim.zero_row_fraction = config.get_double("zero_row_fraction", sim.zero_row_fraction);
  sim.toeplitz_offdiag = config.get_double("toeplitz_offdiag", sim.toeplitz_offdiag);
  sim.fix_truth = config.get_bool("fix_truth", false);

  const SolverConfig sc = solver_from_config(config);

  fs::create_directories(opts.out_dir);
  const fs::path out(opts.out_dir);

  std::ofstream scores(out / "scores.csv");
  scores << "n,rep," << ScoreReport::csv_header() << "\n";
  std::ofstream aggregate(out / "aggregate.csv");
  aggregate << "n,stat," << ScoreReport::csv_header() << "\n";

  KeyValueConfig echo;
  echo.set("command", "simulate");
  echo.set("setup", setup_name);
  echo.set_int("p", sim.dims.p);
  echo.set_int("q", sim.dims.q);
  echo.set_int("s_lambda", sim.s_lambda);
  echo.set("theta_method", sim.theta_method == ThetaMethod::IndependentUniform
                               ? "independent_uniform"
                               : "sphere_rows");
  echo.set_int("s_theta", sim.s_theta);
  echo.set_double("row_norm", sim.row_norm);
  echo.set_double("zero_row_fraction", sim.zero_row_fraction);
  echo.set_double("signal_lo", sim.signal_lo);
  echo.set_double("signal_hi", sim.signal_hi);
  echo.set_double("toeplitz_offdiag", sim.toeplitz_offdiag);
  echo.set_bool("fix_truth", sim.fix_truth);
  echo.set_int("seed", static_cast<long long>(opts.seed));
  echo.set_int("reps", reps);
  {
    std::ostringstream ns;
    for (size_t i = 0; i < n_list.size(); ++i) ns << (i ? "," : "") << n_list[i];
    echo.set("n_list", ns.str());
  }

  for (int n : n_list) {
    sim.dims.n = n;
    Hyperparams hp = hyperparams_from_config(config, n, sim.dims.p, sim.dims.q);
    hp.threshold_t = opts.threshold;
    if (n == n_list.front()) echo_hyperparams(echo, hp, sc);

    log_info("simulate " + setup_name + " n=" + std::to_string(n) + " reps=" +
             std::to_string(reps));
    MetricSummary summary;
    try {
      summary = run_replications(sim, hp, sc, reps, opts.jobs);
    } catch (const std::exception& e) {
      std::cerr << "error: numerical failure: " << e.what() << "\n";
      return kNumericalFailure;
    }
    for (int r = 0; r < reps; ++r)
      scores << n << ',' << r << ',' << summary.replications[r].to_csv_row() << "\n";
    aggregate << n << ",mean," << summary.mean.to_csv_row() << "\n";
    aggregate << n << ",stderr," << summary.stderr_.to_csv_row() << "\n";

    if (dump_data) {
      // Regenerate each replication's dataset from its derived seed (the
      // same path run_replications takes) and export it for external use.
      for (int r = 0; r < reps; ++r) {
        SimConfig rep_config = sim;
        rep_config.seed = replication_seed(sim.seed, r);
        std::mt19937_64 rng(rep_config.seed);
        const Dataset data = gen_dataset(rep_config, rng);
        const fs::path dir =
            out / ("data_n" + std::to_string(n) + "_rep" + std::to_string(r));
        fs::create_directories(dir);
        write_matrix_csv((dir / "x.csv").string(), data.x);
        write_matrix_csv((dir / "y.csv").string(), data.y);
        write_matrix_csv((dir / "theta0.csv").string(), data.truth.theta);
        write_matrix_csv((dir / "lambda0.csv").string(), data.truth.lambda);
        write_matrix_csv((dir / "b0.csv").string(), data.truth.b);
      }
    }
    log_debug("n=" + std::to_string(n) +
              " mean frob_theta=" + std::to_string(summary.mean.frob_theta));
  }
  echo.save((out / "resolved_config.txt").string());
  return kOk;
}

int cmd_predict(const CommonOpts& opts, const std::string& b_path,
                const std::string& lambda_path, const std::string& x_path,
                const std::string& mask_path, const std::string& y_known_path,
                const std::string& y_true_path) {
  try {
    BEstimate b;
    b.b = read_matrix_csv(b_path, opts.header);
    b.selected_covariates = selected_rows(b.b.transpose());

    Matrix x_test = read_matrix_csv(x_path, opts.header);

    ModelState state;
    state.lambda = read_matrix_csv(lambda_path, opts.header);
    if (state.lambda.rows() != state.lambda.cols() ||
        state.lambda.rows() != b.b.rows())
      throw std::runtime_error("lambda shape inconsistent with b");
    state.theta = Matrix::Zero(x_test.cols(), state.lambda.rows());
    state.refresh_lambda_inv();  // validates positive definiteness

    Matrix predictions;
    PredictionTask task;
    const bool conditional = !mask_path.empty();
    if (conditional) {
      if (y_known_path.empty())
        throw std::runtime_error("--mask requires --y-known");
      task.x_test = x_test;
      task.known_mask = read_bool_matrix_csv(mask_path, opts.header);
      task.y_known = read_matrix_csv(y_known_path, opts.header);
      if (task.y_known.rows() != task.known_mask.rows() ||
          task.y_known.cols() != task.known_mask.cols())
        throw std::runtime_error("mask and y-known shapes differ");
      predictions = predict_conditional(state, b, task);
    } else {
      predictions = predict_unconditional(b, x_test);
    }

    fs::create_directories(opts.out_dir);
    const fs::path out(opts.out_dir);
    write_matrix_csv((out / "predictions.csv").string(), predictions);

    KeyValueConfig echo;
    echo.set("command", "predict");
    echo.set("b", b_path);
    echo.set("lambda", lambda_path);
    echo.set("x", x_path);
    echo.set("mode", conditional ? "conditional" : "unconditional");
    if (conditional) {
      echo.set("mask", mask_path);
      echo.set("y_known", y_known_path);
    }

    if (!y_true_path.empty()) {
      const Matrix y_true = read_matrix_csv(y_true_path, opts.header);
      double err;
      if (conditional) {
        err = prediction_error(y_true, predictions, &task.known_mask);
      } else {
        err = prediction_error(y_true, predictions);
      }
      std::ofstream report(out / "error_report.txt");
      report << "prediction_error=" << format_double(err) << "\n";
      echo.set_double("prediction_error", err);
      std::cout << "prediction_error=" << format_double(err) << "\n";
    }
    echo.save((out / "resolved_config.txt").string());
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}

int cmd_cv(const CommonOpts& opts, const std::string& x_path,
           const std::string& y_path, const std::string& grid_path, int k,
           bool standardize) {
  Matrix x, y;
  try {
    x = read_matrix_csv(x_path, opts.header);
    y = read_matrix_csv(y_path, opts.header);
    if (x.rows() != y.rows()) {
      std::cerr << "error: " << x_path << " has " << x.rows() << " rows but "
                << y_path << " has " << y.rows() << " rows\n";
      return kInputError;
    }
    if (standardize) {
      x.rowwise() -= x.colwise().mean().eval();
      y.rowwise() -= y.colwise().mean().eval();
    }

    KeyValueConfig grid_config;
    if (!grid_path.empty()) grid_config = KeyValueConfig::load(grid_path);

    // Only the non-grid fields come from the file as scalars; the grid keys
    // may hold lists and are filled by the cross product below.
    Hyperparams base;
    base.spectral_bound_r = grid_config.get_double("spectral_bound_r", 1e6);
    base.outer_tol = grid_config.get_double("outer_tol", 1e-5);
    base.inner_tol = grid_config.get_double("inner_tol", 1e-6);
    base.max_outer_iters = grid_config.get_int("max_outer_iters", 100);
    base.max_inner_iters = grid_config.get_int("max_inner_iters", 50);
    base.threshold_t = opts.threshold;

    // Cross product over list-valued keys; scalar keys pin that dimension.
    std::vector<Hyperparams> grid;
    const auto nu0s = grid_config.get_double_list(
        "nu0", {0.0005, 0.001, 0.005, 0.01, 0.05});
    const auto nu1s = grid_config.get_double_list("nu1", {1.0});
    const auto etas = grid_config.get_double_list("eta", {0.5});
    const auto rhos = grid_config.get_double_list("rho", {0.5});
    for (double nu0 : nu0s)
      for (double nu1 : nu1s)
        for (double eta : etas)
          for (double rho : rhos) {
            Hyperparams hp = base;
            hp.nu0_theta = hp.nu0_lambda = nu0;
            hp.nu1_theta = hp.nu1_lambda = nu1;
            hp.eta_theta = hp.eta_lambda = eta;
            hp.rho = rho;
            grid.push_back(hp);
          }

    CvPlan plan;
    plan.k = k;
    plan.grid = grid;
    plan.seed = opts.seed;
    const SolverConfig sc = solver_from_config(grid_config);

    log_info("cross-validating " + std::to_string(grid.size()) + " candidates, " +
             std::to_string(k) + " folds");
    const CvResult result = cross_validate(x, y, plan, sc, opts.jobs);

    fs::create_directories(opts.out_dir);
    const fs::path out(opts.out_dir);
    std::ofstream table(out / "cv_table.csv");
    table << "index,nu0_theta,nu0_lambda,nu1_theta,nu1_lambda,eta_theta,"
             "eta_lambda,rho,mean_error\n";
    for (size_t g = 0; g < grid.size(); ++g) {
      const Hyperparams& hp = grid[g];
      table << g << ',' << format_double(hp.nu0_theta) << ','
            << format_double(hp.nu0_lambda) << ',' << format_double(hp.nu1_theta)
            << ',' << format_double(hp.nu1_lambda) << ','
            << format_double(hp.eta_theta) << ',' << format_double(hp.eta_lambda)
            << ',' << format_double(hp.rho) << ','
            << format_double(result.mean_errors[g]) << "\n";
    }

    KeyValueConfig best;
    best.set("command", "cv");
    best.set_int("k", k);
    best.set_int("seed", static_cast<long long>(opts.seed));
    best.set_int("best_index", static_cast<long long>(result.best_index));
    echo_hyperparams(best, result.best, sc);
    best.save((out / "best_config.txt").string());
    best.save((out / "resolved_config.txt").string());
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}

int cmd_score(const CommonOpts& opts, const std::string& theta_path,
              const std::string& lambda_path, const std::string& b_path,
              const std::string& pt_path, const std::string& pl_path,
              const std::string& t0_path, const std::string& l0_path,
              const std::string& b0_path) {
  try {
    Estimate estimate;
    estimate.theta = read_matrix_csv(theta_path, opts.header);
    estimate.lambda = read_matrix_csv(lambda_path, opts.header);
    estimate.b = read_matrix_csv(b_path, opts.header);
    estimate.probs.p_theta = read_matrix_csv(pt_path, opts.header);
    estimate.probs.p_lambda = read_matrix_csv(pl_path, opts.header);
    estimate.probs.row_probs_theta = estimate.probs.p_theta.rowwise().maxCoeff();

    GroundTruth truth;
    truth.theta = read_matrix_csv(t0_path, opts.header);
    truth.lambda = read_matrix_csv(l0_path, opts.header);
    truth.b = read_matrix_csv(b0_path, opts.header);

    const ScoreReport report = score(estimate, truth, opts.threshold);
    std::cout << report.to_text();
    fs::create_directories(opts.out_dir);
    std::ofstream out(fs::path(opts.out_dir) / "score.txt");
    out << report.to_text();
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse Gaussian conditional random field solver"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string x_path, y_path, setup_name, grid_path;
  std::string b_path, lambda_path, mask_path, y_known_path, y_true_path;
  std::string theta_path, pt_path, pl_path, t0_path, l0_path, b0_path;
  std::vector<int> n_list;
  int reps = 20;
  int k_folds = 5;
  bool standardize = false;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config_path, "key=value config file");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", opts.seed, "random seed");
    cmd->add_option("--jobs", opts.jobs, "worker threads");
    cmd->add_option("--threshold", opts.threshold,
                    "inclusion-probability threshold");
    cmd->add_flag("--header", opts.header, "skip one header line in CSV inputs");
  };

  CLI::App* fit_cmd = app.add_subcommand("fit", "fit a model from x/y CSV files");
  fit_cmd->add_option("--x", x_path, "covariate matrix CSV (n x q)")->required();
  fit_cmd->add_option("--y", y_path, "response matrix CSV (n x p)")->required();
  fit_cmd->add_flag("--standardize", standardize, "center columns of x and y");
  add_common(fit_cmd);

  CLI::App* sim_cmd = app.add_subcommand("simulate", "run scored replications");
  sim_cmd->add_option("--setup", setup_name, "setup1|setup2|setup3|s1|s2")
      ->required();
  sim_cmd->add_option("--n", n_list, "sample sizes")->required()->delimiter(',');
  sim_cmd->add_option("--reps", reps, "replications per sample size");
  bool dump_data = false;
  sim_cmd->add_flag("--dump-data", dump_data, "export each replication's dataset and truth");
  add_common(sim_cmd);

  CLI::App* predict_cmd = app.add_subcommand("predict", "predict responses");
  predict_cmd->add_option("--b", b_path, "fitted B CSV (p x q)")->required();
  predict_cmd->add_option("--lambda", lambda_path, "fitted Lambda CSV")->required();
  predict_cmd->add_option("--x", x_path, "test covariates CSV")->required();
  predict_cmd->add_option("--mask", mask_path, "known-response mask CSV (1=known)");
  predict_cmd->add_option("--y-known", y_known_path, "known response values CSV");
  predict_cmd->add_option("--y-true", y_true_path, "true responses for scoring");
  add_common(predict_cmd);

  CLI::App* cv_cmd = app.add_subcommand("cv", "k-fold hyperparameter selection");
  cv_cmd->add_option("--x", x_path, "covariate matrix CSV")->required();
  cv_cmd->add_option("--y", y_path, "response matrix CSV")->required();
  cv_cmd->add_option("--grid", grid_path, "grid file (list-valued key=value)");
  cv_cmd->add_option("--k", k_folds, "fold count");
  cv_cmd->add_flag("--standardize", standardize, "center columns of x and y");
  add_common(cv_cmd);

  CLI::App* score_cmd = app.add_subcommand("score", "score an estimate vs truth");
  score_cmd->add_option("--theta", theta_path, "estimated Theta CSV")->required();
  score_cmd->add_option("--lambda", lambda_path, "estimated Lambda CSV")->required();
  score_cmd->add_option("--b", b_path, "estimated B CSV")->required();
  score_cmd->add_option("--inclusion-theta", pt_path, "Theta inclusion probs CSV")
      ->required();
  score_cmd->add_option("--inclusion-lambda", pl_path, "Lambda inclusion probs CSV")
      ->required();
  score_cmd->add_option("--truth-theta", t0_path, "true Theta CSV")->required();
  score_cmd->add_option("--truth-lambda", l0_path, "true Lambda CSV")->required();
  score_cmd->add_option("--truth-b", b0_path, "true B CSV")->required();
  add_common(score_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kOk : kInputError;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(opts, x_path, y_path, standardize);
    if (sim_cmd->parsed())
      return cmd_simulate(opts, setup_name, n_list, reps, dump_data);
    if (predict_cmd->parsed())
      return cmd_predict(opts, b_path, lambda_path, x_path, mask_path,
                         y_known_path, y_true_path);
    if (cv_cmd->parsed())
      return cmd_cv(opts, x_path, y_path, grid_path, k_folds, standardize);
    if (score_cmd->parsed())
      return cmd_score(opts, theta_path, lambda_path, b_path, pt_path, pl_path,
                       t0_path, l0_path, b0_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
