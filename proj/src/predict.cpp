#include "gcrf/predict.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <atomic>
#include <future>
#include <map>
#include <numeric>
#include <random>

namespace gcrf {

Matrix predict_unconditional(const BEstimate& b, const Matrix& x_test) {
  if (x_test.cols() != b.b.cols())
    throw std::invalid_argument("predict_unconditional: covariate dimension mismatch");
  return x_test * b.b.transpose();
}

Matrix predict_conditional(const ModelState& state, const BEstimate& b,
                           const PredictionTask& task) {
  const auto m = task.x_test.rows();
  const auto p = state.lambda.rows();
  if (task.known_mask.rows() != m || task.known_mask.cols() != p)
    throw std::invalid_argument("predict_conditional: mask shape mismatch");

  Matrix mu = predict_unconditional(b, task.x_test);
  Matrix filled = mu;

  struct PatternSolver {
    std::vector<int> unknown;
    std::vector<int> known;
    Eigen::LLT<Matrix> llt;       // of Lambda_uu
    Matrix lambda_uk;
  };
  std::map<std::vector<bool>, PatternSolver> cache;

  for (Eigen::Index r = 0; r < m; ++r) {
    std::vector<bool> key(p);
    for (Eigen::Index j = 0; j < p; ++j) key[j] = task.known_mask(r, j);

    auto it = cache.find(key);
    if (it == cache.end()) {
      PatternSolver solver;
      for (int j = 0; j < p; ++j)
        (key[j] ? solver.known : solver.unknown).push_back(j);
      if (!solver.unknown.empty()) {
        const int nu = static_cast<int>(solver.unknown.size());
        const int nk = static_cast<int>(solver.known.size());
        Matrix lambda_uu(nu, nu);
        solver.lambda_uk.resize(nu, nk);
        for (int a = 0; a < nu; ++a) {
          for (int bq = 0; bq < nu; ++bq)
            lambda_uu(a, bq) = state.lambda(solver.unknown[a], solver.unknown[bq]);
          for (int c = 0; c < nk; ++c)
            solver.lambda_uk(a, c) = state.lambda(solver.unknown[a], solver.known[c]);
        }
        solver.llt.compute(lambda_uu);
        if (solver.llt.info() != Eigen::Success)
          throw std::runtime_error(
              "predict_conditional: Lambda_uu is not positive definite");
      }
      it = cache.emplace(std::move(key), std::move(solver)).first;
    }

    const PatternSolver& solver = it->second;
    for (size_t c = 0; c < solver.known.size(); ++c)
      filled(r, solver.known[c]) = task.y_known(r, solver.known[c]);
    if (solver.unknown.empty() || solver.known.empty()) continue;

    Vector resid(solver.known.size());
    for (size_t c = 0; c < solver.known.size(); ++c)
      resid(c) = task.y_known(r, solver.known[c]) - mu(r, solver.known[c]);
    const Vector correction = solver.llt.solve(solver.lambda_uk * resid);
    for (size_t a = 0; a < solver.unknown.size(); ++a)
      filled(r, solver.unknown[a]) = mu(r, solver.unknown[a]) - correction(a);
  }
  return filled;
}

double prediction_error(const Matrix& y_true, const Matrix& y_pred,
                        const BoolMatrix* unknown_only_mask) {
  if (y_true.rows() != y_pred.rows() || y_true.cols() != y_pred.cols())
    throw std::invalid_argument("prediction_error: shape mismatch");
  double total = 0.0;
  for (Eigen::Index r = 0; r < y_true.rows(); ++r) {
    double ss = 0.0;
    for (Eigen::Index c = 0; c < y_true.cols(); ++c) {
      if (unknown_only_mask && (*unknown_only_mask)(r, c)) continue;
      const double d = y_true(r, c) - y_pred(r, c);
      ss += d * d;
    }
    total += std::sqrt(ss);
  }
  return total / static_cast<double>(y_true.rows());
}

namespace {

double cv_error_for_candidate(const Matrix& x, const Matrix& y,
                              const std::vector<int>& order, int k,
                              const Hyperparams& hp,
                              const SolverConfig& solver_config) {
  const int n = static_cast<int>(x.rows());
  double total = 0.0;
  for (int fold = 0; fold < k; ++fold) {
    const int lo = fold * n / k;
    const int hi = (fold + 1) * n / k;
    const int test_n = hi - lo;
    const int train_n = n - test_n;

    Matrix x_train(train_n, x.cols()), y_train(train_n, y.cols());
    Matrix x_test(test_n, x.cols()), y_test(test_n, y.cols());
    int tr = 0;
    for (int r = 0; r < n; ++r) {
      if (r >= lo && r < hi) {
        x_test.row(r - lo) = x.row(order[r]);
        y_test.row(r - lo) = y.row(order[r]);
      } else {
        x_train.row(tr) = x.row(order[r]);
        y_train.row(tr) = y.row(order[r]);
        ++tr;
      }
    }

    const SufficientStats stats = compute_sufficient_stats(x_train, y_train);
    const FitResult result = fit(stats, hp, solver_config);
    BEstimate b;
    if (choose_b_method(stats.dims) == BMethod::PlugIn) {
      b = plug_in_b(result.state);
    } else {
      const std::vector<int> selected = selected_rows(result.state.theta);
      if (selected.empty()) {
        b.b = Matrix::Zero(stats.dims.p, stats.dims.q);
      } else {
        b = multi_regression_b(x_train, y_train, selected);
      }
    }
    total += prediction_error(y_test, predict_unconditional(b, x_test));
  }
  return total / static_cast<double>(k);
}

}  // namespace

CvResult cross_validate(const Matrix& x, const Matrix& y, const CvPlan& plan,
                        const SolverConfig& solver_config, int jobs) {
  if (plan.grid.empty())
    throw std::invalid_argument("cross_validate: empty hyperparameter grid");
  if (plan.k < 2) throw std::invalid_argument("cross_validate: need k >= 2 folds");
  if (x.rows() < plan.k)
    throw std::invalid_argument("cross_validate: fewer rows than folds");

  std::vector<int> order(x.rows());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(plan.seed);
  std::shuffle(order.begin(), order.end(), rng);

  CvResult result;
  result.mean_errors.resize(plan.grid.size());
  const auto evaluate = [&](size_t g) {
    result.mean_errors[g] =
        cv_error_for_candidate(x, y, order, plan.k, plan.grid[g], solver_config);
  };
  if (jobs <= 1) {
    for (size_t g = 0; g < plan.grid.size(); ++g) evaluate(g);
  } else {
    std::vector<std::future<void>> tasks;
    std::atomic<size_t> next{0};
    const size_t workers = std::min<size_t>(jobs, plan.grid.size());
    for (size_t w = 0; w < workers; ++w) {
      tasks.push_back(std::async(std::launch::async, [&] {
        for (size_t g = next.fetch_add(1); g < plan.grid.size();
             g = next.fetch_add(1))
          evaluate(g);
      }));
    }
    for (auto& t : tasks) t.get();
  }

  result.best_index = 0;
  for (size_t g = 1; g < plan.grid.size(); ++g)
    if (result.mean_errors[g] < result.mean_errors[result.best_index])
      result.best_index = g;
  result.best = plan.grid[result.best_index];
  return result;
}

std::vector<Hyperparams> default_cv_grid(const Hyperparams& base) {
  std::vector<Hyperparams> grid;
  for (double nu0 : {0.0005, 0.001, 0.005, 0.01, 0.05}) {
    Hyperparams hp = base;
    hp.nu0_theta = nu0;
    hp.nu0_lambda = nu0;
    hp.nu1_theta = 1.0;
    hp.nu1_lambda = 1.0;
    hp.eta_theta = 0.5;
    hp.eta_lambda = 0.5;
    hp.rho = 0.5;
    grid.push_back(hp);
  }
  return grid;
}

}  // namespace gcrf
