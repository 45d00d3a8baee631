#pragma once

#include "gcrf/coef.hpp"
#include "gcrf/solver.hpp"
#include "gcrf/types.hpp"

#include <optional>
#include <vector>

namespace gcrf {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

struct PredictionTask {
  Matrix x_test;         // m x q
  BoolMatrix known_mask; // m x p, true = response observed
  Matrix y_known;        // m x p, read only where the mask is true
};

struct CvPlan {
  int k = 5;
  std::vector<Hyperparams> grid;
  std::uint64_t seed = 1;
};

// Yhat row d = B x_d.
Matrix predict_unconditional(const BEstimate& b, const Matrix& x_test);

// Gaussian conditioning in precision form: for each row, with u = unknown
// and k = known positions and mean mu = B x,
//   Yhat_u = mu_u - Lambda_uu^{-1} Lambda_uk (y_k - mu_k).
// The Lambda_uu factorization is cached across rows sharing a mask pattern.
Matrix predict_conditional(const ModelState& state, const BEstimate& b,
                           const PredictionTask& task);

// Mean over rows of the Euclidean residual norm; with a mask, only unknown
// (mask = false) positions contribute.
double prediction_error(const Matrix& y_true, const Matrix& y_pred,
                        const BoolMatrix* unknown_only_mask = nullptr);

struct CvResult {
  Hyperparams best;
  size_t best_index = 0;
  std::vector<double> mean_errors;  // one per grid candidate
};

// Seeded shuffle, contiguous-block folds, unconditional prediction error per
// held-out fold; ties resolved by grid order. jobs > 1 evaluates candidates
// concurrently.
CvResult cross_validate(const Matrix& x, const Matrix& y, const CvPlan& plan,
                        const SolverConfig& solver_config, int jobs = 1);

// The default candidate grid: nu1 = 1, nu0 in {0.0005, 0.001, 0.005, 0.01,
// 0.05}, eta = rho = 0.5, other fields from the base.
std::vector<Hyperparams> default_cv_grid(const Hyperparams& base);

}  // namespace gcrf
