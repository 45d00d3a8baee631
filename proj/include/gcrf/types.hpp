#pragma once

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>

namespace gcrf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct ProblemDims {
  int n = 0;  // sample count
  int p = 0;  // response dimension
  int q = 0;  // covariate dimension

  void validate() const {
    if (n < 1 || p < 1 || q < 1)
      throw std::invalid_argument("ProblemDims: n, p, q must all be >= 1");
  }
};

// Sample moment matrices; the only data the solver touches after ingestion.
struct SufficientStats {
  Matrix s_yy;  // p x p, (1/n) sum Y_i Y_i^T
  Matrix s_xy;  // q x p, (1/n) sum X_i Y_i^T
  Matrix s_xx;  // q x q, (1/n) sum X_i X_i^T
  ProblemDims dims;
};

// Current iterates (Theta, Lambda) with the Lambda inverse kept in sync.
struct ModelState {
  Matrix theta;       // q x p
  Matrix lambda;      // p x p, symmetric positive definite
  Matrix lambda_inv;  // p x p, refreshed whenever lambda changes

  // Recomputes lambda_inv from a Cholesky factorization of lambda.
  // Throws std::runtime_error if lambda is not positive definite.
  void refresh_lambda_inv();
};

struct Hyperparams {
  double nu0_theta = 0.01;
  double nu1_theta = 1.0;
  double nu0_lambda = 0.01;
  double nu1_lambda = 1.0;
  double eta_theta = 0.5;   // element slab weight for Theta
  double eta_lambda = 0.5;  // element slab weight for Lambda
  double rho = 0.5;         // row slab weight for Theta
  double spectral_bound_r = 1e6;
  double threshold_t = 0.5;
  double outer_tol = 1e-5;
  double inner_tol = 1e-6;
  int max_outer_iters = 100;
  int max_inner_iters = 50;

  void validate() const {
    if (!(nu0_theta > 0 && nu1_theta > 0 && nu0_lambda > 0 && nu1_lambda > 0))
      throw std::invalid_argument("Hyperparams: scale parameters must be positive");
    if (!(nu0_theta < nu1_theta) || !(nu0_lambda < nu1_lambda))
      throw std::invalid_argument("Hyperparams: spike scale must be smaller than slab scale");
    if (!(eta_theta > 0 && eta_theta < 1 && eta_lambda > 0 && eta_lambda < 1))
      throw std::invalid_argument("Hyperparams: eta weights must lie in (0,1)");
    if (!(rho > 0 && rho < 1))
      throw std::invalid_argument("Hyperparams: rho must lie in (0,1)");
    if (!(spectral_bound_r > 0))
      throw std::invalid_argument("Hyperparams: spectral bound must be positive");
    if (!(threshold_t >= 0 && threshold_t <= 1))
      throw std::invalid_argument("Hyperparams: threshold must lie in [0,1]");
    if (!(outer_tol > 0 && inner_tol > 0))
      throw std::invalid_argument("Hyperparams: tolerances must be positive");
    if (max_outer_iters < 1 || max_inner_iters < 1)
      throw std::invalid_argument("Hyperparams: iteration limits must be positive");
  }
};

// Element and row posterior inclusion probabilities.
struct InclusionProbs {
  Matrix p_theta;          // q x p
  Matrix p_lambda;         // p x p, diagonal fixed to 1
  Vector row_probs_theta;  // length q, eta2 per Theta row
};

// (1/n) cross products of the data, with forced symmetrization of the
// square moments. x is n x q, y is n x p. When standardize is set the
// columns of both matrices are centered first.
SufficientStats compute_sufficient_stats(const Matrix& x, const Matrix& y,
                                         bool standardize = false);

// Theta = 0, Lambda = Lambda^{-1} = I.
ModelState initialize_state(const ProblemDims& dims);

// Largest singular value via power iteration on M^T M (M symmetric here, so
// this is the spectral norm). Tolerance is relative change between iterates.
double spectral_norm(const Matrix& m, int max_iters = 50, double rel_tol = 1e-6);

// Scale-aware defaults: the spike scale shrinks as 1/(2 sqrt(n log(p+q)))
// so the spike penalty rate grows with the information in the sample, with
// a wide element slab weight on Theta (zero rows are protected by the row
// layer) and an even one on Lambda.
Hyperparams default_hyperparams(const ProblemDims& dims);

}  // namespace gcrf
