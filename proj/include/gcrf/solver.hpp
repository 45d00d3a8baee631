#pragma once

#include "gcrf/likelihood.hpp"
#include "gcrf/penalty.hpp"
#include "gcrf/types.hpp"

#include <utility>
#include <vector>

namespace gcrf {

struct SolverConfig {
  double armijo_sigma = 1e-4;
  double backtrack_beta = 0.5;
  double min_step = 1e-10;

  void validate() const {
    if (!(armijo_sigma > 0 && armijo_sigma < 0.5))
      throw std::invalid_argument("SolverConfig: armijo_sigma must lie in (0, 0.5)");
    if (!(backtrack_beta > 0 && backtrack_beta < 1))
      throw std::invalid_argument("SolverConfig: backtrack_beta must lie in (0, 1)");
    if (!(min_step > 0 && min_step < 1))
      throw std::invalid_argument("SolverConfig: min_step must lie in (0, 1)");
  }
};

struct SolverTrace {
  std::vector<double> objective_per_outer_iter;  // negative log-posterior L
  std::vector<std::pair<int, int>> active_set_sizes;
  std::vector<double> step_sizes;  // accepted alphas, in order
  std::vector<double> lambda_spectral_norm_per_outer;
  bool converged = false;
  bool stalled = false;
  int outer_iters_used = 0;
  long skipped_updates = 0;  // coordinates skipped on a <= 0
};

// Accumulated coordinate-descent direction plus the running products the
// update formulas read. Entries outside the active sets stay exactly zero.
struct NewtonDirection {
  Matrix delta_theta;             // q x p
  Matrix delta_lambda;            // p x p, symmetric
  Matrix delta_theta_lambda_inv;  // q x p, = delta_theta * Lambda^{-1}
  Matrix delta_lambda_lambda_inv; // p x p, = delta_lambda * Lambda^{-1}

  static NewtonDirection zero(int p, int q) {
    NewtonDirection d;
    d.delta_theta = Matrix::Zero(q, p);
    d.delta_lambda = Matrix::Zero(p, p);
    d.delta_theta_lambda_inv = Matrix::Zero(q, p);
    d.delta_lambda_lambda_inv = Matrix::Zero(p, p);
    return d;
  }
};

// State-dependent matrices fixed across one coordinate sweep.
struct MStepContext {
  const ModelState* state = nullptr;
  const SufficientStats* stats = nullptr;
  Matrix w;  // Lambda^{-1} Theta^T S_xx                (p x q)
  Matrix a;  // Lambda^{-1} Theta^T S_xx Theta Lambda^{-1} (p x p)
};

MStepContext make_mstep_context(const ModelState& state, const SufficientStats& stats);

// L = -l + sum_i Pen_MSS(Theta_i) + sum_{i<j} Pen_SS(Lambda_ij).
double negative_log_posterior(const ModelState& state, const SufficientStats& stats,
                              const Hyperparams& hp);

// Inclusion probabilities frozen for the following M-step.
InclusionProbs e_step(const ModelState& state, const Hyperparams& hp);

// Adaptive lasso weights tau = p/nu1 + (1-p)/nu0 per entry; Lambda diagonal
// weights are zero.
std::pair<Matrix, Matrix> mstep_penalty_weights(const InclusionProbs& probs,
                                                const Hyperparams& hp);

// Index sets eligible for update: nonzero entries plus entries whose
// likelihood gradient magnitude beats the penalty derivative. The Lambda set
// uses i <= j and always contains every diagonal pair.
struct ActiveSets {
  std::vector<std::pair<int, int>> theta;
  std::vector<std::pair<int, int>> lambda;
};

ActiveSets active_sets(const ModelState& state, const SufficientStats& stats,
                       const Hyperparams& hp);

// argmin_u (a/2) u^2 + b u + tau |c + u|, the scalar lasso problem every
// coordinate update reduces to: u = -c + S_{tau/a}(c - b/a).
double lasso_coordinate_minimizer(double a, double b, double c, double tau);

// One-coordinate lasso updates. Each returns the increment u, adds it into
// the direction, and refreshes the affected rows of the cached products.
// Coordinates with nonpositive curvature are skipped (u = 0) and counted.
double coord_update_theta(int i, int j, const MStepContext& ctx,
                          NewtonDirection& dir, double tau, long* skipped = nullptr);
double coord_update_lambda_offdiag(int i, int j, const MStepContext& ctx,
                                   NewtonDirection& dir, double tau,
                                   long* skipped = nullptr);
double coord_update_lambda_diag(int i, const MStepContext& ctx,
                                NewtonDirection& dir, long* skipped = nullptr);

// Convenience overloads matching the operation contracts directly.
double coord_update_theta(int i, int j, const ModelState& state,
                          const SufficientStats& stats, NewtonDirection& dir,
                          double tau, long* skipped = nullptr);
double coord_update_lambda_offdiag(int i, int j, const ModelState& state,
                                   const SufficientStats& stats, NewtonDirection& dir,
                                   double tau, long* skipped = nullptr);
double coord_update_lambda_diag(int i, const ModelState& state,
                                const SufficientStats& stats, NewtonDirection& dir,
                                long* skipped = nullptr);

// M-step objective under frozen weights:
// Q = -l + sum tau_theta |Theta| + sum_{i<j} tau_lambda |Lambda|.
double mstep_objective(const ModelState& state, const SufficientStats& stats,
                       const Matrix& tau_theta, const Matrix& tau_lambda);

struct LineSearchResult {
  double alpha = 0.0;        // 0 signals a stall; state is then unchanged
  ModelState accepted_state;
};

// Backtracking from alpha = 1: accepts the first alpha keeping Lambda
// positive definite, within the spectral bound, and satisfying the Armijo
// sufficient-decrease test on the frozen-probability objective Q.
LineSearchResult line_search(const ModelState& state, const SufficientStats& stats,
                             const Hyperparams& hp, const SolverConfig& config,
                             const NewtonDirection& direction,
                             const InclusionProbs& probs);

struct FitResult {
  ModelState state;
  InclusionProbs probs;
  SolverTrace trace;
};

// Full EM loop: E-step, then proximal-Newton coordinate descent over active
// sets with line search, repeated to convergence of the negative
// log-posterior. Non-convergence is reported through the trace, not thrown.
FitResult fit(const SufficientStats& stats, const Hyperparams& hp,
              const SolverConfig& config = SolverConfig{});

}  // namespace gcrf
