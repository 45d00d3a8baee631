#include "gcrf/solver.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace gcrf {

namespace {

double soft_threshold(double x, double kappa) {
  if (x > kappa) return x - kappa;
  if (x < -kappa) return x + kappa;
  return 0.0;
}

double weighted_l1(const ModelState& state, const Matrix& tau_theta,
                   const Matrix& tau_lambda) {
  double value = (tau_theta.array() * state.theta.array().abs()).sum();
  const auto p = state.lambda.rows();
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i + 1; j < p; ++j)
      value += tau_lambda(i, j) * std::abs(state.lambda(i, j));
  return value;
}

double weighted_l1_displaced(const ModelState& state, const NewtonDirection& dir,
                             double alpha, const Matrix& tau_theta,
                             const Matrix& tau_lambda) {
  double value =
      (tau_theta.array() *
       (state.theta + alpha * dir.delta_theta).array().abs()).sum();
  const auto p = state.lambda.rows();
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i + 1; j < p; ++j)
      value += tau_lambda(i, j) *
               std::abs(state.lambda(i, j) + alpha * dir.delta_lambda(i, j));
  return value;
}

// -l(theta, lambda) evaluated from a precomputed Cholesky factor of lambda,
// so the candidate's inverse is never materialized during backtracking.
double neg_log_lik_from_llt(const Matrix& theta, const Matrix& lambda,
                            const Eigen::LLT<Matrix>& llt,
                            const SufficientStats& stats) {
  const double n = static_cast<double>(stats.dims.n);
  const double logdet =
      2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double tr_syy = (stats.s_yy.array() * lambda.array()).sum();
  const double tr_sxy = 2.0 * (stats.s_xy.array() * theta.array()).sum();
  const Matrix tht_sxx_th = theta.transpose() * (stats.s_xx * theta);
  const double tr_quad = llt.solve(tht_sxx_th).trace();
  return -0.5 * n * (logdet - (tr_syy + tr_sxy + tr_quad));
}

}  // namespace

double lasso_coordinate_minimizer(double a, double b, double c, double tau) {
  return -c + soft_threshold(c - b / a, tau / a);
}

MStepContext make_mstep_context(const ModelState& state, const SufficientStats& stats) {
  MStepContext ctx;
  ctx.state = &state;
  ctx.stats = &stats;
  ctx.w = state.lambda_inv * state.theta.transpose() * stats.s_xx;
  Matrix a = ctx.w * state.theta * state.lambda_inv;
  ctx.a = (a + a.transpose()) * 0.5;
  return ctx;
}

double negative_log_posterior(const ModelState& state, const SufficientStats& stats,
                              const Hyperparams& hp) {
  double value = -log_likelihood(state, stats);
  for (Eigen::Index i = 0; i < state.theta.rows(); ++i)
    value += pen_mss(state.theta.row(i).transpose(), hp);
  const auto p = state.lambda.rows();
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i + 1; j < p; ++j)
      value += pen_ss(state.lambda(i, j), hp);
  return value;
}

InclusionProbs e_step(const ModelState& state, const Hyperparams& hp) {
  return compute_inclusion_probs(state, hp);
}

std::pair<Matrix, Matrix> mstep_penalty_weights(const InclusionProbs& probs,
                                                const Hyperparams& hp) {
  Matrix tau_theta =
      probs.p_theta.array() / hp.nu1_theta +
      (1.0 - probs.p_theta.array()) / hp.nu0_theta;
  Matrix tau_lambda =
      probs.p_lambda.array() / hp.nu1_lambda +
      (1.0 - probs.p_lambda.array()) / hp.nu0_lambda;
  tau_lambda.diagonal().setZero();
  return {tau_theta, tau_lambda};
}

ActiveSets active_sets(const ModelState& state, const SufficientStats& stats,
                       const Hyperparams& hp) {
  const Gradient grad = gradient(state, stats);
  const auto q = state.theta.rows();
  const auto p = state.theta.cols();

  ActiveSets sets;
  for (Eigen::Index i = 0; i < q; ++i) {
    const Vector row = state.theta.row(i).transpose();
    const double row_prob = eta2(row, hp);
    for (Eigen::Index j = 0; j < p; ++j) {
      const double w =
          eta1(row(j), hp.nu1_theta, hp.nu0_theta, hp.eta_theta) * row_prob;
      const double pen_deriv = w / hp.nu1_theta + (1.0 - w) / hp.nu0_theta;
      if (state.theta(i, j) != 0.0 || std::abs(grad.g_theta(i, j)) > pen_deriv)
        sets.theta.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    sets.lambda.emplace_back(static_cast<int>(i), static_cast<int>(i));
    for (Eigen::Index j = i + 1; j < p; ++j) {
      if (state.lambda(i, j) != 0.0 ||
          std::abs(grad.g_lambda(i, j)) > pen_ss_derivative(state.lambda(i, j), hp))
        sets.lambda.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return sets;
}

double coord_update_theta(int i, int j, const MStepContext& ctx,
                          NewtonDirection& dir, double tau, long* skipped) {
  const ModelState& state = *ctx.state;
  const SufficientStats& stats = *ctx.stats;
  const double n = static_cast<double>(stats.dims.n);
  const Matrix& li = state.lambda_inv;
  const Matrix& u_cache = dir.delta_theta_lambda_inv;
  const Matrix& v_cache = dir.delta_lambda_lambda_inv;

  const double a = n * li(j, j) * stats.s_xx(i, i);
  if (!(a > 0.0)) {
    if (skipped) ++*skipped;
    return 0.0;
  }
  // (Lambda^{-1} Delta_Lambda Lambda^{-1} Theta^T S_xx)_{ji} = (V^T W)_{ji}
  const double vw = v_cache.col(j).dot(ctx.w.col(i));
  // (Lambda^{-1} Delta_Theta^T S_xx)_{ji} = (U^T S_xx)_{ji}
  const double us = u_cache.col(j).dot(stats.s_xx.col(i));
  const double b = n * (-vw + stats.s_xy(i, j) + ctx.w(j, i) + us);
  const double c = state.theta(i, j) + dir.delta_theta(i, j);

  const double u = lasso_coordinate_minimizer(a, b, c, tau);
  if (u != 0.0) {
    dir.delta_theta(i, j) += u;
    dir.delta_theta_lambda_inv.row(i) += u * li.row(j);
  }
  return u;
}

double coord_update_lambda_offdiag(int i, int j, const MStepContext& ctx,
                                   NewtonDirection& dir, double tau, long* skipped) {
  const ModelState& state = *ctx.state;
  const SufficientStats& stats = *ctx.stats;
  const double n = static_cast<double>(stats.dims.n);
  const Matrix& li = state.lambda_inv;
  const Matrix& am = ctx.a;
  const Matrix& u_cache = dir.delta_theta_lambda_inv;
  const Matrix& v_cache = dir.delta_lambda_lambda_inv;

  // Curvature of the exact quadratic model along u*(e_i e_j^T + e_j e_i^T).
  const double a = n * (li(i, j) * li(i, j) + li(i, i) * li(j, j) +
                        2.0 * li(i, j) * am(i, j) + li(i, i) * am(j, j) +
                        li(j, j) * am(i, i));
  if (!(a > 0.0)) {
    if (skipped) ++*skipped;
    return 0.0;
  }

  // (Lambda^{-1} Delta_Theta^T S_xx Theta Lambda^{-1})_{ij+ji} = (U^T W^T)_{ij+ji}
  const double ut = u_cache.col(i).dot(ctx.w.row(j).transpose()) +
                    u_cache.col(j).dot(ctx.w.row(i).transpose());
  // (Lambda^{-1} Delta_Lambda Lambda^{-1})_{ij} = (V^T Lambda^{-1})_{ij}
  const double vl = v_cache.col(i).dot(li.col(j));
  // (Lambda^{-1} Delta_Lambda A)_{ij+ji} = (V^T A)_{ij+ji}
  const double va = v_cache.col(i).dot(am.col(j)) + v_cache.col(j).dot(am.col(i));
  const double b =
      -n * (li(i, j) - stats.s_yy(i, j) + am(i, j) + ut - vl - va);
  const double c = state.lambda(i, j) + dir.delta_lambda(i, j);

  const double u = lasso_coordinate_minimizer(a, b, c, tau);
  if (u != 0.0) {
    dir.delta_lambda(i, j) += u;
    dir.delta_lambda(j, i) += u;
    dir.delta_lambda_lambda_inv.row(i) += u * li.row(j);
    dir.delta_lambda_lambda_inv.row(j) += u * li.row(i);
  }
  return u;
}

double coord_update_lambda_diag(int i, const MStepContext& ctx,
                                NewtonDirection& dir, long* skipped) {
  const ModelState& state = *ctx.state;
  const SufficientStats& stats = *ctx.stats;
  const double n = static_cast<double>(stats.dims.n);
  const Matrix& li = state.lambda_inv;
  const Matrix& am = ctx.a;
  const Matrix& u_cache = dir.delta_theta_lambda_inv;
  const Matrix& v_cache = dir.delta_lambda_lambda_inv;

  const double a = n * (li(i, i) * li(i, i) + 2.0 * li(i, i) * am(i, i));
  if (!(a > 0.0)) {
    if (skipped) ++*skipped;
    return 0.0;
  }
  const double ut = u_cache.col(i).dot(ctx.w.row(i).transpose());
  const double vl = v_cache.col(i).dot(li.col(i));
  const double va = v_cache.col(i).dot(am.col(i));
  const double b = -n * (li(i, i) - stats.s_yy(i, i) + am(i, i) + 2.0 * ut -
                         vl - 2.0 * va);

  const double u = -b / a;
  if (u != 0.0) {
    dir.delta_lambda(i, i) += u;
    dir.delta_lambda_lambda_inv.row(i) += u * li.row(i);
  }
  return u;
}

double coord_update_theta(int i, int j, const ModelState& state,
                          const SufficientStats& stats, NewtonDirection& dir,
                          double tau, long* skipped) {
  const MStepContext ctx = make_mstep_context(state, stats);
  return coord_update_theta(i, j, ctx, dir, tau, skipped);
}

double coord_update_lambda_offdiag(int i, int j, const ModelState& state,
                                   const SufficientStats& stats, NewtonDirection& dir,
                                   double tau, long* skipped) {
  const MStepContext ctx = make_mstep_context(state, stats);
  return coord_update_lambda_offdiag(i, j, ctx, dir, tau, skipped);
}

double coord_update_lambda_diag(int i, const ModelState& state,
                                const SufficientStats& stats, NewtonDirection& dir,
                                long* skipped) {
  const MStepContext ctx = make_mstep_context(state, stats);
  return coord_update_lambda_diag(i, ctx, dir, skipped);
}

double mstep_objective(const ModelState& state, const SufficientStats& stats,
                       const Matrix& tau_theta, const Matrix& tau_lambda) {
  return -log_likelihood(state, stats) + weighted_l1(state, tau_theta, tau_lambda);
}

LineSearchResult line_search(const ModelState& state, const SufficientStats& stats,
                             const Hyperparams& hp, const SolverConfig& config,
                             const NewtonDirection& direction,
                             const InclusionProbs& probs) {
  const auto [tau_theta, tau_lambda] = mstep_penalty_weights(probs, hp);

  const double q0 = mstep_objective(state, stats, tau_theta, tau_lambda);
  const double model_q1 =
      -quadratic_model(state, stats, direction.delta_theta, direction.delta_lambda) +
      weighted_l1_displaced(state, direction, 1.0, tau_theta, tau_lambda);
  const double predicted = model_q1 - q0;

  LineSearchResult result;
  result.accepted_state = state;
  if (!(predicted < 0.0)) return result;  // not a descent direction of the model

  for (double alpha = 1.0; alpha >= config.min_step; alpha *= config.backtrack_beta) {
    Matrix cand_lambda = state.lambda + alpha * direction.delta_lambda;
    cand_lambda = ((cand_lambda + cand_lambda.transpose()) * 0.5).eval();
    Eigen::LLT<Matrix> llt(cand_lambda);
    if (llt.info() != Eigen::Success) continue;
    if (spectral_norm(cand_lambda) > hp.spectral_bound_r) continue;

    Matrix cand_theta = state.theta + alpha * direction.delta_theta;
    const double q_alpha =
        neg_log_lik_from_llt(cand_theta, cand_lambda, llt, stats) +
        weighted_l1_displaced(state, direction, alpha, tau_theta, tau_lambda);
    if (q_alpha <= q0 + config.armijo_sigma * alpha * predicted) {
      result.alpha = alpha;
      result.accepted_state.theta = std::move(cand_theta);
      result.accepted_state.lambda = std::move(cand_lambda);
      Matrix inv = llt.solve(Matrix::Identity(cand_lambda.rows(), cand_lambda.cols()));
      result.accepted_state.lambda_inv = (inv + inv.transpose()) * 0.5;
      return result;
    }
  }
  return result;  // alpha = 0: stall
}

FitResult fit(const SufficientStats& stats, const Hyperparams& hp,
              const SolverConfig& config) {
  hp.validate();
  config.validate();
  const int p = stats.dims.p;
  const int q = stats.dims.q;

  FitResult result;
  result.state = initialize_state(stats.dims);
  SolverTrace& trace = result.trace;

  double l_prev = negative_log_posterior(result.state, stats, hp);
  trace.objective_per_outer_iter.push_back(l_prev);
  trace.lambda_spectral_norm_per_outer.push_back(spectral_norm(result.state.lambda));

  for (int outer = 0; outer < hp.max_outer_iters; ++outer) {
    const InclusionProbs probs = e_step(result.state, hp);
    const auto [tau_theta, tau_lambda] = mstep_penalty_weights(probs, hp);

    double q_prev = mstep_objective(result.state, stats, tau_theta, tau_lambda);
    for (int inner = 0; inner < hp.max_inner_iters; ++inner) {
      const ActiveSets sets = active_sets(result.state, stats, hp);
      trace.active_set_sizes.emplace_back(static_cast<int>(sets.theta.size()),
                                          static_cast<int>(sets.lambda.size()));

      const MStepContext ctx = make_mstep_context(result.state, stats);
      NewtonDirection dir = NewtonDirection::zero(p, q);
      for (const auto& [i, j] : sets.theta)
        coord_update_theta(i, j, ctx, dir, tau_theta(i, j), &trace.skipped_updates);
      for (const auto& [i, j] : sets.lambda)
        if (i < j)
          coord_update_lambda_offdiag(i, j, ctx, dir, tau_lambda(i, j),
                                      &trace.skipped_updates);
      for (int i = 0; i < p; ++i)
        coord_update_lambda_diag(i, ctx, dir, &trace.skipped_updates);

      const double dir_norm =
          std::max(dir.delta_theta.cwiseAbs().maxCoeff(),
                   dir.delta_lambda.cwiseAbs().maxCoeff());
      if (dir_norm < 1e-14) break;

      const LineSearchResult ls =
          line_search(result.state, stats, hp, config, dir, probs);
      if (ls.alpha == 0.0) {
        trace.stalled = true;
        break;
      }
      result.state = ls.accepted_state;
      trace.step_sizes.push_back(ls.alpha);

      const double q_new = mstep_objective(result.state, stats, tau_theta, tau_lambda);
      const bool inner_done =
          std::abs(q_new - q_prev) / (1.0 + std::abs(q_prev)) < hp.inner_tol;
      q_prev = q_new;
      if (inner_done) break;
    }

    const double l_new = negative_log_posterior(result.state, stats, hp);
    trace.objective_per_outer_iter.push_back(l_new);
    trace.lambda_spectral_norm_per_outer.push_back(spectral_norm(result.state.lambda));
    trace.outer_iters_used = outer + 1;

    if (trace.stalled) break;
    if (std::abs(l_new - l_prev) / (1.0 + std::abs(l_prev)) < hp.outer_tol) {
      trace.converged = true;
      break;
    }
    l_prev = l_new;
  }

  result.probs = e_step(result.state, hp);
  return result;
}

}  // namespace gcrf
