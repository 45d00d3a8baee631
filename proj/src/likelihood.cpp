#include "gcrf/likelihood.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace gcrf {

namespace {

double log_det_from_cholesky(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("log_likelihood: lambda is not positive definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

double log_likelihood(const ModelState& state, const SufficientStats& stats) {
  const double n = static_cast<double>(stats.dims.n);
  const double logdet = log_det_from_cholesky(state.lambda);
  const double tr_syy = (stats.s_yy.array() * state.lambda.array()).sum();
  const double tr_sxy = 2.0 * (stats.s_xy.array() * state.theta.array()).sum();
  const Matrix sxx_theta = stats.s_xx * state.theta;
  const double tr_quad =
      (state.lambda_inv.array() * (state.theta.transpose() * sxx_theta).array()).sum();
  return 0.5 * n * (logdet - (tr_syy + tr_sxy + tr_quad));
}

Gradient gradient(const ModelState& state, const SufficientStats& stats) {
  const double n = static_cast<double>(stats.dims.n);
  Gradient g;
  g.g_theta = 0.5 * n *
              (-2.0 * stats.s_xy - 2.0 * stats.s_xx * state.theta * state.lambda_inv);
  Matrix a = state.lambda_inv * state.theta.transpose() * stats.s_xx * state.theta *
             state.lambda_inv;
  Matrix gl = 0.5 * n * (-stats.s_yy + state.lambda_inv + a);
  g.g_lambda = (gl + gl.transpose()) * 0.5;
  return g;
}

double quadratic_model(const ModelState& state, const SufficientStats& stats,
                       const Matrix& delta_theta, const Matrix& delta_lambda_in) {
  const double n = static_cast<double>(stats.dims.n);
  const Matrix delta_lambda = (delta_lambda_in + delta_lambda_in.transpose()) * 0.5;
  const Matrix& li = state.lambda_inv;
  const Matrix& th = state.theta;
  const Matrix& sxx = stats.s_xx;

  const double logdet = log_det_from_cholesky(state.lambda);
  const Matrix sxx_th = sxx * th;                 // q x p
  const Matrix tht_sxx_th = th.transpose() * sxx_th;  // p x p
  const Matrix li_dl = li * delta_lambda;         // p x p
  const Matrix li_tht_sxx = li * th.transpose() * sxx;  // p x q

  double value = 0.0;
  value += 0.5 * n * logdet;
  value -= 0.5 * n * (stats.s_yy.array() * state.lambda.array()).sum();
  value -= n * (stats.s_xy.array() * th.array()).sum();
  value -= 0.5 * n * (li.array() * tht_sxx_th.array()).sum();
  value += 0.5 * n * (li.array() * delta_lambda.array()).sum();
  value -= 0.5 * n * (stats.s_yy.array() * delta_lambda.array()).sum();
  value += 0.5 * n * ((li * tht_sxx_th * li).array() * delta_lambda.array()).sum();
  value -= 0.25 * n * (li_dl * li_dl).trace();
  value -= 0.5 * n * (li_dl * li * tht_sxx_th * li * delta_lambda).trace();
  value += n * (li_dl * li_tht_sxx * delta_theta).trace();
  value -= n * (stats.s_xy.array() * delta_theta.array()).sum();
  value -= n * (li_tht_sxx.transpose().array() * delta_theta.array()).sum();
  value -= 0.5 * n * (li * delta_theta.transpose() * sxx * delta_theta).trace();
  return value;
}

}  // namespace gcrf
