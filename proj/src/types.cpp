#include "gcrf/types.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>

namespace gcrf {

void ModelState::refresh_lambda_inv() {
  Eigen::LLT<Matrix> llt(lambda);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("ModelState: lambda is not positive definite");
  lambda_inv = llt.solve(Matrix::Identity(lambda.rows(), lambda.cols()));
  // The Cholesky solve of a symmetric matrix is symmetric analytically but
  // not exactly in floating point.
  lambda_inv = ((lambda_inv + lambda_inv.transpose()) * 0.5).eval();
}

SufficientStats compute_sufficient_stats(const Matrix& x, const Matrix& y,
                                         bool standardize) {
  if (x.rows() != y.rows()) {
    std::ostringstream msg;
    msg << "compute_sufficient_stats: x has " << x.rows() << " rows but y has "
        << y.rows();
    throw std::invalid_argument(msg.str());
  }
  if (x.rows() < 1)
    throw std::invalid_argument("compute_sufficient_stats: need at least one observation");

  const auto n = x.rows();
  Matrix xc = x;
  Matrix yc = y;
  if (standardize) {
    xc.rowwise() -= x.colwise().mean();
    yc.rowwise() -= y.colwise().mean();
  }

  SufficientStats stats;
  stats.dims = ProblemDims{static_cast<int>(n), static_cast<int>(y.cols()),
                           static_cast<int>(x.cols())};
  const double inv_n = 1.0 / static_cast<double>(n);
  Matrix syy = inv_n * (yc.transpose() * yc);
  Matrix sxx = inv_n * (xc.transpose() * xc);
  stats.s_yy = (syy + syy.transpose()) * 0.5;
  stats.s_xx = (sxx + sxx.transpose()) * 0.5;
  stats.s_xy = inv_n * (xc.transpose() * yc);
  return stats;
}

ModelState initialize_state(const ProblemDims& dims) {
  dims.validate();
  ModelState state;
  state.theta = Matrix::Zero(dims.q, dims.p);
  state.lambda = Matrix::Identity(dims.p, dims.p);
  state.lambda_inv = Matrix::Identity(dims.p, dims.p);
  return state;
}

Hyperparams default_hyperparams(const ProblemDims& dims) {
  dims.validate();
  Hyperparams hp;
  const double nu0 =
      1.0 / (2.0 * std::sqrt(static_cast<double>(dims.n) *
                             std::log(static_cast<double>(dims.p + dims.q))));
  hp.nu0_theta = nu0;
  hp.nu0_lambda = nu0;
  hp.nu1_theta = 1.0;
  hp.nu1_lambda = 1.0;
  hp.eta_theta = 0.9;
  hp.eta_lambda = 0.5;
  hp.rho = 0.5;
  return hp;
}

double spectral_norm(const Matrix& m, int max_iters, double rel_tol) {
  if (m.rows() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  Vector v = Vector::Ones(m.cols());
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vector w = m.transpose() * (m * v);
    double norm = w.norm();
    if (norm == 0.0) return 0.0;
    double new_est = std::sqrt(norm);
    w /= norm;
    if (it > 0 && std::abs(new_est - est) <= rel_tol * std::abs(new_est)) {
      return new_est;
    }
    est = new_est;
    v = w;
  }
  return est;
}

}  // namespace gcrf
