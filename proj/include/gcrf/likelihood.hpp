#pragma once

#include "gcrf/types.hpp"

namespace gcrf {

struct Gradient {
  Matrix g_theta;   // q x p
  Matrix g_lambda;  // p x p, symmetrized
};

// (n/2) * (logdet(Lambda) - tr(S_yy Lambda + 2 S_xy^T Theta
//          + Lambda^{-1} Theta^T S_xx Theta)).
// The log determinant comes from a Cholesky factor; throws if Lambda is not
// positive definite.
double log_likelihood(const ModelState& state, const SufficientStats& stats);

Gradient gradient(const ModelState& state, const SufficientStats& stats);

// Second-order expansion g(delta_theta, delta_lambda) of the log-likelihood
// around the current state; exactly quadratic in the displacement and equal
// to log_likelihood at zero displacement.
double quadratic_model(const ModelState& state, const SufficientStats& stats,
                       const Matrix& delta_theta, const Matrix& delta_lambda);

}  // namespace gcrf
