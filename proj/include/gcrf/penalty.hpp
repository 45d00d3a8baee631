#pragma once

#include "gcrf/types.hpp"

namespace gcrf {

// log LP(x, nu) where LP is the Laplace density with scale nu.
double laplace_log_density(double x, double nu);

// Posterior slab probability of a single element under the two-component
// Laplace mixture. Computed in log space; stable for |x| up to 1e6.
double eta1(double x, double nu1, double nu0, double eta);

// Posterior slab probability of a whole Theta row. Products over the row are
// accumulated as log sums so long rows with tiny spike scales do not
// underflow.
double eta2(const Vector& theta_row, const Hyperparams& hp);

// Mixed spike-and-slab penalty of a Theta row: -log(rho*S1 + (1-rho)*S2).
double pen_mss(const Vector& theta_row, const Hyperparams& hp);

// Plain spike-and-slab penalty of a scalar Lambda entry.
double pen_ss(double x, const Hyperparams& hp);

// Derivatives with respect to |.|; always within [1/nu1, 1/nu0].
double pen_mss_derivative(const Vector& theta_row, int j, const Hyperparams& hp);
double pen_ss_derivative(double x, const Hyperparams& hp);

// Element, row, and (element x row) posterior inclusion probabilities at the
// current iterate. Lambda diagonal entries are reported as 1 (unpenalized).
InclusionProbs compute_inclusion_probs(const ModelState& state, const Hyperparams& hp);

}  // namespace gcrf
