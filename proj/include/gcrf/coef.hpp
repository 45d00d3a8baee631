#pragma once

#include "gcrf/types.hpp"

#include <vector>

namespace gcrf {

enum class BMethod { PlugIn, MultiRegression };

struct BEstimate {
  Matrix b;  // p x q; columns of dropped covariates are exactly zero
  BMethod method = BMethod::PlugIn;
  std::vector<int> selected_covariates;  // rows i with Theta_i. != 0
};

// B = -Lambda^{-1} Theta^T by Cholesky solve. Zero rows of Theta map to
// exactly-zero columns of B even though Lambda^{-1} is dense.
BEstimate plug_in_b(const ModelState& state);

// Per-response OLS on the selected covariate columns (QR factorization);
// non-selected columns of B are zero. Requires n > |selected|.
BEstimate multi_regression_b(const Matrix& x, const Matrix& y,
                             const std::vector<int>& selected);

// PlugIn for p <= p_threshold, MultiRegression above it.
BMethod choose_b_method(const ProblemDims& dims, int p_threshold = 100);

// Rows of theta with at least one nonzero entry (exact-zero test).
std::vector<int> selected_rows(const Matrix& theta);

}  // namespace gcrf
