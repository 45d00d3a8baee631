#include "gcrf/coef.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <sstream>

namespace gcrf {

std::vector<int> selected_rows(const Matrix& theta) {
  std::vector<int> rows;
  for (Eigen::Index i = 0; i < theta.rows(); ++i)
    if ((theta.row(i).array() != 0.0).any()) rows.push_back(static_cast<int>(i));
  return rows;
}

BEstimate plug_in_b(const ModelState& state) {
  const auto p = state.lambda.rows();
  const auto q = state.theta.rows();
  Eigen::LLT<Matrix> llt(state.lambda);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("plug_in_b: lambda is not positive definite");

  BEstimate estimate;
  estimate.method = BMethod::PlugIn;
  estimate.selected_covariates = selected_rows(state.theta);
  estimate.b = Matrix::Zero(p, q);
  // Solve column by column so zero rows of Theta give exactly-zero columns.
  for (int i : estimate.selected_covariates)
    estimate.b.col(i) = -llt.solve(state.theta.row(i).transpose());
  return estimate;
}

BEstimate multi_regression_b(const Matrix& x, const Matrix& y,
                             const std::vector<int>& selected) {
  if (selected.empty())
    throw std::invalid_argument("multi_regression_b: no covariates selected");
  if (x.rows() <= static_cast<Eigen::Index>(selected.size())) {
    std::ostringstream msg;
    msg << "multi_regression_b: " << x.rows() << " observations cannot fit "
        << selected.size() << " covariates";
    throw std::invalid_argument(msg.str());
  }

  Matrix x_sel(x.rows(), selected.size());
  for (size_t k = 0; k < selected.size(); ++k) x_sel.col(k) = x.col(selected[k]);

  Eigen::ColPivHouseholderQR<Matrix> qr(x_sel);
  if (qr.rank() < static_cast<Eigen::Index>(selected.size()))
    throw std::runtime_error("multi_regression_b: selected covariates are collinear");

  BEstimate estimate;
  estimate.method = BMethod::MultiRegression;
  estimate.selected_covariates = selected;
  estimate.b = Matrix::Zero(y.cols(), x.cols());
  const Matrix beta = qr.solve(y);  // |selected| x p
  for (size_t k = 0; k < selected.size(); ++k)
    estimate.b.col(selected[k]) = beta.row(k).transpose();
  return estimate;
}

BMethod choose_b_method(const ProblemDims& dims, int p_threshold) {
  return dims.p <= p_threshold ? BMethod::PlugIn : BMethod::MultiRegression;
}

}  // namespace gcrf
