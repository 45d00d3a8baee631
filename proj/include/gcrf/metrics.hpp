#pragma once

#include "gcrf/coef.hpp"
#include "gcrf/types.hpp"

#include <string>

namespace gcrf {

struct SupportPattern {
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> theta_support;   // q x p
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> lambda_support;  // p x p
  Eigen::Matrix<bool, Eigen::Dynamic, 1> b_column_support;             // length q
};

struct ScoreReport {
  double frob_theta = 0.0;
  double frob_lambda = 0.0;
  double frob_b = 0.0;
  double mcc_theta = 0.0;
  double mcc_lambda = 0.0;
  double mcc_b = 0.0;
  double mcc_b_columns = 0.0;

  // One metric per line, name=value, 6 significant digits.
  std::string to_text() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

// Strict thresholding of the inclusion probabilities; the Lambda diagonal is
// always included and a B column is supported when its Theta row has any
// supported entry.
SupportPattern recover_support(const InclusionProbs& probs, double t);

// Matthews correlation coefficient; 0 when any denominator factor vanishes.
double mcc(long tp, long tn, long fp, long fn);

struct Estimate {
  Matrix theta;
  Matrix lambda;
  Matrix b;
  InclusionProbs probs;
};

struct GroundTruth {
  Matrix theta;
  Matrix lambda;
  Matrix b;
};

// Frobenius errors plus support-recovery MCCs. Lambda support is scored on
// the strict upper triangle only; B element support uses the exact-zero
// pattern of the estimate, so for the plug-in estimator it mostly reflects
// column recovery.
ScoreReport score(const Estimate& estimate, const GroundTruth& truth, double t);

}  // namespace gcrf
