#include "gcrf/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace gcrf {

namespace {

std::string format_metric(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Counts {
  long tp = 0, tn = 0, fp = 0, fn = 0;
  void add(bool predicted, bool actual) {
    if (predicted && actual) ++tp;
    else if (predicted && !actual) ++fp;
    else if (!predicted && actual) ++fn;
    else ++tn;
  }
};

}  // namespace

std::string ScoreReport::to_text() const {
  std::ostringstream out;
  out << "frob_theta=" << format_metric(frob_theta) << "\n"
      << "frob_lambda=" << format_metric(frob_lambda) << "\n"
      << "frob_b=" << format_metric(frob_b) << "\n"
      << "mcc_theta=" << format_metric(mcc_theta) << "\n"
      << "mcc_lambda=" << format_metric(mcc_lambda) << "\n"
      << "mcc_b=" << format_metric(mcc_b) << "\n"
      << "mcc_b_columns=" << format_metric(mcc_b_columns) << "\n";
  return out.str();
}

std::string ScoreReport::csv_header() {
  return "frob_theta,frob_lambda,frob_b,mcc_theta,mcc_lambda,mcc_b,mcc_b_columns";
}

std::string ScoreReport::to_csv_row() const {
  std::ostringstream out;
  out << format_metric(frob_theta) << ',' << format_metric(frob_lambda) << ','
      << format_metric(frob_b) << ',' << format_metric(mcc_theta) << ','
      << format_metric(mcc_lambda) << ',' << format_metric(mcc_b) << ','
      << format_metric(mcc_b_columns);
  return out.str();
}

SupportPattern recover_support(const InclusionProbs& probs, double t) {
  SupportPattern pattern;
  pattern.theta_support = probs.p_theta.array() > t;
  pattern.lambda_support = probs.p_lambda.array() > t;
  pattern.lambda_support.diagonal().setConstant(true);
  pattern.b_column_support = pattern.theta_support.rowwise().any();
  return pattern;
}

double mcc(long tp, long tn, long fp, long fn) {
  const double d1 = static_cast<double>(tp + fp);
  const double d2 = static_cast<double>(tp + fn);
  const double d3 = static_cast<double>(tn + fp);
  const double d4 = static_cast<double>(tn + fn);
  if (d1 == 0.0 || d2 == 0.0 || d3 == 0.0 || d4 == 0.0) return 0.0;
  const double num = static_cast<double>(tp) * static_cast<double>(tn) -
                     static_cast<double>(fp) * static_cast<double>(fn);
  return num / std::sqrt(d1 * d2 * d3 * d4);
}

ScoreReport score(const Estimate& estimate, const GroundTruth& truth, double t) {
  if (estimate.theta.rows() != truth.theta.rows() ||
      estimate.theta.cols() != truth.theta.cols() ||
      estimate.lambda.rows() != truth.lambda.rows() ||
      estimate.b.rows() != truth.b.rows() || estimate.b.cols() != truth.b.cols())
    throw std::invalid_argument("score: estimate and truth shapes differ");

  ScoreReport report;
  report.frob_theta = (estimate.theta - truth.theta).norm();
  report.frob_lambda = (estimate.lambda - truth.lambda).norm();
  report.frob_b = (estimate.b - truth.b).norm();

  const SupportPattern pattern = recover_support(estimate.probs, t);

  Counts theta_counts;
  for (Eigen::Index i = 0; i < truth.theta.rows(); ++i)
    for (Eigen::Index j = 0; j < truth.theta.cols(); ++j)
      theta_counts.add(pattern.theta_support(i, j), truth.theta(i, j) != 0.0);
  report.mcc_theta = mcc(theta_counts.tp, theta_counts.tn, theta_counts.fp,
                         theta_counts.fn);

  Counts lambda_counts;  // strict upper triangle only
  for (Eigen::Index i = 0; i < truth.lambda.rows(); ++i)
    for (Eigen::Index j = i + 1; j < truth.lambda.cols(); ++j)
      lambda_counts.add(pattern.lambda_support(i, j), truth.lambda(i, j) != 0.0);
  report.mcc_lambda = mcc(lambda_counts.tp, lambda_counts.tn, lambda_counts.fp,
                          lambda_counts.fn);

  Counts b_counts;
  for (Eigen::Index i = 0; i < truth.b.rows(); ++i)
    for (Eigen::Index j = 0; j < truth.b.cols(); ++j)
      b_counts.add(estimate.b(i, j) != 0.0, truth.b(i, j) != 0.0);
  report.mcc_b = mcc(b_counts.tp, b_counts.tn, b_counts.fp, b_counts.fn);

  Counts col_counts;
  for (Eigen::Index j = 0; j < truth.b.cols(); ++j)
    col_counts.add((estimate.b.col(j).array() != 0.0).any(),
                   (truth.b.col(j).array() != 0.0).any());
  report.mcc_b_columns = mcc(col_counts.tp, col_counts.tn, col_counts.fp,
                             col_counts.fn);
  return report;
}

}  // namespace gcrf
