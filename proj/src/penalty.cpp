#include "gcrf/penalty.hpp"

#include <algorithm>
#include <cmath>

namespace gcrf {

namespace {

double log_sum_exp(double a, double b) {
  double hi = std::max(a, b);
  double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// log(rho * S1) and log((1-rho) * S2) for a Theta row.
struct RowLogTerms {
  double log_s1 = 0.0;
  double log_s2 = 0.0;
};

RowLogTerms row_log_terms(const Vector& row, const Hyperparams& hp) {
  const double log_eta = std::log(hp.eta_theta);
  const double log_1m_eta = std::log1p(-hp.eta_theta);
  RowLogTerms t;
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    const double l1 = laplace_log_density(row(j), hp.nu1_theta);
    const double l0 = laplace_log_density(row(j), hp.nu0_theta);
    t.log_s1 += log_sum_exp(log_eta + l1, log_1m_eta + l0);
    t.log_s2 += l0;
  }
  return t;
}

}  // namespace

double laplace_log_density(double x, double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("laplace_log_density: nu must be positive");
  return -std::log(2.0 * nu) - std::abs(x) / nu;
}

double eta1(double x, double nu1, double nu0, double eta) {
  // 1 / (1 + exp(log((1-eta)/eta) + logLP(x,nu0) - logLP(x,nu1)))
  const double z = std::log1p(-eta) - std::log(eta) +
                   laplace_log_density(x, nu0) - laplace_log_density(x, nu1);
  if (z > 0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double eta2(const Vector& theta_row, const Hyperparams& hp) {
  const RowLogTerms t = row_log_terms(theta_row, hp);
  const double z = std::log1p(-hp.rho) - std::log(hp.rho) + t.log_s2 - t.log_s1;
  if (z > 0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double pen_mss(const Vector& theta_row, const Hyperparams& hp) {
  const RowLogTerms t = row_log_terms(theta_row, hp);
  return -log_sum_exp(std::log(hp.rho) + t.log_s1,
                      std::log1p(-hp.rho) + t.log_s2);
}

double pen_ss(double x, const Hyperparams& hp) {
  const double l1 = laplace_log_density(x, hp.nu1_lambda);
  const double l0 = laplace_log_density(x, hp.nu0_lambda);
  return -log_sum_exp(std::log(hp.eta_lambda) + l1,
                      std::log1p(-hp.eta_lambda) + l0);
}

double pen_mss_derivative(const Vector& theta_row, int j, const Hyperparams& hp) {
  const double w = eta1(theta_row(j), hp.nu1_theta, hp.nu0_theta, hp.eta_theta) *
                   eta2(theta_row, hp);
  return w / hp.nu1_theta + (1.0 - w) / hp.nu0_theta;
}

double pen_ss_derivative(double x, const Hyperparams& hp) {
  const double w = eta1(x, hp.nu1_lambda, hp.nu0_lambda, hp.eta_lambda);
  return w / hp.nu1_lambda + (1.0 - w) / hp.nu0_lambda;
}

InclusionProbs compute_inclusion_probs(const ModelState& state, const Hyperparams& hp) {
  const auto q = state.theta.rows();
  const auto p = state.theta.cols();
  InclusionProbs probs;
  probs.p_theta.resize(q, p);
  probs.row_probs_theta.resize(q);
  for (Eigen::Index i = 0; i < q; ++i) {
    const double row_prob = eta2(state.theta.row(i).transpose(), hp);
    probs.row_probs_theta(i) = row_prob;
    for (Eigen::Index j = 0; j < p; ++j) {
      probs.p_theta(i, j) =
          eta1(state.theta(i, j), hp.nu1_theta, hp.nu0_theta, hp.eta_theta) * row_prob;
    }
  }
  probs.p_lambda.resize(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    probs.p_lambda(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const double pij =
          eta1(state.lambda(i, j), hp.nu1_lambda, hp.nu0_lambda, hp.eta_lambda);
      probs.p_lambda(i, j) = pij;
      probs.p_lambda(j, i) = pij;
    }
  }
  return probs;
}

}  // namespace gcrf
