#include "gcrf/simulate.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace gcrf {

namespace {

// Distinct index sample of size k from {0, ..., n-1} (partial Fisher-Yates).
std::vector<int> sample_indices(int n, int k, std::mt19937_64& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

double signed_uniform(double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(lo, hi);
  std::uniform_int_distribution<int> coin(0, 1);
  const double value = mag(rng);
  return coin(rng) == 0 ? value : -value;
}

}  // namespace

void SimConfig::validate() const {
  dims.validate();
  const int max_upper = dims.p * (dims.p - 1) / 2;
  if (s_lambda < 0 || s_lambda > max_upper)
    throw std::invalid_argument("SimConfig: s_lambda exceeds the upper triangle");
  if (theta_method == ThetaMethod::IndependentUniform &&
      (s_theta < 0 || s_theta > dims.p))
    throw std::invalid_argument("SimConfig: s_theta must lie in [0, p]");
  if (!(zero_row_fraction >= 0.0 && zero_row_fraction <= 1.0))
    throw std::invalid_argument("SimConfig: zero_row_fraction must lie in [0,1]");
  if (!(signal_lo > 0.0 && signal_lo < signal_hi))
    throw std::invalid_argument("SimConfig: need 0 < signal_lo < signal_hi");
  if (!(row_norm > 0.0))
    throw std::invalid_argument("SimConfig: row_norm must be positive");
  if (!(std::abs(toeplitz_offdiag) < 0.5))
    throw std::invalid_argument("SimConfig: |toeplitz_offdiag| must be < 0.5");
}

std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t replication_seed(std::uint64_t master_seed, int rep) {
  std::uint64_t state = master_seed;
  std::uint64_t value = 0;
  for (int r = 0; r <= rep; ++r) value = splitmix64_next(state);
  return value;
}

Matrix gen_omega_xx(int q, double offdiag) {
  if (!(std::abs(offdiag) < 0.5))
    throw std::invalid_argument("gen_omega_xx: |offdiag| must be < 0.5 for PD");
  Matrix omega = Matrix::Identity(q, q);
  for (int i = 0; i + 1 < q; ++i) {
    omega(i, i + 1) = offdiag;
    omega(i + 1, i) = offdiag;
  }
  return omega;
}

Matrix gen_lambda0(int p, int s_lambda, double lo, double hi, std::mt19937_64& rng) {
  Matrix lambda = Matrix::Zero(p, p);
  const int max_upper = p * (p - 1) / 2;
  if (s_lambda > max_upper)
    throw std::invalid_argument("gen_lambda0: s_lambda exceeds the upper triangle");
  const std::vector<int> flat = sample_indices(max_upper, s_lambda, rng);
  for (int f : flat) {
    // Unrank the flat index into the strict upper triangle, row by row.
    int i = 0;
    int remaining = f;
    int row_len = p - 1;
    while (remaining >= row_len) {
      remaining -= row_len;
      --row_len;
      ++i;
    }
    const int j = i + 1 + remaining;
    const double value = signed_uniform(lo, hi, rng);
    lambda(i, j) = value;
    lambda(j, i) = value;
  }
  for (int i = 0; i < p; ++i)
    lambda(i, i) = lambda.row(i).cwiseAbs().sum() + 0.2;
  return lambda;
}

Matrix gen_theta0(const SimConfig& config, std::mt19937_64& rng) {
  const int q = config.dims.q;
  const int p = config.dims.p;
  Matrix theta = Matrix::Zero(q, p);

  const int zero_rows = static_cast<int>(std::ceil(config.zero_row_fraction * q));
  const std::vector<int> zeroed = sample_indices(q, zero_rows, rng);
  std::vector<bool> is_zero(q, false);
  for (int i : zeroed) is_zero[i] = true;

  for (int i = 0; i < q; ++i) {
    if (is_zero[i]) continue;
    if (config.theta_method == ThetaMethod::IndependentUniform) {
      for (int j : sample_indices(p, config.s_theta, rng))
        theta(i, j) = signed_uniform(config.signal_lo, config.signal_hi, rng);
    } else {
      const int lo = std::max(1, static_cast<int>(std::ceil(0.1 * p)));
      const int hi = std::max(lo, static_cast<int>(std::floor(0.5 * p)));
      std::uniform_int_distribution<int> count(lo, hi);
      const int k = count(rng);
      const std::vector<int> cols = sample_indices(p, k, rng);
      Vector direction(k);
      std::normal_distribution<double> gauss(0.0, 1.0);
      for (int d = 0; d < k; ++d) direction(d) = gauss(rng);
      direction *= config.row_norm / direction.norm();
      for (int d = 0; d < k; ++d) theta(i, cols[d]) = direction(d);
    }
  }
  return theta;
}

GroundTruth gen_truth(const SimConfig& config, std::mt19937_64& rng) {
  config.validate();
  GroundTruth truth;
  truth.lambda = gen_lambda0(config.dims.p, config.s_lambda, config.signal_lo,
                             config.signal_hi, rng);
  truth.theta = gen_theta0(config, rng);
  Eigen::LLT<Matrix> lambda_llt(truth.lambda);
  truth.b = -lambda_llt.solve(truth.theta.transpose());
  return truth;
}

namespace {

// X rows ~ N(0, Omega_xx^{-1}) and Y rows = B0 x + eps with
// eps ~ N(0, Lambda0^{-1}), both drawn by triangular solves against the
// Cholesky factors of the precision matrices.
void draw_data(const SimConfig& config, const GroundTruth& truth,
               std::mt19937_64& rng, Matrix& x, Matrix& y) {
  const int n = config.dims.n;
  const int p = config.dims.p;
  const int q = config.dims.q;
  const Matrix omega = gen_omega_xx(q, config.toeplitz_offdiag);
  const Matrix omega_lt = Eigen::LLT<Matrix>(omega).matrixU();
  const Matrix lambda_lt = Eigen::LLT<Matrix>(truth.lambda).matrixU();
  std::normal_distribution<double> gauss(0.0, 1.0);

  x.resize(n, q);
  y.resize(n, p);
  Vector z(q), e(p);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < q; ++c) z(c) = gauss(rng);
    x.row(r) = omega_lt.triangularView<Eigen::Upper>().solve(z).transpose();
  }
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < p; ++c) e(c) = gauss(rng);
    y.row(r) = (truth.b * x.row(r).transpose() +
                lambda_lt.triangularView<Eigen::Upper>().solve(e)).transpose();
  }
}

}  // namespace

Dataset gen_dataset(const SimConfig& config, std::mt19937_64& rng) {
  config.validate();
  Dataset data;
  data.truth = gen_truth(config, rng);
  draw_data(config, data.truth, rng, data.x, data.y);
  return data;
}

namespace {

ScoreReport run_one(const SimConfig& config, const Hyperparams& hp,
                    const SolverConfig& solver_config, int rep) {
  SimConfig rep_config = config;
  rep_config.seed = replication_seed(config.seed, rep);
  std::mt19937_64 rng(rep_config.seed);

  Dataset data;
  if (config.fix_truth) {
    // One truth drawn from the master seed; only the data are redrawn.
    std::mt19937_64 truth_rng(config.seed);
    data.truth = gen_truth(config, truth_rng);
    draw_data(config, data.truth, rng, data.x, data.y);
  } else {
    data = gen_dataset(rep_config, rng);
  }

  const SufficientStats stats = compute_sufficient_stats(data.x, data.y);
  FitResult result = fit(stats, hp, solver_config);

  Estimate estimate;
  estimate.theta = result.state.theta;
  estimate.lambda = result.state.lambda;
  estimate.probs = result.probs;
  if (choose_b_method(stats.dims) == BMethod::PlugIn) {
    estimate.b = plug_in_b(result.state).b;
  } else {
    const std::vector<int> selected = selected_rows(result.state.theta);
    estimate.b = selected.empty()
                     ? Matrix::Zero(stats.dims.p, stats.dims.q)
                     : multi_regression_b(data.x, data.y, selected).b;
  }
  return score(estimate, data.truth, hp.threshold_t);
}

double field_sum(const std::vector<ScoreReport>& reports, double ScoreReport::*field) {
  double total = 0.0;
  for (const auto& r : reports) total += r.*field;
  return total;
}

}  // namespace

MetricSummary run_replications(const SimConfig& config, const Hyperparams& hp,
                               const SolverConfig& solver_config, int reps,
                               int jobs) {
  if (reps < 1) throw std::invalid_argument("run_replications: reps must be >= 1");
  config.validate();

  MetricSummary summary;
  summary.replications.resize(reps);
  if (jobs <= 1) {
    for (int r = 0; r < reps; ++r)
      summary.replications[r] = run_one(config, hp, solver_config, r);
  } else {
    std::vector<std::future<void>> tasks;
    std::atomic<int> next{0};
    const int workers = std::min(jobs, reps);
    for (int w = 0; w < workers; ++w) {
      tasks.push_back(std::async(std::launch::async, [&] {
        for (int r = next.fetch_add(1); r < reps; r = next.fetch_add(1))
          summary.replications[r] = run_one(config, hp, solver_config, r);
      }));
    }
    for (auto& t : tasks) t.get();
  }

  const double k = static_cast<double>(reps);
  const auto fields = {
      &ScoreReport::frob_theta, &ScoreReport::frob_lambda, &ScoreReport::frob_b,
      &ScoreReport::mcc_theta, &ScoreReport::mcc_lambda, &ScoreReport::mcc_b,
      &ScoreReport::mcc_b_columns};
  for (auto field : fields) {
    const double mean = field_sum(summary.replications, field) / k;
    double ss = 0.0;
    for (const auto& r : summary.replications) {
      const double d = r.*field - mean;
      ss += d * d;
    }
    const double se = reps > 1 ? std::sqrt(ss / (k - 1.0) / k) : 0.0;
    summary.mean.*field = mean;
    summary.stderr_.*field = se;
  }
  return summary;
}

SimConfig named_setup(const std::string& name) {
  SimConfig config;
  if (name == "setup1") {
    config.dims = {1, 10, 50};
    config.s_lambda = 5;
    config.theta_method = ThetaMethod::IndependentUniform;
    config.s_theta = 10;
    config.signal_lo = 0.1;
    config.signal_hi = 0.2;
  } else if (name == "setup2") {
    config.dims = {1, 10, 50};
    config.s_lambda = 5;
    config.theta_method = ThetaMethod::SphereRows;
    config.row_norm = 0.5;
    config.signal_lo = 0.1;
    config.signal_hi = 0.2;
  } else if (name == "setup3") {
    config.dims = {1, 50, 100};
    config.s_lambda = 100;
    config.theta_method = ThetaMethod::SphereRows;
    config.row_norm = 0.5;
    config.signal_lo = 0.1;
    config.signal_hi = 0.2;
  } else if (name == "s1") {
    config.dims = {1, 10, 50};
    config.s_lambda = 5;
    config.theta_method = ThetaMethod::IndependentUniform;
    config.s_theta = 10;
    config.signal_lo = 4.0;
    config.signal_hi = 6.0;
  } else if (name == "s2") {
    config.dims = {1, 10, 50};
    config.s_lambda = 5;
    config.theta_method = ThetaMethod::SphereRows;
    config.row_norm = 4.0;
    config.signal_lo = 4.0;
    config.signal_hi = 6.0;
  } else {
    throw std::invalid_argument("unknown setup name: " + name);
  }
  return config;
}

}  // namespace gcrf
