#pragma once

#include "gcrf/metrics.hpp"
#include "gcrf/solver.hpp"
#include "gcrf/types.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace gcrf {

enum class ThetaMethod { IndependentUniform, SphereRows };

struct SimConfig {
  ProblemDims dims;  // n, p, q
  int s_lambda = 5;  // nonzero upper-triangular Lambda entries
  ThetaMethod theta_method = ThetaMethod::IndependentUniform;
  int s_theta = 10;       // per-row nonzero count (IndependentUniform)
  double row_norm = 0.5;  // sphere norm (SphereRows)
  double zero_row_fraction = 0.7;
  double signal_lo = 0.1;
  double signal_hi = 0.2;
  double toeplitz_offdiag = 0.3;
  std::uint64_t seed = 1;
  bool fix_truth = false;  // keep one (Theta0, Lambda0) across replications

  void validate() const;
};

struct Dataset {
  Matrix x;  // n x q
  Matrix y;  // n x p
  GroundTruth truth;
};

// splitmix64 output stream; replication r uses the (r+1)-th value seeded
// from the master seed, so replications are reproducible independently.
std::uint64_t splitmix64_next(std::uint64_t& state);
std::uint64_t replication_seed(std::uint64_t master_seed, int rep);

// Tridiagonal Toeplitz covariate precision with unit diagonal.
Matrix gen_omega_xx(int q, double offdiag);

// (Theta0, Lambda0, B0) alone; B0 = -Lambda0^{-1} Theta0^T by solve.
GroundTruth gen_truth(const SimConfig& config, std::mt19937_64& rng);

// Sparse symmetric Lambda with uniformly placed signed entries and
// diagonals set to the absolute row sum plus 0.2 (strict dominance).
Matrix gen_lambda0(int p, int s_lambda, double lo, double hi, std::mt19937_64& rng);

// Row-sparse Theta: ceil(zero_row_fraction * q) rows are zero; the rest are
// filled by the configured method.
Matrix gen_theta0(const SimConfig& config, std::mt19937_64& rng);

Dataset gen_dataset(const SimConfig& config, std::mt19937_64& rng);

struct MetricSummary {
  ScoreReport mean;
  ScoreReport stderr_;
  std::vector<ScoreReport> replications;
};

// gen -> fit -> estimate B -> score, once per replication, each with its own
// derived seed. jobs > 1 runs replications concurrently.
MetricSummary run_replications(const SimConfig& config, const Hyperparams& hp,
                               const SolverConfig& solver_config, int reps,
                               int jobs = 1);

// Named experiment configurations; n is filled in by the caller.
// Known names: setup1, setup2, setup3, s1, s2.
SimConfig named_setup(const std::string& name);

}  // namespace gcrf
