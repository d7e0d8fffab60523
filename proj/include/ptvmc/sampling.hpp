#pragma once

#include <cstdint>

#include "ptvmc/ansatz.hpp"

namespace ptvmc {

// SplitMix64 step; used to derive independent per-chain streams from one
// master seed so results do not depend on execution order.
std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

enum class Proposal { kSingleFlip, kExchange };

struct SamplerConfig {
  int n_chains = 4;
  int n_samples_per_chain = 256;
  int burn_in = 100;   // sweeps discarded per chain
  int thinning = 1;    // sweeps between kept samples
  Proposal proposal = Proposal::kSingleFlip;
  std::uint64_t seed = 0;

  int total_samples() const { return n_chains * n_samples_per_chain; }
  void validate() const;
};

enum class SampleProvenance { kMcmc, kFullSummation };

struct SampleSet {
  std::vector<SpinConfiguration> configs;
  Eigen::VectorXd weights;  // uniform for MCMC, Born-exact for full summation
  SampleProvenance provenance = SampleProvenance::kMcmc;
  int n_chains = 1;

  bool full_summation() const { return provenance == SampleProvenance::kFullSummation; }
};

// Metropolis chains targeting |psi(x)|^2, merged chain-major. Deterministic
// for a fixed seed regardless of how chains are scheduled.
SampleSet sample(const VariationalState& vstate, const SamplerConfig& cfg);

SampleSet full_summation(const VariationalState& vstate,
                         int max_sites = kDefaultExactBackendMaxSites);

// Mean and standard error of the local estimator
// O_loc(x) = sum_x' <x|O|x'> psi(x') / psi(x) under the sample weights.
// The error comes from batch means over chains (0 for full summation).
std::pair<double, double> estimate_observable(const VariationalState& vstate,
                                              const SparseOperator& op,
                                              const SampleSet& samples);

}  // namespace ptvmc
