#include "ptvmc/sampling.hpp"

#include <cmath>
#include <random>

namespace ptvmc {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = master;
  std::uint64_t out = splitmix64(s);
  for (std::uint64_t p : path) {
    s ^= p + 0x9E3779B97F4A7C15ull;
    out = splitmix64(s);
  }
  return out;
}

void SamplerConfig::validate() const {
  if (n_chains < 1 || n_samples_per_chain < 1 || burn_in < 0 || thinning < 1)
    throw std::invalid_argument("SamplerConfig: counts must be positive");
}

namespace {

void run_chain(const VariationalState& vstate, const SamplerConfig& cfg, int chain,
               std::vector<SpinConfiguration>& out) {
  const int n = vstate.spec().lattice.n_sites();
  std::mt19937_64 rng(derive_seed(cfg.seed, {0x5A5Au, static_cast<std::uint64_t>(chain)}));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::uniform_int_distribution<int> site_dist(0, n - 1);
  std::uniform_int_distribution<std::uint64_t> index_dist(
      0, (std::uint64_t{1} << n) - 1);

  SpinConfiguration x(n, 0);
  double log2_abs = 0.0;
  bool found = false;
  for (int attempt = 0; attempt < 100; ++attempt) {
    x = SpinConfiguration(n, index_dist(rng));
    log2_abs = 2.0 * vstate.log_amplitude(x).real();
    if (std::isfinite(log2_abs)) { found = true; break; }
  }
  if (!found)
    throw std::runtime_error("sample: could not find a start with nonzero amplitude");

  auto propose = [&](const SpinConfiguration& cur) {
    if (cfg.proposal == Proposal::kSingleFlip) return cur.flipped(site_dist(rng));
    // Exchange: swap the values of two random anti-aligned sites.
    for (int tries = 0; tries < 4 * n; ++tries) {
      const int i = site_dist(rng);
      const int j = site_dist(rng);
      if (i != j && cur.spin(i) != cur.spin(j)) return cur.flipped(i).flipped(j);
    }
    return cur;
  };

  auto sweep = [&]() {
    for (int p = 0; p < n; ++p) {
      const SpinConfiguration prop = propose(x);
      if (prop == x) continue;
      const double prop_log2 = 2.0 * vstate.log_amplitude(prop).real();
      const double log_ratio = prop_log2 - log2_abs;
      if (log_ratio >= 0.0 || uni(rng) < std::exp(log_ratio)) {
        x = prop;
        log2_abs = prop_log2;
      }
    }
  };

  for (int s = 0; s < cfg.burn_in; ++s) sweep();
  for (int kept = 0; kept < cfg.n_samples_per_chain; ++kept) {
    for (int s = 0; s < cfg.thinning; ++s) sweep();
    out[static_cast<std::size_t>(chain) * cfg.n_samples_per_chain + kept] = x;
  }
}

}  // namespace

SampleSet sample(const VariationalState& vstate, const SamplerConfig& cfg) {
  cfg.validate();
  SampleSet set;
  set.provenance = SampleProvenance::kMcmc;
  set.n_chains = cfg.n_chains;
  set.configs.resize(cfg.total_samples());
  for (int chain = 0; chain < cfg.n_chains; ++chain)
    run_chain(vstate, cfg, chain, set.configs);
  set.weights =
      Eigen::VectorXd::Constant(cfg.total_samples(), 1.0 / cfg.total_samples());
  return set;
}

SampleSet full_summation(const VariationalState& vstate, int max_sites) {
  const auto& lattice = vstate.spec().lattice;
  check_exact_backend_size(lattice.n_sites(), max_sites);
  const std::uint64_t dim = hilbert_dim(lattice);

  SampleSet set;
  set.provenance = SampleProvenance::kFullSummation;
  set.n_chains = 1;
  set.configs.reserve(dim);
  Eigen::VectorXd log2_abs(static_cast<Eigen::Index>(dim));
  for (std::uint64_t k = 0; k < dim; ++k) {
    set.configs.emplace_back(lattice.n_sites(), k);
    log2_abs(static_cast<Eigen::Index>(k)) =
        2.0 * vstate.log_amplitude(set.configs.back()).real();
  }
  const double shift = log2_abs.maxCoeff();
  set.weights = (log2_abs.array() - shift).exp();
  set.weights /= set.weights.sum();
  return set;
}

std::pair<double, double> estimate_observable(const VariationalState& vstate,
                                              const SparseOperator& op,
                                              const SampleSet& samples) {
  const auto n_samples = static_cast<Eigen::Index>(samples.configs.size());
  Eigen::VectorXd locals(n_samples);
  for (Eigen::Index i = 0; i < n_samples; ++i) {
    const SpinConfiguration& x = samples.configs[static_cast<std::size_t>(i)];
    const Complex log_x = vstate.log_amplitude(x);
    Complex acc{0.0, 0.0};
    for (const auto& [xp, v] : op.connected_elements(x))
      acc += v * std::exp(vstate.log_amplitude(xp) - log_x);
    locals(i) = acc.real();
  }
  const double mean = samples.weights.dot(locals);

  if (samples.full_summation()) return {mean, 0.0};

  // Batch means: over chains if several, otherwise over 16 blocks.
  const int n_batches = samples.n_chains >= 2
                            ? samples.n_chains
                            : static_cast<int>(std::min<Eigen::Index>(16, n_samples));
  const Eigen::Index per = n_samples / n_batches;
  double var_means = 0.0;
  int used = 0;
  for (int b = 0; b < n_batches; ++b) {
    const Eigen::Index lo = b * per;
    if (per == 0) break;
    const double m = locals.segment(lo, per).mean();
    var_means += (m - mean) * (m - mean);
    ++used;
  }
  double stderr_val = 0.0;
  if (used >= 2) stderr_val = std::sqrt(var_means / (used * (used - 1.0)));
  return {mean, stderr_val};
}

}  // namespace ptvmc
