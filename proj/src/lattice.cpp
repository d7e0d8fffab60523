#include "ptvmc/lattice.hpp"

namespace ptvmc {

std::vector<SpinConfiguration> enumerate_configurations(const LatticeSpec& lattice,
                                                        int max_sites) {
  check_exact_backend_size(lattice.n_sites(), max_sites);
  const std::uint64_t dim = hilbert_dim(lattice);
  std::vector<SpinConfiguration> configs;
  configs.reserve(dim);
  for (std::uint64_t k = 0; k < dim; ++k)
    configs.emplace_back(lattice.n_sites(), k);
  return configs;
}

Eigen::VectorXd born_distribution(const StateVector& state) {
  const double norm2 = state.squaredNorm();
  if (!(norm2 > 0.0) || !std::isfinite(norm2))
    throw std::invalid_argument("born_distribution: state has zero or non-finite norm");
  return state.cwiseAbs2() / norm2;
}

}  // namespace ptvmc
