#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ptvmc {

using Complex = std::complex<double>;
using StateVector = Eigen::VectorXcd;

// Largest lattice the dense state-vector backend accepts by default.
inline constexpr int kDefaultExactBackendMaxSites = 20;

struct ExactBackendSizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Periodic square lattice of spin-1/2 sites. Site (r, c) has linear index
// r * cols + c.
class LatticeSpec {
 public:
  LatticeSpec(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1)
      throw std::invalid_argument("LatticeSpec: rows and cols must be positive");
    build_bonds();
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int n_sites() const { return rows_ * cols_; }
  int site_index(int r, int c) const { return r * cols_ + c; }

  // Distinct unordered nearest-neighbor pairs. On proper tori (rows, cols > 2)
  // there are exactly 2 * n_sites of them; on degenerate tori the doubled
  // bonds are stored once and self-pairs are dropped.
  const std::vector<std::pair<int, int>>& bonds() const { return bonds_; }

 private:
  void build_bonds() {
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) {
        int i = site_index(r, c);
        int right = site_index(r, (c + 1) % cols_);
        int down = site_index((r + 1) % rows_, c);
        for (int j : {right, down}) {
          if (j == i) continue;
          auto p = std::minmax(i, j);
          std::pair<int, int> bond{p.first, p.second};
          bool seen = false;
          for (const auto& b : bonds_)
            if (b == bond) { seen = true; break; }
          if (!seen) bonds_.push_back(bond);
        }
      }
    }
  }

  int rows_, cols_;
  std::vector<std::pair<int, int>> bonds_;
};

// A computational-basis spin string backed by its basis index.
// Bit convention: spin +1 <-> bit 0, spin -1 <-> bit 1; site 0 is the least
// significant bit. All modules share this encoding.
class SpinConfiguration {
 public:
  SpinConfiguration() : n_sites_(0), index_(0) {}
  SpinConfiguration(int n_sites, std::uint64_t index)
      : n_sites_(n_sites), index_(index) {}

  static SpinConfiguration from_values(const std::vector<int>& values) {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] == -1)
        idx |= std::uint64_t{1} << i;
      else if (values[i] != 1)
        throw std::invalid_argument("SpinConfiguration: spin values must be +1 or -1");
    }
    return SpinConfiguration(static_cast<int>(values.size()), idx);
  }

  int n_sites() const { return n_sites_; }
  std::uint64_t index() const { return index_; }

  int spin(int site) const { return (index_ >> site) & 1u ? -1 : +1; }

  std::vector<int> values() const {
    std::vector<int> v(n_sites_);
    for (int i = 0; i < n_sites_; ++i) v[i] = spin(i);
    return v;
  }

  SpinConfiguration flipped(int site) const {
    return SpinConfiguration(n_sites_, index_ ^ (std::uint64_t{1} << site));
  }

  bool operator==(const SpinConfiguration& o) const {
    return n_sites_ == o.n_sites_ && index_ == o.index_;
  }

 private:
  int n_sites_;
  std::uint64_t index_;
};

inline std::uint64_t config_index(const SpinConfiguration& c) { return c.index(); }

inline SpinConfiguration index_config(int n_sites, std::uint64_t index) {
  return SpinConfiguration(n_sites, index);
}

inline std::uint64_t hilbert_dim(const LatticeSpec& lattice) {
  return std::uint64_t{1} << lattice.n_sites();
}

inline void check_exact_backend_size(int n_sites,
                                     int max_sites = kDefaultExactBackendMaxSites) {
  if (n_sites > max_sites)
    throw ExactBackendSizeError(
        "exact backend size limit exceeded: " + std::to_string(n_sites) +
        " sites > cap of " + std::to_string(max_sites));
}

std::vector<SpinConfiguration> enumerate_configurations(
    const LatticeSpec& lattice, int max_sites = kDefaultExactBackendMaxSites);

// Born probabilities |psi(x)|^2 / <psi|psi>. The input need not be normalized.
Eigen::VectorXd born_distribution(const StateVector& state);

}  // namespace ptvmc
