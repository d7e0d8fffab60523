#pragma once

#include <tuple>
#include <vector>

#include "ptvmc/lattice.hpp"

namespace ptvmc {

// One K-local term: a dense matrix over the 2^k basis of the listed sites,
// times a scalar coefficient. The local basis index packs site tuple entry t
// into bit t, with the global spin/bit convention.
struct LocalTerm {
  std::vector<int> sites;
  Eigen::MatrixXcd matrix;
  Complex coeff{1.0, 0.0};
};

using ConnectedElement = std::pair<SpinConfiguration, Complex>;

// Sum of K-local terms exposed through per-configuration connected elements:
// connected_elements(x) is the row <x|O|x'> restricted to nonzero entries,
// duplicates merged, diagonal first then ascending index.
class SparseOperator {
 public:
  SparseOperator(int n_sites, std::vector<LocalTerm> terms);

  static SparseOperator identity(int n_sites) {
    SparseOperator op(n_sites, {});
    op.identity_coeff_ = Complex{1.0, 0.0};
    return op;
  }

  int n_sites() const { return n_sites_; }
  const std::vector<LocalTerm>& terms() const { return terms_; }
  bool is_identity() const { return terms_.empty() && identity_coeff_ == 1.0; }

  // Coefficient of the implicit identity component (1 for shift_scale output,
  // 0 for plain operator sums).
  Complex identity_coeff() const { return identity_coeff_; }
  void set_identity_coeff(Complex c) { identity_coeff_ = c; }

  std::vector<ConnectedElement> connected_elements(const SpinConfiguration& x) const;

  Complex diagonal_element(const SpinConfiguration& x) const;

  // y = O psi, evaluated row by row; dense-backend sizes only.
  StateVector apply(const StateVector& psi, int max_sites = kDefaultExactBackendMaxSites) const;

  Eigen::MatrixXcd materialize_dense(int max_sites = 12) const;

  // Upper bound on connected elements per row: identity + sum over terms of
  // (2^k - 1).
  std::size_t max_connected_per_row() const;

 private:
  int n_sites_;
  Complex identity_coeff_{0.0, 0.0};
  std::vector<LocalTerm> terms_;
};

// Multilinear expansion of a diagonal operator: d(x) = constant
// + sum_i field_i x_i + sum_{i<j} coupling_ij x_i x_j + higher-order products.
struct DiagonalOperator {
  int n_sites = 0;
  Complex constant{0.0, 0.0};
  std::vector<std::pair<int, Complex>> fields;
  std::vector<std::tuple<int, int, Complex>> couplings;  // i < j
  std::vector<std::pair<std::vector<int>, Complex>> higher;

  Complex eval(const SpinConfiguration& x) const;
  bool is_zero() const {
    return constant == 0.0 && fields.empty() && couplings.empty() && higher.empty();
  }
  bool has_higher_order() const { return !higher.empty(); }
};

struct OperatorSplit {
  SparseOperator x_part;  // zero diagonal
  DiagonalOperator z_part;
};

// H = -J sum_<ij> sz_i sz_j - h sum_i sx_i with periodic bonds, each unordered
// pair counted once.
SparseOperator build_tfim(const LatticeSpec& lattice, double J, double h);

// (coeff / 1) * sum_i sx_i; used for the M_x observable with coeff = 1/N.
SparseOperator build_sigma_x_total(const LatticeSpec& lattice, double coeff);

OperatorSplit split_diag_offdiag(const SparseOperator& op);

// Rebuilds a SparseOperator whose connected elements equal x_part plus the
// diagonal map, i.e. the inverse of split_diag_offdiag.
SparseOperator recombine_split(const OperatorSplit& split);

// 1 + a * dt * op. The caller folds in -i when op stands in for -i H.
SparseOperator shift_scale(const SparseOperator& op, Complex a, double dt);

}  // namespace ptvmc
