#include "ptvmc/operators.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace ptvmc {

namespace {

// Local basis index of x restricted to the term's site tuple.
std::uint64_t local_index(const SpinConfiguration& x, const std::vector<int>& sites) {
  std::uint64_t idx = 0;
  for (std::size_t t = 0; t < sites.size(); ++t)
    if (x.spin(sites[t]) == -1) idx |= std::uint64_t{1} << t;
  return idx;
}

// Global configuration with the term's sites overwritten by the local index.
std::uint64_t patch_index(std::uint64_t base, const std::vector<int>& sites,
                          std::uint64_t local) {
  for (std::size_t t = 0; t < sites.size(); ++t) {
    std::uint64_t bit = (local >> t) & 1u;
    base = (base & ~(std::uint64_t{1} << sites[t])) | (bit << sites[t]);
  }
  return base;
}

}  // namespace

SparseOperator::SparseOperator(int n_sites, std::vector<LocalTerm> terms)
    : n_sites_(n_sites), terms_(std::move(terms)) {
  for (const auto& term : terms_) {
    const auto dim = std::uint64_t{1} << term.sites.size();
    if (term.matrix.rows() != static_cast<Eigen::Index>(dim) ||
        term.matrix.cols() != static_cast<Eigen::Index>(dim))
      throw std::invalid_argument("SparseOperator: local matrix dimension mismatch");
    for (int s : term.sites)
      if (s < 0 || s >= n_sites_)
        throw std::invalid_argument("SparseOperator: site index out of range");
  }
}

std::vector<ConnectedElement> SparseOperator::connected_elements(
    const SpinConfiguration& x) const {
  std::map<std::uint64_t, Complex> row;
  if (identity_coeff_ != 0.0) row[x.index()] += identity_coeff_;
  for (const auto& term : terms_) {
    const std::uint64_t col = local_index(x, term.sites);
    const auto dim = std::uint64_t{1} << term.sites.size();
    for (std::uint64_t r = 0; r < dim; ++r) {
      const Complex v = term.coeff * term.matrix(static_cast<Eigen::Index>(col),
                                                 static_cast<Eigen::Index>(r));
      // <x|T|x'>: row index is x's local state, column enumerates x'.
      if (v == 0.0) continue;
      row[patch_index(x.index(), term.sites, r)] += v;
    }
  }
  std::vector<ConnectedElement> out;
  out.reserve(row.size());
  // Diagonal entry first, then ascending index.
  auto self = row.find(x.index());
  if (self != row.end() && self->second != 0.0)
    out.emplace_back(x, self->second);
  for (const auto& [idx, v] : row) {
    if (idx == x.index() || v == 0.0) continue;
    out.emplace_back(SpinConfiguration(n_sites_, idx), v);
  }
  return out;
}

Complex SparseOperator::diagonal_element(const SpinConfiguration& x) const {
  Complex d = identity_coeff_;
  for (const auto& term : terms_) {
    const auto col = static_cast<Eigen::Index>(local_index(x, term.sites));
    d += term.coeff * term.matrix(col, col);
  }
  return d;
}

StateVector SparseOperator::apply(const StateVector& psi, int max_sites) const {
  check_exact_backend_size(n_sites_, max_sites);
  const auto dim = std::uint64_t{1} << n_sites_;
  if (psi.size() != static_cast<Eigen::Index>(dim))
    throw std::invalid_argument("SparseOperator::apply: state dimension mismatch");
  StateVector out = StateVector::Zero(psi.size());
  for (std::uint64_t k = 0; k < dim; ++k) {
    Complex acc{0.0, 0.0};
    for (const auto& [xp, v] : connected_elements(SpinConfiguration(n_sites_, k)))
      acc += v * psi(static_cast<Eigen::Index>(xp.index()));
    out(static_cast<Eigen::Index>(k)) = acc;
  }
  return out;
}

Eigen::MatrixXcd SparseOperator::materialize_dense(int max_sites) const {
  check_exact_backend_size(n_sites_, max_sites);
  const auto dim = std::uint64_t{1} << n_sites_;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::uint64_t k = 0; k < dim; ++k)
    for (const auto& [xp, v] : connected_elements(SpinConfiguration(n_sites_, k)))
      m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(xp.index())) = v;
  return m;
}

std::size_t SparseOperator::max_connected_per_row() const {
  std::size_t n = 1;
  for (const auto& term : terms_)
    n += (std::size_t{1} << term.sites.size()) - 1;
  return n;
}

Complex DiagonalOperator::eval(const SpinConfiguration& x) const {
  Complex d = constant;
  for (const auto& [i, c] : fields) d += c * static_cast<double>(x.spin(i));
  for (const auto& [i, j, c] : couplings)
    d += c * static_cast<double>(x.spin(i) * x.spin(j));
  for (const auto& [sites, c] : higher) {
    int prod = 1;
    for (int s : sites) prod *= x.spin(s);
    d += c * static_cast<double>(prod);
  }
  return d;
}

SparseOperator build_tfim(const LatticeSpec& lattice, double J, double h) {
  std::vector<LocalTerm> terms;
  if (J != 0.0) {
    Eigen::MatrixXcd zz = Eigen::MatrixXcd::Zero(4, 4);
    // Local basis: bit 0 = first site of the pair, bit 1 = second.
    zz(0, 0) = 1.0;   // ++
    zz(1, 1) = -1.0;  // -+
    zz(2, 2) = -1.0;  // +-
    zz(3, 3) = 1.0;   // --
    for (const auto& [i, j] : lattice.bonds())
      terms.push_back({{i, j}, zz, Complex{-J, 0.0}});
  }
  if (h != 0.0) {
    Eigen::MatrixXcd sx = Eigen::MatrixXcd::Zero(2, 2);
    sx(0, 1) = 1.0;
    sx(1, 0) = 1.0;
    for (int i = 0; i < lattice.n_sites(); ++i)
      terms.push_back({{i}, sx, Complex{-h, 0.0}});
  }
  return SparseOperator(lattice.n_sites(), std::move(terms));
}

SparseOperator build_sigma_x_total(const LatticeSpec& lattice, double coeff) {
  Eigen::MatrixXcd sx = Eigen::MatrixXcd::Zero(2, 2);
  sx(0, 1) = 1.0;
  sx(1, 0) = 1.0;
  std::vector<LocalTerm> terms;
  for (int i = 0; i < lattice.n_sites(); ++i)
    terms.push_back({{i}, sx, Complex{coeff, 0.0}});
  return SparseOperator(lattice.n_sites(), std::move(terms));
}

OperatorSplit split_diag_offdiag(const SparseOperator& op) {
  DiagonalOperator z;
  z.n_sites = op.n_sites();
  z.constant = op.identity_coeff();

  std::map<std::vector<int>, Complex> multilinear;

  std::vector<LocalTerm> offdiag_terms;
  for (const auto& term : op.terms()) {
    const int k = static_cast<int>(term.sites.size());
    const auto dim = std::uint64_t{1} << k;

    // Walsh transform of the local diagonal: coefficient of prod_{t in T} z_t
    // is 2^-k sum_s d(s) prod_{t in T} s_t.
    double scale = 0.0;
    for (std::uint64_t s = 0; s < dim; ++s)
      scale = std::max(scale, std::abs(term.matrix(static_cast<Eigen::Index>(s),
                                                   static_cast<Eigen::Index>(s))));
    for (std::uint64_t subset = 0; subset < dim; ++subset) {
      Complex c{0.0, 0.0};
      for (std::uint64_t s = 0; s < dim; ++s) {
        int sign = 1;
        for (int t = 0; t < k; ++t)
          if ((subset >> t) & 1u) sign *= ((s >> t) & 1u) ? -1 : 1;
        c += static_cast<double>(sign) *
             term.matrix(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
      }
      c *= term.coeff / static_cast<double>(dim);
      if (std::abs(c) <= 1e-14 * std::max(1.0, scale * std::abs(term.coeff))) continue;
      std::vector<int> sites;
      for (int t = 0; t < k; ++t)
        if ((subset >> t) & 1u) sites.push_back(term.sites[t]);
      std::sort(sites.begin(), sites.end());
      multilinear[sites] += c;
    }

    Eigen::MatrixXcd off = term.matrix;
    off.diagonal().setZero();
    if (!off.isZero(0.0)) offdiag_terms.push_back({term.sites, off, term.coeff});
  }

  for (const auto& [sites, c] : multilinear) {
    if (c == 0.0) continue;
    if (sites.empty())
      z.constant += c;
    else if (sites.size() == 1)
      z.fields.emplace_back(sites[0], c);
    else if (sites.size() == 2)
      z.couplings.emplace_back(sites[0], sites[1], c);
    else
      z.higher.emplace_back(sites, c);
  }

  SparseOperator x_part(op.n_sites(), std::move(offdiag_terms));
  return OperatorSplit{std::move(x_part), std::move(z)};
}

SparseOperator recombine_split(const OperatorSplit& split) {
  std::vector<LocalTerm> terms = split.x_part.terms();
  const DiagonalOperator& z = split.z_part;

  auto diag_term = [](const std::vector<int>& sites, Complex coeff) {
    const auto dim = std::uint64_t{1} << sites.size();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::uint64_t s = 0; s < dim; ++s) {
      int prod = 1;
      for (std::size_t t = 0; t < sites.size(); ++t)
        if ((s >> t) & 1u) prod = -prod;
      m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = prod;
    }
    return LocalTerm{sites, m, coeff};
  };

  for (const auto& [i, c] : z.fields) terms.push_back(diag_term({i}, c));
  for (const auto& [i, j, c] : z.couplings) terms.push_back(diag_term({i, j}, c));
  for (const auto& [sites, c] : z.higher) terms.push_back(diag_term(sites, c));

  SparseOperator out(split.x_part.n_sites(), std::move(terms));
  out.set_identity_coeff(split.x_part.identity_coeff() + z.constant);
  return out;
}

SparseOperator shift_scale(const SparseOperator& op, Complex a, double dt) {
  std::vector<LocalTerm> terms = op.terms();
  const Complex f = a * dt;
  for (auto& term : terms) term.coeff *= f;
  SparseOperator out(op.n_sites(), std::move(terms));
  out.set_identity_coeff(Complex{1.0, 0.0} + f * op.identity_coeff());
  return out;
}

}  // namespace ptvmc
