#include "ptvmc/exact.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "ptvmc/ansatz.hpp"

namespace ptvmc {

namespace {

StateVector evolve_dense(const StateVector& psi, const SparseOperator& h, double t) {
  const Eigen::MatrixXcd hm = h.materialize_dense(kDefaultExactBackendMaxSites);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hm);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("exact_evolve: eigendecomposition failed");
  const Eigen::VectorXcd coeffs = es.eigenvectors().adjoint() * psi;
  Eigen::VectorXcd phased(coeffs.size());
  for (Eigen::Index k = 0; k < coeffs.size(); ++k)
    phased(k) = coeffs(k) * std::exp(Complex{0.0, -es.eigenvalues()(k) * t});
  return es.eigenvectors() * phased;
}

// One Lanczos step of exp(-i H dt) |v> with Krylov dimension m.
StateVector lanczos_step(const StateVector& v, const SparseOperator& h, double dt,
                         int m, int max_sites) {
  const double beta0 = v.norm();
  if (beta0 == 0.0) return v;
  std::vector<StateVector> basis;
  basis.push_back(v / beta0);
  Eigen::VectorXd alpha(m), beta(m);
  int built = 0;
  for (int j = 0; j < m; ++j) {
    StateVector w = h.apply(basis[j], max_sites);
    alpha(j) = w.dot(basis[j]).real();
    w -= alpha(j) * basis[j];
    if (j > 0) w -= beta(j - 1) * basis[j - 1];
    // Full reorthogonalization keeps the small problem faithful.
    for (int i = 0; i <= j; ++i) w -= basis[i].dot(w) * basis[i];
    built = j + 1;
    beta(j) = w.norm();
    if (beta(j) < 1e-14 * beta0) break;
    if (j + 1 < m) basis.push_back(w / beta(j));
  }
  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(built, built);
  for (int j = 0; j < built; ++j) {
    tri(j, j) = alpha(j);
    if (j + 1 < built) tri(j, j + 1) = tri(j + 1, j) = beta(j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
  Eigen::VectorXcd small = Eigen::VectorXcd::Zero(built);
  for (int k = 0; k < built; ++k) {
    Complex phase = std::exp(Complex{0.0, -es.eigenvalues()(k) * dt});
    small += phase * es.eigenvectors().col(k).cast<Complex>() *
             es.eigenvectors()(0, k);
  }
  StateVector out = StateVector::Zero(v.size());
  for (int j = 0; j < built; ++j) out += small(j) * basis[j];
  return beta0 * out;
}

StateVector evolve_krylov(const StateVector& psi, const SparseOperator& h, double t,
                          int max_sites) {
  const int m = 30;
  int n_steps = std::max(1, static_cast<int>(std::ceil(std::abs(t))));
  StateVector prev;
  for (int round = 0; round < 12; ++round) {
    StateVector cur = psi;
    const double dt = t / n_steps;
    for (int k = 0; k < n_steps; ++k) cur = lanczos_step(cur, h, dt, m, max_sites);
    if (round > 0 && (cur - prev).norm() <= 1e-11 * cur.norm()) return cur;
    prev = cur;
    n_steps *= 2;
  }
  throw std::runtime_error("exact_evolve: Krylov propagator did not converge");
}

}  // namespace

StateVector exact_evolve(const StateVector& psi, const SparseOperator& hamiltonian,
                         double t, int max_sites, int dense_cutoff_sites) {
  check_exact_backend_size(hamiltonian.n_sites(), max_sites);
  if (t == 0.0) return psi;
  if (hamiltonian.n_sites() <= dense_cutoff_sites)
    return evolve_dense(psi, hamiltonian, t);
  return evolve_krylov(psi, hamiltonian, t, max_sites);
}

namespace {

// y = (1 + c X) psi with X applied matrix-free.
StateVector shifted_apply(const SparseOperator& x_op, Complex c, const StateVector& psi,
                          int max_sites) {
  return psi + c * x_op.apply(psi, max_sites);
}

// Solves (1 + c X) out = rhs by BiCGSTAB, falling back to dense LU for small
// systems when the iteration stagnates.
StateVector solve_shifted(const SparseOperator& x_op, Complex c, const StateVector& rhs,
                          int max_sites, const std::string& factor_label) {
  const double tol = 1e-12;
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) return rhs;

  StateVector x = rhs;  // well-conditioned for small c: start from rhs
  StateVector r = rhs - shifted_apply(x_op, c, x, max_sites);
  StateVector r0 = r;
  Complex rho{1.0, 0.0}, alpha{1.0, 0.0}, omega{1.0, 0.0};
  StateVector v = StateVector::Zero(rhs.size());
  StateVector p = StateVector::Zero(rhs.size());
  const long max_iters = 10L * rhs.size();
  bool converged = r.norm() <= tol * rhs_norm;
  for (long it = 0; it < max_iters && !converged; ++it) {
    Complex rho_new = r0.dot(r);
    if (std::abs(rho_new) < 1e-300) break;  // stagnation
    Complex beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    p = r + beta * (p - omega * v);
    v = shifted_apply(x_op, c, p, max_sites);
    Complex denom = r0.dot(v);
    if (std::abs(denom) < 1e-300) break;
    alpha = rho / denom;
    StateVector s = r - alpha * v;
    if (s.norm() <= tol * rhs_norm) {
      x += alpha * p;
      converged = true;
      break;
    }
    StateVector t_vec = shifted_apply(x_op, c, s, max_sites);
    Complex tt = t_vec.dot(t_vec);
    if (std::abs(tt) < 1e-300) break;
    omega = t_vec.dot(s) / tt;
    x += alpha * p + omega * s;
    r = s - omega * t_vec;
    converged = r.norm() <= tol * rhs_norm;
    if (std::abs(omega) < 1e-300) break;
  }
  if (converged) return x;

  if (x_op.n_sites() <= 12) {
    Eigen::MatrixXcd m = x_op.materialize_dense(12);
    m *= c;
    m.diagonal().array() += Complex{1.0, 0.0};
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
    StateVector sol = lu.solve(rhs);
    if ((m * sol - rhs).norm() <= 1e-10 * rhs_norm) return sol;
  }
  throw std::runtime_error("apply_plan_exact: singular solve in factor " + factor_label);
}

}  // namespace

StateVector apply_plan_exact(const StateVector& psi, const SchemePlan& plan,
                             const OperatorSplit& split, double dt, int max_sites) {
  check_exact_backend_size(split.x_part.n_sites(), max_sites);
  const Complex mi{0.0, -1.0};
  const int n_sites = split.x_part.n_sites();

  // Off-diagonal factors of non-split plans carry the full Hamiltonian.
  std::optional<SparseOperator> recombined;
  if (!plan.split) recombined = recombine_split(split);
  const SparseOperator& op = plan.split ? split.x_part : *recombined;

  StateVector state = psi;
  int factor_idx = 0;
  for (const auto& f : plan.factors) {
    ++factor_idx;
    switch (f.kind) {
      case FactorDescriptor::Kind::kDiagonalExp: {
        for (Eigen::Index k = 0; k < state.size(); ++k) {
          const Complex d =
              split.z_part.eval(SpinConfiguration(n_sites, static_cast<std::uint64_t>(k)));
          state(k) *= std::exp(f.a * mi * d * dt);
        }
        break;
      }
      case FactorDescriptor::Kind::kOffDiagLinear: {
        state = shifted_apply(op, f.a * mi * dt, state, max_sites);
        break;
      }
      case FactorDescriptor::Kind::kOffDiagPade: {
        StateVector rhs = shifted_apply(op, f.a * mi * dt, state, max_sites);
        state = solve_shifted(op, f.b * mi * dt, rhs, max_sites,
                              std::to_string(factor_idx));
        break;
      }
    }
  }
  return state;
}

double fidelity_exact(const StateVector& psi, const StateVector& phi) {
  const double np = psi.squaredNorm();
  const double nf = phi.squaredNorm();
  if (!(np > 0.0) || !(nf > 0.0))
    throw std::invalid_argument("fidelity_exact: zero-norm input");
  const Complex overlap = psi.dot(phi);
  return std::norm(overlap) / (np * nf);
}

StateVector evaluate_ansatz_dense(const VariationalState& vstate, int max_sites) {
  const LatticeSpec& lattice = vstate.spec().lattice;
  check_exact_backend_size(lattice.n_sites(), max_sites);
  const auto dim = std::uint64_t{1} << lattice.n_sites();
  Eigen::VectorXcd logs(static_cast<Eigen::Index>(dim));
  double max_re = -std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 0; k < dim; ++k) {
    logs(static_cast<Eigen::Index>(k)) =
        vstate.log_amplitude(SpinConfiguration(lattice.n_sites(), k));
    max_re = std::max(max_re, logs(static_cast<Eigen::Index>(k)).real());
  }
  StateVector amps(logs.size());
  for (Eigen::Index k = 0; k < logs.size(); ++k)
    amps(k) = std::exp(logs(k) - max_re);
  return amps;
}

}  // namespace ptvmc
