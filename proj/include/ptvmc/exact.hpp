#pragma once

#include "ptvmc/schemes.hpp"

namespace ptvmc {

class VariationalState;

// exp(-i H t) |psi>. Dense eigendecomposition up to dense_cutoff_sites, a
// step-doubled Lanczos propagator above (relative L2 error below 1e-10).
StateVector exact_evolve(const StateVector& psi, const SparseOperator& hamiltonian,
                         double t, int max_sites = kDefaultExactBackendMaxSites,
                         int dense_cutoff_sites = 12);

// Applies the plan factors in order on the dense backend. Split plans act
// with x_part/z_part separately; non-split plans recombine them so that
// off-diagonal factors carry the full Hamiltonian.
StateVector apply_plan_exact(const StateVector& psi, const SchemePlan& plan,
                             const OperatorSplit& split, double dt,
                             int max_sites = kDefaultExactBackendMaxSites);

// |<psi|phi>|^2 / (<psi|psi><phi|phi>), invariant under scale and phase.
double fidelity_exact(const StateVector& psi, const StateVector& phi);

// Dense amplitudes exp(log_amplitude(x)) for every configuration, shifted by
// the maximum real log-amplitude; the result is the state up to a global
// scale, which every downstream use (Born weights, fidelity) ignores.
StateVector evaluate_ansatz_dense(const VariationalState& vstate,
                                  int max_sites = kDefaultExactBackendMaxSites);

}  // namespace ptvmc
