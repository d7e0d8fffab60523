#pragma once

#include <memory>
#include <optional>
#include <string>

#include "ptvmc/ansatz.hpp"
#include "ptvmc/sampling.hpp"

namespace ptvmc {

// log of (T psi)(x) = log sum_x' <x|T|x'> psi(x'), via a stable complex
// log-sum-exp over connected elements. T == nullptr means the identity.
Complex log_transformed_amplitude(const VariationalState& state,
                                  const SparseOperator* transform,
                                  const SpinConfiguration& x);

// One side of a state-matching problem: samples drawn from the BARE state,
// plus the linear transform applied to it inside the fidelity (Eq. 10 style).
struct SampledSide {
  VariationalState state;
  std::shared_ptr<const SparseOperator> transform;  // null = identity
  SampleSet samples;
};

struct StatePair {
  SampledSide psi;  // variational side (V psi)
  SampledSide phi;  // target side (U phi)

  bool joint() const {
    return psi.samples.configs.size() == phi.samples.configs.size() &&
           !psi.samples.full_summation() && !phi.samples.full_summation();
  }
  bool full_summation() const {
    return psi.samples.full_summation() && phi.samples.full_summation();
  }
};

StatePair make_state_pair(VariationalState psi,
                          std::shared_ptr<const SparseOperator> v_op,
                          SampleSet psi_samples, VariationalState phi,
                          std::shared_ptr<const SparseOperator> u_op,
                          SampleSet phi_samples);

// Per-sample evaluation data shared by every estimator. Weights are
// self-normalized importance weights from the bare sampling distribution to
// the (optionally transformed, optionally re-parametrized) evaluation states;
// they reduce to the plain sample weights when nothing is transformed.
struct PairEvaluation {
  // psi-side samples x_i
  Eigen::VectorXd w_x;          // normalized weights
  Eigen::VectorXcd log_psi_x;   // log (V psi)(x_i)
  Eigen::VectorXcd log_phi_x;   // log (U phi)(x_i)
  double norm_x = 1.0;          // N_{psi~psi} estimate (1 when untransformed)
  // phi-side samples y_j
  Eigen::VectorXd w_y;
  Eigen::VectorXcd log_psi_y;
  Eigen::VectorXcd log_phi_y;
  double norm_y = 1.0;
  bool full = false;  // both sides full summation -> expectations are exact
};

// use_transforms = false evaluates the bare pair even if transforms are set.
// psi_override substitutes new parameters on the psi side while keeping the
// sampling distribution (importance-sampled loss evaluation). Bare amplitudes
// are memoized per state across both sample sets and connected elements.
PairEvaluation evaluate_pair(const StatePair& pair, bool use_transforms,
                             const VariationalState* psi_override = nullptr);

struct EstimatorResult {
  double value = 0.0;
  double variance = 0.0;          // variance of the real local estimator
  Eigen::VectorXcd locals;        // A(z_i) or H_loc(x_i); empty on exact paths
  double norm_ratio = 1.0;        // product of the Appendix-B N factors
};

enum class FidelityEstimatorKind { kSingleMc, kDoubleMc };

// E_z[A(z)] over joint pairs, or the exact separable expectation in full
// summation; with c the control-variate local Re A + c (|A|^2 - 1) is used.
EstimatorResult fidelity_single_mc(const StatePair& pair,
                                   std::optional<double> c = std::nullopt);

// E_x[H_loc(x)] with the inner phi-side mean computed once; with c the
// double-MC control variate is added.
EstimatorResult fidelity_double_mc(const StatePair& pair,
                                   std::optional<double> c = std::nullopt);

// Same estimators for F(V psi, U phi), importance-sampled from the bare
// states with the norm correction estimated on the same samples.
EstimatorResult fidelity_reweighted(const StatePair& pair, FidelityEstimatorKind kind,
                                    std::optional<double> c = std::nullopt);

// Core entry point on a precomputed evaluation; the functions above wrap it.
EstimatorResult fidelity_with(const StatePair& pair, const PairEvaluation& pe,
                              FidelityEstimatorKind kind,
                              std::optional<double> c = std::nullopt);

// Jacobian of the transformed psi side, rows grad log (V psi)(x_i), centered
// under the pair's normalized x-side weights.
JacobianBatch psi_side_jacobian(const StatePair& pair);
JacobianBatch psi_side_jacobian(const StatePair& pair, const PairEvaluation& pe);
// Same rows evaluated on the phi-side samples (for the non-Hermitian
// estimator, which needs them there too).
JacobianBatch psi_jacobian_on_phi_samples(const StatePair& pair);
JacobianBatch psi_jacobian_on_phi_samples(const StatePair& pair,
                                          const PairEvaluation& pe);

struct GradientResult {
  Eigen::VectorXd grad;     // gradient of the FIDELITY w.r.t. real parameters
  bool has_factorized = false;
  Eigen::MatrixXd x_matrix;   // N_p x 2N_s with grad = x_matrix * epsilon
  Eigen::VectorXd epsilon;    // 2N_s
  std::string estimator_id;
};

// grad F = E_x[2 Re(dJ(x) H_loc(x)^*)], factorized as X eps.
GradientResult grad_hermitian(const StatePair& pair, const JacobianBatch& jac);
GradientResult grad_hermitian(const StatePair& pair, const PairEvaluation& pe,
                              const JacobianBatch& jac);

// grad F = E_z[2 Re(dJ(x) A(z)^*)] over joint pairs, factorized as X eps.
GradientResult grad_mixed(const StatePair& pair, const JacobianBatch& jac);
GradientResult grad_mixed(const StatePair& pair, const PairEvaluation& pe,
                          const JacobianBatch& jac);

// Derivative of the CV single-MC estimator; evaluates the psi Jacobian on
// both sample sets and admits no X eps factorization.
GradientResult grad_nonhermitian(const StatePair& pair, const JacobianBatch& jac_psi,
                                 const JacobianBatch& jac_on_phi, double c);
GradientResult grad_nonhermitian(const StatePair& pair, const PairEvaluation& pe,
                                 const JacobianBatch& jac_psi,
                                 const JacobianBatch& jac_on_phi, double c);

}  // namespace ptvmc
