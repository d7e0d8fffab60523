#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ptvmc/operators.hpp"

namespace ptvmc {

enum class AnsatzKind { kLogStateVector, kJastrowNet, kPeriodicConvNet };

std::string ansatz_name(AnsatzKind kind);

// Channel tuple and kernel size of the periodic convolutional network,
// Theta = (c_1, ..., c_L; k). Circular padding, stride and dilation one, the
// first layer carries no bias, and the output is the unweighted sum of the
// last layer over channels and sites.
struct ConvSpec {
  std::vector<int> channels;
  int kernel = 3;
  bool empty() const { return channels.empty(); }
};

struct AnsatzSpec {
  AnsatzKind kind;
  LatticeSpec lattice;
  ConvSpec conv;  // the net for kPeriodicConvNet; optional backbone for kJastrowNet

  int parameter_count() const;
};

// Complex parameters are stored as adjacent (re, im) real slots. Layouts:
//
//   kLogStateVector   theta[2k], theta[2k+1] = Re/Im log psi at basis index k
//   kJastrowNet       [c0][v_0..v_{N-1}][phi_{ij}, i<j lexicographic][backbone]
//   kPeriodicConvNet  per layer: kernels (out, in, ki, kj), then biases
//                     (layers > 1 only)
//
// All maps are holomorphic in the complex parameters, so the gradient with
// respect to (re, im) pairs is (g, i g) with g the complex derivative.
class VariationalState {
 public:
  VariationalState(AnsatzSpec spec, Eigen::VectorXd theta);

  static VariationalState zeros(AnsatzSpec spec);
  static VariationalState random(AnsatzSpec spec, double scale, std::uint64_t seed);

  const AnsatzSpec& spec() const { return spec_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  int parameter_count() const { return static_cast<int>(theta_.size()); }

  VariationalState with_theta(Eigen::VectorXd theta) const {
    return VariationalState(spec_, std::move(theta));
  }

  Complex log_amplitude(const SpinConfiguration& x) const;

  // d log psi / d theta, a row of length N_p.
  Eigen::VectorXcd log_amplitude_gradient(const SpinConfiguration& x) const;

 private:
  Complex jastrow_value(const SpinConfiguration& x) const;
  Complex conv_value(const SpinConfiguration& x, Eigen::VectorXcd* grad,
                     int param_offset) const;

  AnsatzSpec spec_;
  Eigen::VectorXd theta_;
};

struct JacobianBatch {
  Eigen::MatrixXcd raw;       // N_s x N_p, row i = grad log psi(x_i)
  Eigen::MatrixXcd centered;  // rows minus the weighted mean row
  Eigen::VectorXd weights;    // the weights used for centering (sum 1)
};

JacobianBatch jacobian(const VariationalState& vstate,
                       const std::vector<SpinConfiguration>& xs,
                       const Eigen::VectorXd& weights);

// log psi'(x) = log psi(x) + alpha * (-i) * dt * d(x) realized purely as
// parameter shifts on the Jastrow layer (or directly on log-state-vector
// entries). Requires the diagonal to decompose into at most two-body terms
// for Jastrow ansatze.
VariationalState apply_diagonal_exact(const VariationalState& vstate, Complex alpha,
                                      const DiagonalOperator& z_part, double dt);

void save_checkpoint(const VariationalState& vstate, std::ostream& out);
VariationalState load_checkpoint(std::istream& in);

}  // namespace ptvmc
