#include "ptvmc/ansatz.hpp"

#include <istream>
#include <ostream>
#include <random>

#include <nlohmann/json.hpp>

namespace ptvmc {

namespace {

using Json = nlohmann::json;
using CMat = Eigen::MatrixXcd;

int conv_parameter_count(const ConvSpec& conv) {
  if (conv.empty()) return 0;
  const int k2 = conv.kernel * conv.kernel;
  int n = k2 * conv.channels[0];  // first layer, no bias
  for (std::size_t l = 1; l < conv.channels.size(); ++l)
    n += k2 * conv.channels[l - 1] * conv.channels[l] + conv.channels[l];
  return 2 * n;
}

// sigma_1 and its derivative: leading terms of log cos(z) shifted to even
// powers; later layers use the odd-power profile from the same family.
Complex act_first(Complex z) {
  const Complex z2 = z * z;
  return z2 / 2.0 - z2 * z2 / 12.0 + z2 * z2 * z2 / 45.0;
}
Complex act_first_deriv(Complex z) {
  const Complex z2 = z * z;
  return z - z * z2 / 3.0 + (2.0 / 15.0) * z * z2 * z2;
}
Complex act_later(Complex z) {
  const Complex z2 = z * z;
  return z / 2.0 - z * z2 / 3.0 + (2.0 / 15.0) * z * z2 * z2;
}
Complex act_later_deriv(Complex z) {
  const Complex z2 = z * z;
  return 0.5 - z2 + (2.0 / 3.0) * z2 * z2;
}

int pair_slot(int n_sites, int i, int j) {
  // Index of (i, j), i < j, in lexicographic order.
  return i * n_sites - i * (i + 1) / 2 + (j - i - 1);
}

}  // namespace

std::string ansatz_name(AnsatzKind kind) {
  switch (kind) {
    case AnsatzKind::kLogStateVector: return "log_state_vector";
    case AnsatzKind::kJastrowNet: return "jastrow_net";
    case AnsatzKind::kPeriodicConvNet: return "periodic_conv_net";
  }
  return "?";
}

int AnsatzSpec::parameter_count() const {
  const int n = lattice.n_sites();
  switch (kind) {
    case AnsatzKind::kLogStateVector: {
      check_exact_backend_size(n);
      return 2 * static_cast<int>(std::uint64_t{1} << n);
    }
    case AnsatzKind::kJastrowNet:
      return 2 + 2 * n + n * (n - 1) + conv_parameter_count(conv);
    case AnsatzKind::kPeriodicConvNet:
      return conv_parameter_count(conv);
  }
  return 0;
}

VariationalState::VariationalState(AnsatzSpec spec, Eigen::VectorXd theta)
    : spec_(std::move(spec)), theta_(std::move(theta)) {
  if (spec_.kind == AnsatzKind::kPeriodicConvNet && spec_.conv.empty())
    throw std::invalid_argument("VariationalState: conv net needs channels");
  if (theta_.size() != spec_.parameter_count())
    throw std::invalid_argument("VariationalState: parameter count mismatch, expected " +
                                std::to_string(spec_.parameter_count()) + ", got " +
                                std::to_string(theta_.size()));
}

VariationalState VariationalState::zeros(AnsatzSpec spec) {
  const int n = spec.parameter_count();
  return VariationalState(std::move(spec), Eigen::VectorXd::Zero(n));
}

VariationalState VariationalState::random(AnsatzSpec spec, double scale,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd theta(spec.parameter_count());
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = scale * gauss(rng);
  return VariationalState(std::move(spec), std::move(theta));
}

Complex VariationalState::jastrow_value(const SpinConfiguration& x) const {
  const int n = spec_.lattice.n_sites();
  Complex v{theta_(0), theta_(1)};
  for (int i = 0; i < n; ++i)
    v += Complex{theta_(2 + 2 * i), theta_(3 + 2 * i)} * static_cast<double>(x.spin(i));
  const int base = 2 + 2 * n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const int p = base + 2 * pair_slot(n, i, j);
      v += Complex{theta_(p), theta_(p + 1)} * static_cast<double>(x.spin(i) * x.spin(j));
    }
  return v;
}

Complex VariationalState::conv_value(const SpinConfiguration& x, Eigen::VectorXcd* grad,
                                     int param_offset) const {
  const int rows = spec_.lattice.rows();
  const int cols = spec_.lattice.cols();
  const int k = spec_.conv.kernel;
  const auto& channels = spec_.conv.channels;
  const int n_layers = static_cast<int>(channels.size());

  auto wrap = [](int v, int m) { return ((v % m) + m) % m; };
  auto param = [&](int slot) {
    return Complex{theta_(param_offset + 2 * slot), theta_(param_offset + 2 * slot + 1)};
  };

  // Per-layer kernel/bias slot offsets (in complex units).
  std::vector<int> kernel_off(n_layers), bias_off(n_layers, -1);
  int slot = 0;
  for (int l = 0; l < n_layers; ++l) {
    const int cin = (l == 0) ? 1 : channels[l - 1];
    kernel_off[l] = slot;
    slot += k * k * cin * channels[l];
    if (l > 0) {
      bias_off[l] = slot;
      slot += channels[l];
    }
  }

  // Forward pass. activations[l] holds the layer output, one L*L column per
  // channel; pre[l] the pre-activation.
  std::vector<std::vector<CMat>> pre(n_layers), act(n_layers);
  std::vector<CMat> input(1, CMat(rows, cols));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      input[0](r, c) = static_cast<double>(x.spin(spec_.lattice.site_index(r, c)));

  const std::vector<CMat>* prev = &input;
  for (int l = 0; l < n_layers; ++l) {
    const int cin = (l == 0) ? 1 : channels[l - 1];
    pre[l].assign(channels[l], CMat::Zero(rows, cols));
    act[l].assign(channels[l], CMat(rows, cols));
    for (int beta = 0; beta < channels[l]; ++beta) {
      CMat& z = pre[l][beta];
      for (int alpha = 0; alpha < cin; ++alpha) {
        const CMat& in = (*prev)[alpha];
        for (int ki = 0; ki < k; ++ki)
          for (int kj = 0; kj < k; ++kj) {
            const Complex w =
                param(kernel_off[l] + ((beta * cin + alpha) * k + ki) * k + kj);
            for (int m = 0; m < rows; ++m)
              for (int nn = 0; nn < cols; ++nn)
                z(m, nn) += w * in(wrap(m + ki, rows), wrap(nn + kj, cols));
          }
      }
      if (l > 0) z.array() += param(bias_off[l] + beta);
      for (int m = 0; m < rows; ++m)
        for (int nn = 0; nn < cols; ++nn)
          act[l][beta](m, nn) = (l == 0) ? act_first(z(m, nn)) : act_later(z(m, nn));
    }
    prev = &act[l];
  }

  Complex out{0.0, 0.0};
  for (const CMat& a : act[n_layers - 1]) out += a.sum();
  if (!grad) return out;

  // Reverse pass; everything is holomorphic so a single complex adjoint per
  // node suffices.
  std::vector<CMat> d_act(channels[n_layers - 1], CMat::Ones(rows, cols));
  for (int l = n_layers - 1; l >= 0; --l) {
    const int cin = (l == 0) ? 1 : channels[l - 1];
    const std::vector<CMat>& in_act = (l == 0) ? input : act[l - 1];
    std::vector<CMat> d_z(channels[l], CMat(rows, cols));
    for (int beta = 0; beta < channels[l]; ++beta)
      for (int m = 0; m < rows; ++m)
        for (int nn = 0; nn < cols; ++nn)
          d_z[beta](m, nn) = d_act[beta](m, nn) * ((l == 0)
                                 ? act_first_deriv(pre[l][beta](m, nn))
                                 : act_later_deriv(pre[l][beta](m, nn)));

    for (int beta = 0; beta < channels[l]; ++beta) {
      for (int alpha = 0; alpha < cin; ++alpha) {
        const CMat& in = in_act[alpha];
        for (int ki = 0; ki < k; ++ki)
          for (int kj = 0; kj < k; ++kj) {
            Complex g{0.0, 0.0};
            for (int m = 0; m < rows; ++m)
              for (int nn = 0; nn < cols; ++nn)
                g += d_z[beta](m, nn) * in(wrap(m + ki, rows), wrap(nn + kj, cols));
            const int s = kernel_off[l] + ((beta * cin + alpha) * k + ki) * k + kj;
            (*grad)(param_offset + 2 * s) = g;
            (*grad)(param_offset + 2 * s + 1) = Complex{0.0, 1.0} * g;
          }
      }
      if (l > 0) {
        const Complex g = d_z[beta].sum();
        const int s = bias_off[l] + beta;
        (*grad)(param_offset + 2 * s) = g;
        (*grad)(param_offset + 2 * s + 1) = Complex{0.0, 1.0} * g;
      }
    }

    if (l > 0) {
      d_act.assign(cin, CMat::Zero(rows, cols));
      for (int beta = 0; beta < channels[l]; ++beta)
        for (int alpha = 0; alpha < cin; ++alpha)
          for (int ki = 0; ki < k; ++ki)
            for (int kj = 0; kj < k; ++kj) {
              const Complex w =
                  param(kernel_off[l] + ((beta * cin + alpha) * k + ki) * k + kj);
              for (int m = 0; m < rows; ++m)
                for (int nn = 0; nn < cols; ++nn)
                  d_act[alpha](wrap(m + ki, rows), wrap(nn + kj, cols)) +=
                      w * d_z[beta](m, nn);
            }
    }
  }
  return out;
}

Complex VariationalState::log_amplitude(const SpinConfiguration& x) const {
  switch (spec_.kind) {
    case AnsatzKind::kLogStateVector: {
      const auto k = static_cast<Eigen::Index>(x.index());
      return Complex{theta_(2 * k), theta_(2 * k + 1)};
    }
    case AnsatzKind::kJastrowNet: {
      Complex v = jastrow_value(x);
      if (!spec_.conv.empty()) {
        const int n = spec_.lattice.n_sites();
        v += conv_value(x, nullptr, 2 + 2 * n + n * (n - 1));
      }
      return v;
    }
    case AnsatzKind::kPeriodicConvNet:
      return conv_value(x, nullptr, 0);
  }
  return {};
}

Eigen::VectorXcd VariationalState::log_amplitude_gradient(const SpinConfiguration& x) const {
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(theta_.size());
  const Complex iu{0.0, 1.0};
  switch (spec_.kind) {
    case AnsatzKind::kLogStateVector: {
      const auto k = static_cast<Eigen::Index>(x.index());
      g(2 * k) = 1.0;
      g(2 * k + 1) = iu;
      break;
    }
    case AnsatzKind::kJastrowNet: {
      const int n = spec_.lattice.n_sites();
      g(0) = 1.0;
      g(1) = iu;
      for (int i = 0; i < n; ++i) {
        const double s = x.spin(i);
        g(2 + 2 * i) = s;
        g(3 + 2 * i) = iu * s;
      }
      const int base = 2 + 2 * n;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          const double s = x.spin(i) * x.spin(j);
          const int p = base + 2 * pair_slot(n, i, j);
          g(p) = s;
          g(p + 1) = iu * s;
        }
      if (!spec_.conv.empty()) conv_value(x, &g, base + n * (n - 1));
      break;
    }
    case AnsatzKind::kPeriodicConvNet:
      conv_value(x, &g, 0);
      break;
  }
  return g;
}

JacobianBatch jacobian(const VariationalState& vstate,
                       const std::vector<SpinConfiguration>& xs,
                       const Eigen::VectorXd& weights) {
  if (static_cast<std::size_t>(weights.size()) != xs.size())
    throw std::invalid_argument("jacobian: weights/configs size mismatch");
  if (std::abs(weights.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("jacobian: weights must sum to 1");

  JacobianBatch batch;
  batch.weights = weights;
  batch.raw.resize(static_cast<Eigen::Index>(xs.size()), vstate.parameter_count());
  for (std::size_t i = 0; i < xs.size(); ++i)
    batch.raw.row(static_cast<Eigen::Index>(i)) = vstate.log_amplitude_gradient(xs[i]);

  const Eigen::RowVectorXcd mean = weights.cast<Complex>().transpose() * batch.raw;
  batch.centered = batch.raw.rowwise() - mean;
  return batch;
}

VariationalState apply_diagonal_exact(const VariationalState& vstate, Complex alpha,
                                      const DiagonalOperator& z_part, double dt) {
  const Complex shift = alpha * Complex{0.0, -1.0} * dt;
  Eigen::VectorXd theta = vstate.theta();
  const int n = vstate.spec().lattice.n_sites();

  switch (vstate.spec().kind) {
    case AnsatzKind::kLogStateVector: {
      const auto dim = std::uint64_t{1} << n;
      for (std::uint64_t kk = 0; kk < dim; ++kk) {
        const Complex d = shift * z_part.eval(SpinConfiguration(n, kk));
        const auto k = static_cast<Eigen::Index>(kk);
        theta(2 * k) += d.real();
        theta(2 * k + 1) += d.imag();
      }
      break;
    }
    case AnsatzKind::kJastrowNet: {
      if (z_part.has_higher_order())
        throw std::invalid_argument(
            "apply_diagonal_exact: diagonal has terms beyond two-body; the "
            "Jastrow layer cannot absorb them");
      auto add = [&](int slot, Complex c) {
        theta(slot) += c.real();
        theta(slot + 1) += c.imag();
      };
      add(0, shift * z_part.constant);
      for (const auto& [i, c] : z_part.fields) add(2 + 2 * i, shift * c);
      const int base = 2 + 2 * n;
      for (const auto& [i, j, c] : z_part.couplings)
        add(base + 2 * pair_slot(n, i, j), shift * c);
      break;
    }
    case AnsatzKind::kPeriodicConvNet:
      throw std::invalid_argument(
          "apply_diagonal_exact: ansatz has no Jastrow layer; wrap the conv "
          "net in a JastrowNet");
  }
  return vstate.with_theta(std::move(theta));
}

void save_checkpoint(const VariationalState& vstate, std::ostream& out) {
  Json j;
  j["ansatz"] = ansatz_name(vstate.spec().kind);
  j["rows"] = vstate.spec().lattice.rows();
  j["cols"] = vstate.spec().lattice.cols();
  j["channels"] = vstate.spec().conv.channels;
  j["kernel"] = vstate.spec().conv.kernel;
  std::vector<double> theta(vstate.theta().data(),
                            vstate.theta().data() + vstate.theta().size());
  j["theta"] = theta;
  out << j.dump();
}

VariationalState load_checkpoint(std::istream& in) {
  Json j = Json::parse(in);
  const std::string name = j.at("ansatz");
  AnsatzKind kind;
  if (name == "log_state_vector")
    kind = AnsatzKind::kLogStateVector;
  else if (name == "jastrow_net")
    kind = AnsatzKind::kJastrowNet;
  else if (name == "periodic_conv_net")
    kind = AnsatzKind::kPeriodicConvNet;
  else
    throw std::invalid_argument("load_checkpoint: unknown ansatz " + name);

  ConvSpec conv;
  conv.channels = j.at("channels").get<std::vector<int>>();
  conv.kernel = j.at("kernel");
  AnsatzSpec spec{kind, LatticeSpec(j.at("rows"), j.at("cols")), conv};
  const auto theta_vec = j.at("theta").get<std::vector<double>>();
  Eigen::VectorXd theta =
      Eigen::Map<const Eigen::VectorXd>(theta_vec.data(), theta_vec.size());
  return VariationalState(std::move(spec), std::move(theta));
}

}  // namespace ptvmc
