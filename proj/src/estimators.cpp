#include "ptvmc/estimators.hpp"

#include <cmath>
#include <unordered_map>

namespace ptvmc {

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void check_locals_finite(const Eigen::VectorXcd& vals,
                         const std::vector<SpinConfiguration>& configs,
                         const char* what) {
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (!finite(vals(i)))
      throw std::runtime_error(std::string(what) +
                               ": non-finite amplitude ratio at configuration " +
                               std::to_string(configs[static_cast<std::size_t>(i)].index()) +
                               " (zero-amplitude denominator?)");
}

Eigen::VectorXcd ratio(const Eigen::VectorXcd& log_num, const Eigen::VectorXcd& log_den) {
  Eigen::VectorXcd r(log_num.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = std::exp(log_num(i) - log_den(i));
  return r;
}

double weighted_variance(const Eigen::VectorXd& w, const Eigen::VectorXd& vals,
                         double mean) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    v += w(i) * (vals(i) - mean) * (vals(i) - mean);
  return v;
}

// Memoized bare/transformed log amplitudes of one state; samples revisit the
// same configurations constantly, connected elements even more so.
class AmplitudeTable {
 public:
  explicit AmplitudeTable(const VariationalState& state) : state_(state) {}

  Complex bare(const SpinConfiguration& x) {
    auto it = cache_.find(x.index());
    if (it == cache_.end())
      it = cache_.emplace(x.index(), state_.log_amplitude(x)).first;
    return it->second;
  }

  Complex transformed(const SparseOperator* t, const SpinConfiguration& x) {
    if (!t || t->is_identity()) return bare(x);
    double max_re = -std::numeric_limits<double>::infinity();
    scratch_.clear();
    for (const auto& [xp, v] : t->connected_elements(x)) {
      const Complex l = std::log(v) + bare(xp);
      scratch_.push_back(l);
      max_re = std::max(max_re, l.real());
    }
    if (scratch_.empty() || !std::isfinite(max_re))
      return {-std::numeric_limits<double>::infinity(), 0.0};
    Complex acc{0.0, 0.0};
    for (Complex l : scratch_) acc += std::exp(l - max_re);
    return max_re + std::log(acc);
  }

 private:
  const VariationalState& state_;
  std::unordered_map<std::uint64_t, Complex> cache_;
  std::vector<Complex> scratch_;
};

}  // namespace

Complex log_transformed_amplitude(const VariationalState& state,
                                  const SparseOperator* transform,
                                  const SpinConfiguration& x) {
  AmplitudeTable table(state);
  return table.transformed(transform, x);
}

StatePair make_state_pair(VariationalState psi,
                          std::shared_ptr<const SparseOperator> v_op,
                          SampleSet psi_samples, VariationalState phi,
                          std::shared_ptr<const SparseOperator> u_op,
                          SampleSet phi_samples) {
  return StatePair{{std::move(psi), std::move(v_op), std::move(psi_samples)},
                   {std::move(phi), std::move(u_op), std::move(phi_samples)}};
}

PairEvaluation evaluate_pair(const StatePair& pair, bool use_transforms,
                             const VariationalState* psi_override) {
  const VariationalState& psi_eval = psi_override ? *psi_override : pair.psi.state;
  AmplitudeTable psi_tab(psi_eval);
  AmplitudeTable phi_tab(pair.phi.state);
  const SparseOperator* vt = use_transforms ? pair.psi.transform.get() : nullptr;
  const SparseOperator* ut = use_transforms ? pair.phi.transform.get() : nullptr;
  if (vt && vt->is_identity()) vt = nullptr;
  if (ut && ut->is_identity()) ut = nullptr;

  PairEvaluation pe;
  pe.full = pair.full_summation();

  const auto& xs = pair.psi.samples.configs;
  const auto nx = static_cast<Eigen::Index>(xs.size());
  pe.log_psi_x.resize(nx);
  pe.log_phi_x.resize(nx);
  for (Eigen::Index i = 0; i < nx; ++i) {
    pe.log_psi_x(i) = psi_tab.transformed(vt, xs[static_cast<std::size_t>(i)]);
    pe.log_phi_x(i) = phi_tab.transformed(ut, xs[static_cast<std::size_t>(i)]);
  }

  const bool psi_modified = psi_override != nullptr || vt != nullptr;
  if (psi_modified) {
    Eigen::VectorXd wt(nx);
    for (Eigen::Index i = 0; i < nx; ++i) {
      const Complex log_sampling =
          pair.psi.state.log_amplitude(xs[static_cast<std::size_t>(i)]);
      wt(i) = pair.psi.samples.weights(i) *
              std::exp(2.0 * (pe.log_psi_x(i) - log_sampling).real());
    }
    const double total = wt.sum();
    if (!(total > 0.0) || !std::isfinite(total))
      throw std::runtime_error("evaluate_pair: degenerate psi-side reweighting");
    pe.w_x = wt / total;
    pe.norm_x = total;
  } else {
    pe.w_x = pair.psi.samples.weights;
    pe.norm_x = 1.0;
  }

  const auto& ys = pair.phi.samples.configs;
  const auto ny = static_cast<Eigen::Index>(ys.size());
  pe.log_psi_y.resize(ny);
  pe.log_phi_y.resize(ny);
  for (Eigen::Index j = 0; j < ny; ++j) {
    pe.log_psi_y(j) = psi_tab.transformed(vt, ys[static_cast<std::size_t>(j)]);
    pe.log_phi_y(j) = phi_tab.transformed(ut, ys[static_cast<std::size_t>(j)]);
  }

  if (ut != nullptr) {
    Eigen::VectorXd wt(ny);
    for (Eigen::Index j = 0; j < ny; ++j) {
      const Complex log_sampling = phi_tab.bare(ys[static_cast<std::size_t>(j)]);
      wt(j) = pair.phi.samples.weights(j) *
              std::exp(2.0 * (pe.log_phi_y(j) - log_sampling).real());
    }
    const double total = wt.sum();
    if (!(total > 0.0) || !std::isfinite(total))
      throw std::runtime_error("evaluate_pair: degenerate phi-side reweighting");
    pe.w_y = wt / total;
    pe.norm_y = total;
  } else {
    pe.w_y = pair.phi.samples.weights;
    pe.norm_y = 1.0;
  }
  return pe;
}

namespace {

// Single-side moments of the ratio arrays entering the separable (exact)
// expectations of the joint estimators.
struct RatioMoments {
  Complex m1{};   // E[R]
  Complex m2{};   // E[R^2]
  double m11 = 0; // E[|R|^2]
  Complex mc{};   // E[R |R|^2]
  double m22 = 0; // E[|R|^4]
};

RatioMoments ratio_moments(const Eigen::VectorXd& w, const Eigen::VectorXcd& r) {
  RatioMoments m;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const Complex ri = r(i);
    const double a2 = std::norm(ri);
    m.m1 += w(i) * ri;
    m.m2 += w(i) * ri * ri;
    m.m11 += w(i) * a2;
    m.mc += w(i) * ri * a2;
    m.m22 += w(i) * a2 * a2;
  }
  return m;
}

// Joint pair weights: base weight of the pair times both importance factors,
// self-normalized (their sum estimates the Appendix-B normalization).
Eigen::VectorXd joint_weights(const StatePair& pair, const PairEvaluation& pe,
                              double* total_out) {
  const auto n = pe.w_x.size();
  Eigen::VectorXd wz(n);
  for (Eigen::Index i = 0; i < n; ++i)
    wz(i) = pe.w_x(i) * pe.norm_x * pe.w_y(i) * pe.norm_y /
            pair.phi.samples.weights(i);
  const double tot = wz.sum();
  if (!(tot > 0.0) || !std::isfinite(tot))
    throw std::runtime_error("joint reweighting is degenerate (norm estimate <= 0)");
  if (total_out) *total_out = tot;
  wz /= tot;
  return wz;
}

EstimatorResult single_mc_impl(const StatePair& pair, const PairEvaluation& pe,
                               std::optional<double> c_opt) {
  EstimatorResult res;
  res.norm_ratio = pe.norm_x * pe.norm_y;

  const Eigen::VectorXcd r_x = ratio(pe.log_phi_x, pe.log_psi_x);  // R_{phi psi}(x)
  const Eigen::VectorXcd r_y = ratio(pe.log_psi_y, pe.log_phi_y);  // R_{psi phi}(y)
  check_locals_finite(r_x, pair.psi.samples.configs, "fidelity_single_mc");
  check_locals_finite(r_y, pair.phi.samples.configs, "fidelity_single_mc");

  if (pe.full) {
    // Exact expectation over the product measure; all moments separate.
    const RatioMoments mx = ratio_moments(pe.w_x, r_x);
    const RatioMoments my = ratio_moments(pe.w_y, r_y);
    const Complex ea = mx.m1 * my.m1;
    const double ea2_abs = mx.m11 * my.m11;              // E|A|^2
    const Complex eaa = mx.m2 * my.m2;                   // E[A^2]
    const Complex ea_abs2 = mx.mc * my.mc;               // E[A |A|^2]
    const double ea4 = mx.m22 * my.m22;                  // E|A|^4
    const double e_re2 = 0.5 * (eaa.real() + ea2_abs);   // E[(Re A)^2]

    const double c = c_opt.value_or(0.0);
    res.value = ea.real() + c * (ea2_abs - 1.0);
    const double e_f2 = e_re2 + 2.0 * c * (ea_abs2.real() - ea.real()) +
                        c * c * (ea4 - 2.0 * ea2_abs + 1.0);
    res.variance = std::max(0.0, e_f2 - res.value * res.value);
    return res;
  }

  if (!pair.joint())
    throw std::invalid_argument("fidelity_single_mc: joint pairing required");

  double norm_est = 1.0;
  const Eigen::VectorXd wz = joint_weights(pair, pe, &norm_est);
  res.norm_ratio = norm_est;

  const auto n = r_x.size();
  res.locals.resize(n);
  Eigen::VectorXd f(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex a = r_x(i) * r_y(i);
    res.locals(i) = a;
    f(i) = a.real() + (c_opt ? *c_opt * (std::norm(a) - 1.0) : 0.0);
  }
  res.value = wz.dot(f);
  res.variance = weighted_variance(wz, f, res.value);
  return res;
}

EstimatorResult double_mc_impl(const StatePair& pair, const PairEvaluation& pe,
                               std::optional<double> c_opt) {
  EstimatorResult res;
  res.norm_ratio = pe.norm_x * pe.norm_y;

  const Eigen::VectorXcd r_x = ratio(pe.log_phi_x, pe.log_psi_x);
  const Eigen::VectorXcd r_y = ratio(pe.log_psi_y, pe.log_phi_y);
  check_locals_finite(r_x, pair.psi.samples.configs, "fidelity_double_mc");
  check_locals_finite(r_y, pair.phi.samples.configs, "fidelity_double_mc");

  // The phi-side means are computed once and reused for every x.
  Complex mean_ry{0.0, 0.0};
  double mean_ry2 = 0.0;
  for (Eigen::Index j = 0; j < r_y.size(); ++j) {
    mean_ry += pe.w_y(j) * r_y(j);
    mean_ry2 += pe.w_y(j) * std::norm(r_y(j));
  }

  const auto n = r_x.size();
  res.locals.resize(n);
  Eigen::VectorXd f(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex h = r_x(i) * mean_ry;
    res.locals(i) = h;
    f(i) = h.real();
    if (c_opt) f(i) += *c_opt * (std::norm(r_x(i)) * mean_ry2 - 1.0);
  }
  res.value = pe.w_x.dot(f);
  res.variance = weighted_variance(pe.w_x, f, res.value);
  return res;
}

}  // namespace

EstimatorResult fidelity_with(const StatePair& pair, const PairEvaluation& pe,
                              FidelityEstimatorKind kind, std::optional<double> c) {
  return kind == FidelityEstimatorKind::kSingleMc ? single_mc_impl(pair, pe, c)
                                                  : double_mc_impl(pair, pe, c);
}

EstimatorResult fidelity_single_mc(const StatePair& pair, std::optional<double> c) {
  const PairEvaluation pe = evaluate_pair(pair, /*use_transforms=*/false);
  return single_mc_impl(pair, pe, c);
}

EstimatorResult fidelity_double_mc(const StatePair& pair, std::optional<double> c) {
  const PairEvaluation pe = evaluate_pair(pair, /*use_transforms=*/false);
  return double_mc_impl(pair, pe, c);
}

EstimatorResult fidelity_reweighted(const StatePair& pair, FidelityEstimatorKind kind,
                                    std::optional<double> c) {
  const PairEvaluation pe = evaluate_pair(pair, /*use_transforms=*/true);
  return fidelity_with(pair, pe, kind, c);
}

namespace {

// Rows grad log (V psi)(x) for a list of configurations: a connected-element
// average of bare Jacobian rows, grad log psi~(x) = sum_c u_c J(c) with
// u_c = V_xc psi(c) / psi~(x).
Eigen::MatrixXcd transformed_jacobian_rows(const VariationalState& state,
                                           const SparseOperator* transform,
                                           const std::vector<SpinConfiguration>& configs) {
  const auto n = static_cast<Eigen::Index>(configs.size());
  Eigen::MatrixXcd rows(n, state.parameter_count());
  if (!transform || transform->is_identity()) {
    for (Eigen::Index i = 0; i < n; ++i)
      rows.row(i) = state.log_amplitude_gradient(configs[static_cast<std::size_t>(i)]);
    return rows;
  }
  std::unordered_map<std::uint64_t, Eigen::VectorXcd> jac_cache;
  std::unordered_map<std::uint64_t, Complex> log_cache;
  auto bare_jac = [&](const SpinConfiguration& x) -> const Eigen::VectorXcd& {
    auto it = jac_cache.find(x.index());
    if (it == jac_cache.end())
      it = jac_cache.emplace(x.index(), state.log_amplitude_gradient(x)).first;
    return it->second;
  };
  auto bare_log = [&](const SpinConfiguration& x) {
    auto it = log_cache.find(x.index());
    if (it == log_cache.end())
      it = log_cache.emplace(x.index(), state.log_amplitude(x)).first;
    return it->second;
  };
  AmplitudeTable table(state);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& x = configs[static_cast<std::size_t>(i)];
    const Complex log_t = table.transformed(transform, x);
    Eigen::VectorXcd row = Eigen::VectorXcd::Zero(state.parameter_count());
    for (const auto& [xp, v] : transform->connected_elements(x)) {
      const Complex u = std::exp(std::log(v) + bare_log(xp) - log_t);
      row += u * bare_jac(xp);
    }
    rows.row(i) = row;
  }
  return rows;
}

JacobianBatch centered_batch(Eigen::MatrixXcd rows, Eigen::VectorXd weights) {
  JacobianBatch batch;
  const Eigen::RowVectorXcd mean = weights.cast<Complex>().transpose() * rows;
  batch.centered = rows.rowwise() - mean;
  batch.raw = std::move(rows);
  batch.weights = std::move(weights);
  return batch;
}

// X = [Re Y | Im Y] with Y columns sqrt(w_i) dJ(x_i); then S = X X^T and
// grad F = X eps with eps built from the locals.
void factorize(const JacobianBatch& jac, const Eigen::VectorXd& w,
               const Eigen::VectorXcd& locals, GradientResult* out) {
  const auto n = static_cast<Eigen::Index>(w.size());
  const auto np = jac.centered.cols();
  out->x_matrix.resize(np, 2 * n);
  out->epsilon.resize(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sw = std::sqrt(std::max(0.0, w(i)));
    out->x_matrix.col(i) = sw * jac.centered.row(i).real().transpose();
    out->x_matrix.col(n + i) = sw * jac.centered.row(i).imag().transpose();
    out->epsilon(i) = 2.0 * sw * locals(i).real();
    out->epsilon(n + i) = 2.0 * sw * locals(i).imag();
  }
  out->has_factorized = true;
}

}  // namespace

JacobianBatch psi_side_jacobian(const StatePair& pair, const PairEvaluation& pe) {
  Eigen::MatrixXcd rows = transformed_jacobian_rows(
      pair.psi.state, pair.psi.transform.get(), pair.psi.samples.configs);
  return centered_batch(std::move(rows), pe.w_x);
}

JacobianBatch psi_side_jacobian(const StatePair& pair) {
  return psi_side_jacobian(pair, evaluate_pair(pair, /*use_transforms=*/true));
}

JacobianBatch psi_jacobian_on_phi_samples(const StatePair& pair,
                                          const PairEvaluation& pe) {
  Eigen::MatrixXcd rows = transformed_jacobian_rows(
      pair.psi.state, pair.psi.transform.get(), pair.phi.samples.configs);
  return centered_batch(std::move(rows), pe.w_y);
}

JacobianBatch psi_jacobian_on_phi_samples(const StatePair& pair) {
  return psi_jacobian_on_phi_samples(pair, evaluate_pair(pair, /*use_transforms=*/true));
}

GradientResult grad_hermitian(const StatePair& pair, const PairEvaluation& pe,
                              const JacobianBatch& jac) {
  const Eigen::VectorXcd r_x = ratio(pe.log_phi_x, pe.log_psi_x);
  const Eigen::VectorXcd r_y = ratio(pe.log_psi_y, pe.log_phi_y);
  check_locals_finite(r_x, pair.psi.samples.configs, "grad_hermitian");
  check_locals_finite(r_y, pair.phi.samples.configs, "grad_hermitian");

  Complex mean_ry{0.0, 0.0};
  for (Eigen::Index j = 0; j < r_y.size(); ++j) mean_ry += pe.w_y(j) * r_y(j);

  const auto n = r_x.size();
  Eigen::VectorXcd h(n);
  for (Eigen::Index i = 0; i < n; ++i) h(i) = r_x(i) * mean_ry;

  GradientResult res;
  res.estimator_id = "hermitian";
  res.grad = Eigen::VectorXd::Zero(jac.centered.cols());
  for (Eigen::Index i = 0; i < n; ++i)
    res.grad += pe.w_x(i) * 2.0 *
                (jac.centered.row(i).transpose() * std::conj(h(i))).real();
  factorize(jac, pe.w_x, h, &res);
  return res;
}

GradientResult grad_hermitian(const StatePair& pair, const JacobianBatch& jac) {
  return grad_hermitian(pair, evaluate_pair(pair, /*use_transforms=*/true), jac);
}

GradientResult grad_mixed(const StatePair& pair, const PairEvaluation& pe,
                          const JacobianBatch& jac) {
  const Eigen::VectorXcd r_x = ratio(pe.log_phi_x, pe.log_psi_x);
  const Eigen::VectorXcd r_y = ratio(pe.log_psi_y, pe.log_phi_y);
  check_locals_finite(r_x, pair.psi.samples.configs, "grad_mixed");
  check_locals_finite(r_y, pair.phi.samples.configs, "grad_mixed");

  GradientResult res;
  res.estimator_id = "mixed";

  if (pe.full) {
    // Exact joint expectation; E_z[dJ(x) A(z)^*] separates into the x-side
    // sum against the conjugated y-side mean.
    Complex mean_ry{0.0, 0.0};
    for (Eigen::Index j = 0; j < r_y.size(); ++j) mean_ry += pe.w_y(j) * r_y(j);
    const auto n = r_x.size();
    Eigen::VectorXcd collapsed(n);
    for (Eigen::Index i = 0; i < n; ++i) collapsed(i) = r_x(i) * mean_ry;
    res.grad = Eigen::VectorXd::Zero(jac.centered.cols());
    for (Eigen::Index i = 0; i < n; ++i)
      res.grad += pe.w_x(i) * 2.0 *
                  (jac.centered.row(i).transpose() * std::conj(collapsed(i))).real();
    factorize(jac, pe.w_x, collapsed, &res);
    return res;
  }

  if (!pair.joint())
    throw std::invalid_argument("grad_mixed: joint pairing required");

  const Eigen::VectorXd wz = joint_weights(pair, pe, nullptr);
  const auto n = r_x.size();
  Eigen::VectorXcd a(n);
  for (Eigen::Index i = 0; i < n; ++i) a(i) = r_x(i) * r_y(i);

  res.grad = Eigen::VectorXd::Zero(jac.centered.cols());
  for (Eigen::Index i = 0; i < n; ++i)
    res.grad += wz(i) * 2.0 *
                (jac.centered.row(i).transpose() * std::conj(a(i))).real();
  factorize(jac, wz, a, &res);
  return res;
}

GradientResult grad_mixed(const StatePair& pair, const JacobianBatch& jac) {
  return grad_mixed(pair, evaluate_pair(pair, /*use_transforms=*/true), jac);
}

GradientResult grad_nonhermitian(const StatePair& pair, const PairEvaluation& pe,
                                 const JacobianBatch& jac_psi,
                                 const JacobianBatch& jac_on_phi, double c) {
  const Eigen::VectorXcd r_x = ratio(pe.log_phi_x, pe.log_psi_x);
  const Eigen::VectorXcd r_y = ratio(pe.log_psi_y, pe.log_phi_y);
  check_locals_finite(r_x, pair.psi.samples.configs, "grad_nonhermitian");
  check_locals_finite(r_y, pair.phi.samples.configs, "grad_nonhermitian");

  GradientResult res;
  res.estimator_id = "nonhermitian";
  res.has_factorized = false;
  const auto np = jac_psi.raw.cols();
  res.grad = Eigen::VectorXd::Zero(np);

  if (pe.full) {
    // Blocks of the extended expression assembled from separable moments,
    // with the y (or x) dependence integrated out inside each block. With
    // A = Rx Ry and F = Re A + c (|A|^2 - 1):
    //   x block: 2 dF - Re A - 2c |A|^2 against J(x), plus Im A against i-part
    //   y block: Re A + 2c |A|^2 against J(y), minus Im A against i-part
    const RatioMoments mx = ratio_moments(pe.w_x, r_x);
    const RatioMoments my = ratio_moments(pe.w_y, r_y);
    const Complex ea = mx.m1 * my.m1;
    const double ea2 = mx.m11 * my.m11;
    const double ef = ea.real() + c * (ea2 - 1.0);

    for (Eigen::Index i = 0; i < r_x.size(); ++i) {
      const Complex a_x = r_x(i) * my.m1;               // E_y[A | x]
      const double a2_x = std::norm(r_x(i)) * my.m11;   // E_y[|A|^2 | x]
      const double f_x = a_x.real() + c * (a2_x - 1.0);
      const double coeff_re = 2.0 * (f_x - ef) - a_x.real() - 2.0 * c * a2_x;
      const double coeff_im = a_x.imag();
      res.grad += pe.w_x(i) * (coeff_re * jac_psi.raw.row(i).real().transpose() +
                               coeff_im * jac_psi.raw.row(i).imag().transpose());
    }
    for (Eigen::Index j = 0; j < r_y.size(); ++j) {
      const Complex a_y = mx.m1 * r_y(j);
      const double a2_y = mx.m11 * std::norm(r_y(j));
      const double coeff_re = a_y.real() + 2.0 * c * a2_y;
      const double coeff_im = -a_y.imag();
      res.grad += pe.w_y(j) * (coeff_re * jac_on_phi.raw.row(j).real().transpose() +
                               coeff_im * jac_on_phi.raw.row(j).imag().transpose());
    }
    return res;
  }

  if (!pair.joint())
    throw std::invalid_argument("grad_nonhermitian: joint pairing required");

  const Eigen::VectorXd wz = joint_weights(pair, pe, nullptr);
  const auto n = r_x.size();
  Eigen::VectorXd f(n);
  Eigen::VectorXcd a(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i) = r_x(i) * r_y(i);
    f(i) = a(i).real() + c * (std::norm(a(i)) - 1.0);
  }
  const double ef = wz.dot(f);

  for (Eigen::Index i = 0; i < n; ++i) {
    const double a2 = std::norm(a(i));
    const double coeff_x_re = 2.0 * (f(i) - ef) - a(i).real() - 2.0 * c * a2;
    const double coeff_x_im = a(i).imag();
    const double coeff_y_re = a(i).real() + 2.0 * c * a2;
    const double coeff_y_im = -a(i).imag();
    res.grad += wz(i) * (coeff_x_re * jac_psi.raw.row(i).real().transpose() +
                         coeff_x_im * jac_psi.raw.row(i).imag().transpose() +
                         coeff_y_re * jac_on_phi.raw.row(i).real().transpose() +
                         coeff_y_im * jac_on_phi.raw.row(i).imag().transpose());
  }
  return res;
}

GradientResult grad_nonhermitian(const StatePair& pair, const JacobianBatch& jac_psi,
                                 const JacobianBatch& jac_on_phi, double c) {
  return grad_nonhermitian(pair, evaluate_pair(pair, /*use_transforms=*/true), jac_psi,
                           jac_on_phi, c);
}

}  // namespace ptvmc
