#include "ptvmc/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "ptvmc/exact.hpp"

namespace ptvmc {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

void canonical_sort(std::vector<Complex>& a) {
  std::sort(a.begin(), a.end(), [](Complex x, Complex y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
}

}  // namespace

std::string scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::kLpe: return "LPE";
    case SchemeKind::kPpe: return "PPE";
    case SchemeKind::kSlpe: return "S-LPE";
    case SchemeKind::kSppe: return "S-PPE";
  }
  return "?";
}

std::optional<SchemeKind> parse_scheme_name(const std::string& name) {
  std::string n;
  for (char c : name)
    if (c != '-' && c != '_') n.push_back(static_cast<char>(std::toupper(c)));
  if (n == "LPE") return SchemeKind::kLpe;
  if (n == "PPE") return SchemeKind::kPpe;
  if (n == "SLPE") return SchemeKind::kSlpe;
  if (n == "SPPE") return SchemeKind::kSppe;
  return std::nullopt;
}

std::vector<Complex> elementary_symmetric(const std::vector<Complex>& a) {
  std::vector<Complex> e(a.size() + 1, Complex{0.0, 0.0});
  e[0] = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = i + 1; k > 0; --k) e[k] += a[i] * e[k - 1];
  return e;
}

std::vector<Complex> complete_homogeneous(const std::vector<Complex>& a,
                                          int max_degree) {
  std::vector<Complex> h(max_degree + 1, Complex{0.0, 0.0});
  h[0] = 1.0;
  for (Complex ai : a) {
    // Multiply the generating series by 1 / (1 - ai z).
    for (int k = 1; k <= max_degree; ++k) h[k] += ai * h[k - 1];
  }
  return h;
}

double lpe_order_residual(const std::vector<Complex>& a) {
  const auto e = elementary_symmetric(a);
  double r = 0.0;
  for (std::size_t k = 1; k < e.size(); ++k)
    r = std::max(r, std::abs(e[k] - 1.0 / factorial(static_cast<int>(k))));
  return r;
}

double ppe_order_residual(const std::vector<Complex>& a,
                          const std::vector<Complex>& b) {
  const int s = static_cast<int>(a.size());
  const auto e = elementary_symmetric(a);
  const auto h = complete_homogeneous(b, 2 * s);
  double r = 0.0;
  for (int k = 1; k <= 2 * s; ++k) {
    Complex lhs{0.0, 0.0};
    for (int j = 0; j <= k; ++j) {
      if (j > s) break;
      const double sign = ((k - j) % 2 == 0) ? 1.0 : -1.0;
      lhs += sign * e[j] * h[k - j];
    }
    r = std::max(r, std::abs(lhs - 1.0 / factorial(k)));
  }
  return r;
}

std::vector<Complex> solve_lpe_coefficients(int order) {
  if (order < 1 || order > 4)
    throw std::invalid_argument("solve_lpe_coefficients: order must be in 1..4");

  // prod_i (1 + a_i z) = sum_k z^k / k!  up to degree s, so the a_i are the
  // negated reciprocal roots of the truncated exponential series.
  const int s = order;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(s, s);
  // Monic form of sum_k z^k/k!: coefficients c_k = s!/k!.
  for (int k = 0; k < s; ++k) {
    if (k + 1 < s) companion(k + 1, k) = 1.0;
    companion(k, s - 1) = -factorial(s) / factorial(k);
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion);
  if (es.info() != Eigen::Success)
    throw SolverFailureError("solve_lpe_coefficients: eigenvalue solve failed");

  std::vector<Complex> a(s);
  for (int i = 0; i < s; ++i) a[i] = -1.0 / es.eigenvalues()(i);
  canonical_sort(a);

  if (lpe_order_residual(a) > 1e-10)
    throw SolverFailureError("solve_lpe_coefficients: order conditions not met");
  return a;
}

namespace {

// Residuals of the b = -a reduced system: with h_m(-a) = (-1)^m h_m(a) the
// PPE conditions become sum_j e_j(a) h_(k-j)(a) = 1/k! for k = 1..2s.
Eigen::VectorXd ppe_reduced_residual(const Eigen::VectorXd& x) {
  const int s = static_cast<int>(x.size()) / 2;
  std::vector<Complex> a(s);
  for (int i = 0; i < s; ++i) a[i] = Complex{x(2 * i), x(2 * i + 1)};
  const auto e = elementary_symmetric(a);
  const auto h = complete_homogeneous(a, 2 * s);
  Eigen::VectorXd r(4 * s);
  for (int k = 1; k <= 2 * s; ++k) {
    Complex lhs{0.0, 0.0};
    for (int j = 0; j <= std::min(k, s); ++j) lhs += e[j] * h[k - j];
    const Complex res = lhs - 1.0 / factorial(k);
    r(2 * (k - 1)) = res.real();
    r(2 * (k - 1) + 1) = res.imag();
  }
  return r;
}

}  // namespace

std::pair<std::vector<Complex>, std::vector<Complex>> solve_ppe_coefficients(
    int substeps) {
  if (substeps < 1 || substeps > 3)
    throw std::invalid_argument("solve_ppe_coefficients: substeps must be in 1..3");

  const int s = substeps;
  const int n = 2 * s;
  std::mt19937_64 rng(0x9e3779b9u + static_cast<unsigned>(s));
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  for (int attempt = 0; attempt < 100; ++attempt) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = 0.5 * uni(rng);

    // Damped Gauss-Newton with a numerical Jacobian.
    double mu = 1e-3;
    bool converged = false;
    Eigen::VectorXd r = ppe_reduced_residual(x);
    for (int it = 0; it < 400; ++it) {
      if (r.norm() < 1e-13) { converged = true; break; }
      Eigen::MatrixXd jac(r.size(), n);
      const double hstep = 1e-7;
      for (int j = 0; j < n; ++j) {
        Eigen::VectorXd xp = x, xm = x;
        xp(j) += hstep;
        xm(j) -= hstep;
        jac.col(j) = (ppe_reduced_residual(xp) - ppe_reduced_residual(xm)) / (2 * hstep);
      }
      Eigen::MatrixXd jtj = jac.transpose() * jac;
      Eigen::VectorXd jtr = jac.transpose() * r;
      bool stepped = false;
      for (int tries = 0; tries < 30; ++tries) {
        Eigen::MatrixXd m = jtj;
        m.diagonal().array() += mu;
        Eigen::VectorXd dx = m.ldlt().solve(-jtr);
        Eigen::VectorXd xn = x + dx;
        Eigen::VectorXd rn = ppe_reduced_residual(xn);
        if (rn.norm() < r.norm()) {
          x = xn;
          r = rn;
          mu = std::max(mu * 0.3, 1e-12);
          stepped = true;
          break;
        }
        mu *= 10.0;
      }
      if (!stepped) break;
    }
    if (!converged) continue;

    std::vector<Complex> a(s), b(s);
    for (int i = 0; i < s; ++i) {
      a[i] = Complex{x(2 * i), x(2 * i + 1)};
      b[i] = -a[i];
    }
    canonical_sort(a);
    canonical_sort(b);
    if (ppe_order_residual(a, b) < 1e-8) return {a, b};
  }
  throw SolverFailureError("solve_ppe_coefficients: no convergence after 100 restarts");
}

SplitCoefficients lookup_split_coefficients(SchemeKind kind, int order) {
  const double s3 = std::sqrt(3.0);
  const double s15 = std::sqrt(15.0);
  if (kind == SchemeKind::kSlpe) {
    SplitCoefficients c;
    switch (order) {
      case 1:
        c.a = {Complex{1.0, 0.0}};
        break;
      case 2:
        c.a = {Complex{0.5, -0.5}, Complex{0.5, 0.5}};
        break;
      case 3:
        c.a = {Complex{0.1057, -0.3943}, Complex{0.3943, 0.1057},
               Complex{0.3943, -0.1057}, Complex{0.1057, 0.3943}};
        break;
      default:
        throw std::invalid_argument(
            "lookup_split_coefficients: supported pairs are (S-LPE, 1|2|3) and "
            "(S-PPE, 2|3|4)");
    }
    c.alpha = c.a;
    return c;
  }
  if (kind == SchemeKind::kSppe) {
    SplitCoefficients c;
    switch (order) {
      case 2:
        c.a = {Complex{0.5, 0.0}};
        c.b = {Complex{-0.5, 0.0}};
        c.alpha = {Complex{0.5, 0.0}, Complex{0.5, 0.0}};
        break;
      case 3:
        c.a = {Complex{0.25, s3 / 12.0}, Complex{0.25, -s3 / 12.0}};
        c.b = {Complex{-0.25, -s3 / 12.0}, Complex{-0.25, s3 / 12.0}};
        c.alpha = {Complex{0.25, s3 / 12.0}, Complex{0.5, 0.0},
                   Complex{0.25, -s3 / 12.0}};
        break;
      case 4:
        c.a = {Complex{0.125, -s15 / 24.0}, Complex{0.25, 0.0},
               Complex{0.125, s15 / 24.0}};
        c.b = {Complex{-0.125, s15 / 24.0}, Complex{-0.25, 0.0},
               Complex{-0.125, -s15 / 24.0}};
        c.alpha = {Complex{0.125, -s15 / 24.0}, Complex{0.375, -s15 / 24.0},
                   Complex{0.375, s15 / 24.0}, Complex{0.125, s15 / 24.0}};
        break;
      default:
        throw std::invalid_argument(
            "lookup_split_coefficients: supported pairs are (S-LPE, 1|2|3) and "
            "(S-PPE, 2|3|4)");
    }
    return c;
  }
  throw std::invalid_argument("lookup_split_coefficients: kind must be S-LPE or S-PPE");
}

SchemePlan build_plan(SchemeKind kind, int order) {
  SchemePlan plan;
  plan.kind = kind;
  plan.order = order;
  plan.split = (kind == SchemeKind::kSlpe || kind == SchemeKind::kSppe);
  plan.table_truncated = false;

  switch (kind) {
    case SchemeKind::kLpe: {
      const auto a = solve_lpe_coefficients(order);
      for (Complex ai : a) plan.factors.push_back(FactorDescriptor::linear(ai));
      break;
    }
    case SchemeKind::kPpe: {
      if (order % 2 != 0 || order < 2 || order > 6)
        throw std::invalid_argument("build_plan: PPE supports orders 2, 4, 6");
      const auto [a, b] = solve_ppe_coefficients(order / 2);
      for (std::size_t i = 0; i < a.size(); ++i)
        plan.factors.push_back(FactorDescriptor::pade(a[i], -a[i]));
      (void)b;
      break;
    }
    case SchemeKind::kSlpe: {
      const auto c = lookup_split_coefficients(kind, order);
      for (std::size_t i = 0; i < c.a.size(); ++i) {
        plan.factors.push_back(FactorDescriptor::diagonal_exp(c.alpha[i]));
        plan.factors.push_back(FactorDescriptor::linear(c.a[i]));
      }
      plan.table_truncated = (order == 3);
      break;
    }
    case SchemeKind::kSppe: {
      const auto c = lookup_split_coefficients(kind, order);
      for (std::size_t i = 0; i < c.a.size(); ++i) {
        plan.factors.push_back(FactorDescriptor::diagonal_exp(c.alpha[i]));
        plan.factors.push_back(FactorDescriptor::pade(c.a[i], c.b[i]));
      }
      plan.factors.push_back(FactorDescriptor::diagonal_exp(c.alpha.back()));
      break;
    }
  }

  plan.substep_count = 0;
  for (const auto& f : plan.factors)
    if (f.kind != FactorDescriptor::Kind::kDiagonalExp) ++plan.substep_count;
  return plan;
}

OrderCheckResult verify_order(const SchemePlan& plan, const SparseOperator& hamiltonian,
                              double t_final, const std::vector<double>& dt_grid,
                              const StateVector* initial, double err_floor,
                              double err_ceil) {
  const auto dim = std::uint64_t{1} << hamiltonian.n_sites();
  StateVector psi0;
  if (initial) {
    psi0 = *initial;
  } else {
    psi0 = StateVector::Constant(static_cast<Eigen::Index>(dim),
                                 Complex{1.0 / std::sqrt(static_cast<double>(dim)), 0.0});
  }

  const OperatorSplit split = split_diag_offdiag(hamiltonian);
  const StateVector psi_exact = exact_evolve(psi0, hamiltonian, t_final);

  OrderCheckResult res;
  for (double dt : dt_grid) {
    const int n_steps = std::max(1, static_cast<int>(std::lround(t_final / dt)));
    const double dt_eff = t_final / n_steps;
    StateVector psi = psi0;
    for (int k = 0; k < n_steps; ++k) psi = apply_plan_exact(psi, plan, split, dt_eff);
    res.dts.push_back(dt_eff);
    res.errors.push_back((psi - psi_exact).norm());
  }

  // Log-log least squares over the asymptotic window.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < res.dts.size(); ++i) {
    if (res.errors[i] < err_floor || res.errors[i] > err_ceil) continue;
    const double lx = std::log(res.dts[i]);
    const double ly = std::log(res.errors[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    ++n;
  }
  if (n >= 2 && std::abs(n * sxx - sx * sx) > 1e-12) {
    res.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    res.slope_valid = true;
  }
  return res;
}

}  // namespace ptvmc
