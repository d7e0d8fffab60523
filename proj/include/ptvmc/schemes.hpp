#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ptvmc/operators.hpp"

namespace ptvmc {

enum class SchemeKind { kLpe, kPpe, kSlpe, kSppe };

std::string scheme_name(SchemeKind kind);
std::optional<SchemeKind> parse_scheme_name(const std::string& name);

// One factor of a product-expansion plan, in application order (the plan's
// first factor is the rightmost operator of the product and acts first).
//
//   kDiagonalExp    exp(alpha * (-i) * Z dt), applied exactly
//   kOffDiagLinear  1 + a * (-i) * O dt
//   kOffDiagPade    (1 + b * (-i) * O dt)^-1 (1 + a * (-i) * O dt)
//
// where O is the off-diagonal part X for split plans and the full Hamiltonian
// for non-split plans. The -i is folded in at application time; coefficients
// here are the expansion coefficients of exp(Lambda dt) with Lambda = -i H.
struct FactorDescriptor {
  enum class Kind { kDiagonalExp, kOffDiagLinear, kOffDiagPade };
  Kind kind;
  Complex a;  // alpha for kDiagonalExp
  Complex b;  // only for kOffDiagPade

  static FactorDescriptor diagonal_exp(Complex alpha) {
    return {Kind::kDiagonalExp, alpha, {}};
  }
  static FactorDescriptor linear(Complex a) {
    return {Kind::kOffDiagLinear, a, {}};
  }
  static FactorDescriptor pade(Complex a, Complex b) {
    if (b == 0.0) return linear(a);
    return {Kind::kOffDiagPade, a, b};
  }
};

struct SchemePlan {
  SchemeKind kind;
  int order;
  std::vector<FactorDescriptor> factors;
  int substep_count;  // number of off-diagonal factors (optimizations)
  bool split;
  // True when coefficients come from a 4-decimal table rather than a solve;
  // order checks must not push below the resulting error floor.
  bool table_truncated;
};

struct SolverFailureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Elementary symmetric polynomials e_0..e_n of the given values.
std::vector<Complex> elementary_symmetric(const std::vector<Complex>& a);
// Complete homogeneous symmetric polynomials h_0..h_max_degree.
std::vector<Complex> complete_homogeneous(const std::vector<Complex>& a,
                                          int max_degree);

// max_k |e_k(a) - 1/k!| over 1 <= k <= s.
double lpe_order_residual(const std::vector<Complex>& a);
// max_k |sum_j (-1)^(k-j) e_j(a) h_(k-j)(b) - 1/k!| over 1 <= k <= 2s.
double ppe_order_residual(const std::vector<Complex>& a,
                          const std::vector<Complex>& b);

// Coefficients a_i with e_k(a) = 1/k!, i.e. the negated reciprocal roots of
// the degree-s truncated exponential series. Canonically sorted by real part,
// then imaginary part.
std::vector<Complex> solve_lpe_coefficients(int order);

// Coefficients (a, b) with sum_j (-1)^(k-j) e_j(a) h_(k-j)(b) = 1/k! for
// k = 1..2s, solved under the ansatz b = -a and verified against the full
// conditions. Canonically sorted.
std::pair<std::vector<Complex>, std::vector<Complex>> solve_ppe_coefficients(
    int substeps);

struct SplitCoefficients {
  std::vector<Complex> a;
  std::vector<Complex> b;      // empty for S-LPE
  std::vector<Complex> alpha;  // size s for S-LPE, s+1 for S-PPE
};

// Tabulated constants for the split schemes; (SLPE, 1..3) and (SPPE, 2..4).
SplitCoefficients lookup_split_coefficients(SchemeKind kind, int order);

SchemePlan build_plan(SchemeKind kind, int order);

struct OrderCheckResult {
  std::vector<double> dts;     // effective step sizes (t_final / n_steps)
  std::vector<double> errors;  // L2 distance to the exact state at t_final
  double slope = 0.0;
  bool slope_valid = false;
};

// Evolves a reference state to t_final with the plan on the dense backend and
// compares against the exact propagator. The slope is a log-log least-squares
// fit restricted to errors inside [err_floor, err_ceil].
OrderCheckResult verify_order(const SchemePlan& plan, const SparseOperator& hamiltonian,
                              double t_final, const std::vector<double>& dt_grid,
                              const StateVector* initial = nullptr,
                              double err_floor = 1e-9, double err_ceil = 0.2);

}  // namespace ptvmc
