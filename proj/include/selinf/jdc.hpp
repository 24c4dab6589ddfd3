#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "selinf/probspace.hpp"
#include "selinf/real.hpp"

namespace selinf {

inline constexpr std::size_t kDefaultHiddenCap = 1000000;
inline constexpr double kDefaultLpTolerance = 1e-9;

struct JdcOptions {
  std::size_t hidden_cap = kDefaultHiddenCap;
  double lp_tolerance = kDefaultLpTolerance;
  double sum_tolerance = kDefaultSumTolerance;
};

/// The joint distribution criterion as a linear feasibility problem: one
/// unknown per joint assignment of outputs to every input point, and one
/// equality per (treatment, outcome vector).
class JdcProblem {
 public:
  struct Constraint {
    std::size_t treatment;
    std::size_t outcome;  // flat index into that treatment's table
    Real rhs;
  };

  const System& system() const noexcept { return system_; }
  std::size_t variable_count() const noexcept { return variables_; }
  std::size_t constraint_count() const noexcept { return constraints_.size(); }
  const std::vector<Constraint>& constraints() const noexcept { return constraints_; }
  /// |V| per input point id; the hidden space is their product.
  const std::vector<std::size_t>& radices() const noexcept { return radices_; }

  /// Output index at every input point for hidden assignment `h`.
  std::vector<std::size_t> hidden_values(std::size_t h) const;
  /// Outcome (flat table index) that assignment `h` induces under a treatment.
  std::size_t project(std::size_t h, std::size_t treatment) const;
  /// 1 when assignment `col` contributes to constraint `row`, else 0.
  int coefficient(std::size_t row, std::size_t col) const;

  bool exact() const noexcept { return exact_; }

 private:
  friend JdcProblem build_jdc(const System& system, const JdcOptions& options);
  explicit JdcProblem(System system) : system_(std::move(system)) {}
  System system_;
  std::size_t variables_ = 0;
  std::vector<std::size_t> radices_;
  std::vector<Constraint> constraints_;
  bool exact_ = true;
};

JdcProblem build_jdc(const System& system, const JdcOptions& options = {});

struct JdcVerdict {
  bool feasible = false;
  bool exact = true;
  std::vector<Real> witness;      // Q over hidden assignments, when feasible
  std::vector<Real> certificate;  // y over constraints, when infeasible
  std::size_t pivots = 0;
  std::size_t lp_rows = 0;  // independent rows actually handed to the simplex
  std::string reason;
};

/// Decides feasibility. Rational problems are solved exactly; float problems
/// use the same simplex with tolerance `options.lp_tolerance`. Witnesses and
/// certificates are checked against the full constraint set before return.
JdcVerdict jdc_feasible(const JdcProblem& problem, const JdcOptions& options = {});

/// Every treatment's table is reproduced by pushing Q through its projection.
bool verify_witness(const JdcProblem& problem, std::span<const Real> q, double tolerance = 0.0);

/// y^T b < 0 and every column of y^T A is >= 0.
bool verify_certificate(const JdcProblem& problem, std::span<const Real> y, double tolerance = 0.0);

/// The eight observable probabilities of a 2x2 design with binary outputs,
/// plus the four tables they come from. Input 1 has values (x, x'), input 2
/// (y, y'); each output's first listed value plays the role of the "1" row
/// or column.
struct FineSystem {
  using Table2 = std::array<std::array<Real, 2>, 2>;
  Table2 p, q, r, s;  // (x,y), (x,y'), (x',y), (x',y')
  Real a1, a1p, b1, b1p;
  bool exact = true;
};

FineSystem extract_fine(const System& system, double tolerance = kDefaultLpTolerance);

struct FineReport {
  std::array<Real, 4> expressions;  // e_1..e_4, each must lie in [-1, 0]
  /// upper[k] = -e_k (>= 0 iff e_k <= 0), lower[k] = e_k + 1 (>= 0 iff e_k >= -1)
  std::array<Real, 4> upper;
  std::array<Real, 4> lower;
  std::array<bool, 8> holds{};  // upper 1..4, then lower 1..4
  bool all_hold = true;
};

FineReport fine_inequalities(const FineSystem& fs, double tolerance = kDefaultLpTolerance);

struct ChainResiduals {
  std::array<Real, 4> d1;  // e.g. p_12 + r_21 + s_12 - q_12
  std::array<Real, 4> d2;  // e.g. p_11 + r_22 + s_11 - q_11
};

/// Chain residuals of the two binary order-distances on the four tetrads,
/// computed through the generic chain test.
ChainResiduals d1_d2_chain_residuals(const System& system);

struct Theorem4Report {
  FineReport fine;
  ChainResiduals chain;
  Real max_discrepancy;
  bool exact = true;
};

/// Checks that each D1 residual equals -e_k and each D2 residual equals
/// e_k + 1, along with the marginal identities linking the table entries.
Theorem4Report verify_theorem4(const System& system, double tolerance = kDefaultLpTolerance);

/// True for two inputs with two values each, every treatment present and
/// binary outputs at every input point.
bool is_binary_2x2(const System& system);

}  // namespace selinf
