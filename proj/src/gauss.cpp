#include "selinf/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "selinf/error.hpp"

namespace selinf::gauss {

double binormal_order_distance(double rho) {
  if (!(rho >= -1.0 && rho <= 1.0))
    throw Error(ErrorCode::InvalidCorrelation, "correlation must lie in [-1, 1]");
  return std::acos(rho) / (2.0 * std::numbers::pi);
}

double saturating_correlation(double v, double w) { return std::min(1.0, v + w); }

namespace {

double field(const CorrelationField& rho, const ContinuousPoint& a, const ContinuousPoint& b) {
  if (a.input == b.input) throw Error(ErrorCode::SameInput, "consecutive points must belong to different inputs");
  const double v = a.input == 1 ? a.value : b.value;
  const double w = a.input == 1 ? b.value : a.value;
  return rho(v, w);
}

}  // namespace

ChainReport binormal_chain(const CorrelationField& rho, const std::vector<ContinuousPoint>& sequence) {
  const std::size_t l = sequence.size();
  if (l < 3) throw Error(ErrorCode::InvalidInput, "a chain needs at least three points");
  for (const auto& x : sequence) {
    if (x.input != 1 && x.input != 2) throw Error(ErrorCode::UnknownInput, "inputs are 1 and 2");
  }
  ChainReport r;
  r.metric = "order(A<0,B>=0)";
  // The quadrant probability is symmetric in (A, B), so the direction of a
  // pair does not matter.
  r.lhs = Real(binormal_order_distance(field(rho, sequence.front(), sequence.back())));
  Real sum(0.0);
  for (std::size_t i = 1; i < l; ++i) {
    r.rhs_terms.push_back(Real(binormal_order_distance(field(rho, sequence[i - 1], sequence[i]))));
    sum += r.rhs_terms.back();
  }
  r.residual = sum - r.lhs;
  r.violated = r.residual.to_double() < -kDefaultTestTolerance;
  return r;
}

ChainReport demo_chain_violation() {
  return binormal_chain(saturating_correlation, {{1, 0.0}, {2, 1.0}, {1, 1.0}, {2, 0.0}});
}

}  // namespace selinf::gauss
