#pragma once

#include <functional>
#include <vector>

#include "selinf/selectivity.hpp"

namespace selinf::gauss {

/// Pr[A < 0, B >= 0] for a standard bivariate normal pair with correlation
/// rho, i.e. arccos(rho) / (2 pi).
double binormal_order_distance(double rho);

/// Correlation of (A^1, A^2) under treatment (v, w) of the unit-square design.
using CorrelationField = std::function<double(double v, double w)>;

/// rho(v, w) = min(1, v + w).
double saturating_correlation(double v, double w);

/// Input point of the two-input design with values in [0, 1].
struct ContinuousPoint {
  int input;  // 1 or 2
  double value;
};

/// Chain test of the order-distance "A < 0 and B >= 0" over a sequence of
/// points alternating between the two inputs, using the closed form for
/// every term.
ChainReport binormal_chain(const CorrelationField& rho, const std::vector<ContinuousPoint>& sequence);

/// The sequence (1,0), (2,1), (1,1), (2,0) under rho = min(1, v + w).
ChainReport demo_chain_violation();

}  // namespace selinf::gauss
