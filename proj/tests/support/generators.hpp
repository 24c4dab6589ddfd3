#pragma once

// Random systems, metrics and numeric oracles shared by the unit and
// acceptance tests. Everything is driven by an explicit seed.

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "selinf/metrics.hpp"
#include "selinf/probspace.hpp"

namespace selinf::testgen {

using Rng = std::mt19937_64;

inline long uniform(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

/// Exact distribution on n cells; roughly `zero_prob` of the cells are empty.
inline std::vector<Real> random_distribution(Rng& rng, std::size_t n, long den = 12, double zero_prob = 0.3) {
  std::vector<long> w(n, 0);
  long total = 0;
  for (auto& x : w) {
    x = coin(rng, zero_prob) ? 0 : uniform(rng, 1, den);
    total += x;
  }
  if (total == 0) {
    w[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(n) - 1))] = 1;
    total = 1;
  }
  std::vector<Real> out;
  for (long x : w) out.push_back(Real::ratio(x, total));
  return out;
}

inline std::vector<std::string> labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
  return out;
}

/// Joint table over free variables A, X, B with the given value counts.
inline JointTable random_trivariate(Rng& rng, std::size_t na, std::size_t nx, std::size_t nb, long den = 12) {
  std::vector<Axis> axes{{"A", "", labels(na)}, {"X", "", labels(nx)}, {"B", "", labels(nb)}};
  return JointTable(std::move(axes), random_distribution(rng, na * nx * nb, den));
}

/// Joint table over free variables V0..V(k-1).
inline JointTable random_joint(Rng& rng, const std::vector<std::size_t>& sizes, long den = 12) {
  std::vector<Axis> axes;
  std::size_t cells = 1;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    axes.push_back({"V" + std::to_string(i), "", labels(sizes[i])});
    cells *= sizes[i];
  }
  return JointTable(std::move(axes), random_distribution(rng, cells, den));
}

inline System empty_system(const Design& design, const OutcomeSpace& outcomes) {
  System s{design, outcomes, {}, Arithmetic::Rational};
  for (std::size_t k = 0; k < design.treatment_count(); ++k)
    s.tables.push_back({k, empty_table(design, outcomes, design.treatment(k))});
  return s;
}

inline OutcomeSpace uniform_outcomes(const Design& design, const std::vector<std::string>& values) {
  return OutcomeSpace(std::vector<std::vector<std::string>>(design.point_count(), values));
}

/// Marginalizes an explicit joint distribution over all input points
/// (`hidden[h][point_id]` is an output index, `weights[h]` its mass).
inline System system_from_hidden(const Design& design, const OutcomeSpace& outcomes,
                                 const std::vector<std::vector<std::size_t>>& hidden, const std::vector<Real>& weights) {
  System s = empty_system(design, outcomes);
  for (auto& tt : s.tables) {
    const Treatment t = design.treatment(tt.treatment);
    std::vector<std::size_t> coords(t.size());
    for (std::size_t h = 0; h < hidden.size(); ++h) {
      for (std::size_t i = 0; i < t.size(); ++i) coords[i] = hidden[h][design.point_id({i, t[i]})];
      tt.table.at(coords) += weights[h];
    }
  }
  return s;
}

/// A system that satisfies the joint distribution criterion by construction.
inline System random_hidden_system(Rng& rng, const Design& design, const OutcomeSpace& outcomes, std::size_t support,
                                   long den = 12) {
  std::vector<std::vector<std::size_t>> hidden;
  for (std::size_t h = 0; h < support; ++h) {
    std::vector<std::size_t> v(design.point_count());
    for (std::size_t pid = 0; pid < v.size(); ++pid)
      v[pid] = static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(outcomes.all()[pid].size()) - 1));
    hidden.push_back(std::move(v));
  }
  return system_from_hidden(design, outcomes, hidden, random_distribution(rng, support, den, 0.0));
}

inline Design design_2x2() { return Design({{"A", {"x", "x'"}}, {"B", {"y", "y'"}}}, std::nullopt); }

using Cells = std::array<std::array<Real, 2>, 2>;

/// The four tables of treatments (x,y), (x,y'), (x',y), (x',y'); rows are
/// the output of A, columns that of B, each listed as ("1", "0").
inline System system_2x2(const Cells& p, const Cells& q, const Cells& r, const Cells& s) {
  const Design d = design_2x2();
  System sys = empty_system(d, uniform_outcomes(d, {"1", "0"}));
  const Cells* tables[] = {&p, &q, &r, &s};
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) sys.tables[k].table.probs()[i * 2 + j] = (*tables[k])[i][j];
    }
  }
  return sys;
}

inline Cells cells(long den, long a, long b, long c, long d) {
  return {{{Real::ratio(a, den), Real::ratio(b, den)}, {Real::ratio(c, den), Real::ratio(d, den)}}};
}

/// Marginally selective system with binary outputs: a mixture of components
/// in which one pair of inputs is coupled (the coupling depending only on
/// the two input points) and every other output is independent. Output "1"
/// is listed first. Each marginal is 1/2 with probability `fair`.
inline System random_pair_coupled(Rng& rng, const Design& design, std::size_t components = 2, long den = 12,
                                  double fair = 0.5) {
  const std::size_t n = design.inputs().size();
  const OutcomeSpace outcomes = uniform_outcomes(design, {"1", "0"});
  System s = empty_system(design, outcomes);
  const auto mix = random_distribution(rng, components, den, 0.0);
  for (std::size_t c = 0; c < components; ++c) {
    std::vector<long> a(design.point_count());
    // fair marginals half the time leave the couplings the most room
    for (auto& x : a) x = coin(rng, fair) ? den / 2 : uniform(rng, 0, den);
    std::size_t ci = 0, cj = 0;
    if (n > 1) {
      ci = static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(n) - 1));
      do {
        cj = static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(n) - 1));
      } while (cj == ci);
    }
    // p11[(wi, wj)] on the den grid within the Frechet bounds
    std::vector<std::vector<long>> p11;
    if (n > 1) {
      p11.assign(design.inputs()[ci].values.size(), std::vector<long>(design.inputs()[cj].values.size()));
      for (std::size_t wi = 0; wi < p11.size(); ++wi) {
        for (std::size_t wj = 0; wj < p11[wi].size(); ++wj) {
          const long ka = a[design.point_id({ci, wi})];
          const long kb = a[design.point_id({cj, wj})];
          const long lo = std::max(0L, ka + kb - den), hi = std::min(ka, kb);
          // the bounds themselves (extreme couplings) a third of the time each
          const long pick = uniform(rng, 0, 2);
          p11[wi][wj] = pick == 0 ? lo : pick == 1 ? hi : uniform(rng, lo, hi);
        }
      }
    }
    for (auto& tt : s.tables) {
      const Treatment t = design.treatment(tt.treatment);
      for (std::size_t flat = 0; flat < tt.table.size(); ++flat) {
        const auto o = tt.table.coords(flat);  // 0 is "1", 1 is "0"
        Real p = mix[c];
        for (std::size_t i = 0; i < n; ++i) {
          if (n > 1 && (i == ci || i == cj)) continue;
          const long k = a[design.point_id({i, t[i]})];
          p *= Real::ratio(o[i] == 0 ? k : den - k, den);
        }
        if (n > 1) {
          const long ka = a[design.point_id({ci, t[ci]})];
          const long kb = a[design.point_id({cj, t[cj]})];
          const long k11 = p11[t[ci]][t[cj]];
          const long cell = o[ci] == 0 ? (o[cj] == 0 ? k11 : ka - k11) : (o[cj] == 0 ? kb - k11 : den - ka - kb + k11);
          p *= Real::ratio(cell, den);
        }
        tt.table.probs()[flat] += p;
      }
    }
  }
  return s;
}

/// Random marginally selective 2x2 system with binary outputs on a grid of
/// step 1/den, so that boundary cases of the Fine inequalities occur.
inline System random_2x2_binary(Rng& rng, long den = 12) {
  return random_pair_coupled(rng, design_2x2(), coin(rng, 0.75) ? 1 : 2, den);
}

/// 2..max_inputs inputs with 2..max_values values; restricted designs keep
/// each treatment with probability 1/2.
inline Design random_design(Rng& rng, std::size_t max_inputs, std::size_t max_values, bool restricted) {
  const auto n = static_cast<std::size_t>(uniform(rng, 2, static_cast<long>(max_inputs)));
  std::vector<Input> inputs;
  std::size_t product = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(uniform(rng, 2, static_cast<long>(max_values)));
    Input in{std::string(1, static_cast<char>('A' + i)), {}};
    for (std::size_t w = 0; w < k; ++w) in.values.push_back(std::string(1, static_cast<char>('a' + i)) + std::to_string(w + 1));
    inputs.push_back(std::move(in));
    product *= k;
  }
  if (!restricted) return Design(std::move(inputs), std::nullopt);
  std::vector<Treatment> kept;
  while (kept.empty()) {
    for (std::size_t flat = 0; flat < product; ++flat) {
      if (!coin(rng)) continue;
      Treatment t(n);
      std::size_t rest = flat;
      for (std::size_t i = n; i-- > 0;) {
        t[i] = rest % inputs[i].values.size();
        rest /= inputs[i].values.size();
      }
      kept.push_back(t);
    }
  }
  return Design(std::move(inputs), std::move(kept));
}

/// Ranks 1..max_rank for every label of the named variables.
inline OrderSpec random_order(Rng& rng, const std::vector<std::string>& variables, std::size_t n_labels, long max_rank = 4) {
  LabelMap<long> ranks;
  for (const auto& v : variables) {
    for (std::size_t i = 0; i < n_labels; ++i) ranks.set_input(v, std::to_string(i), uniform(rng, 1, max_rank));
  }
  return OrderSpec(std::move(ranks));
}

inline Partition random_partition(Rng& rng, const std::vector<std::string>& variables, std::size_t n_labels) {
  Partition p;
  for (const auto& v : variables) {
    const auto n_cells = static_cast<std::size_t>(uniform(rng, 1, static_cast<long>(n_labels)));
    std::vector<std::vector<std::string>> cells(n_cells);
    for (std::size_t i = 0; i < n_labels; ++i) cells[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(n_cells) - 1))].push_back(std::to_string(i));
    std::erase_if(cells, [](const auto& c) { return c.empty(); });
    p.add_input(v, cells);
  }
  return p;
}

/// Integer embedding in [-3, 3] per variable and label.
inline Embedding random_embedding(Rng& rng, const std::vector<std::string>& variables, std::size_t n_labels) {
  Embedding e;
  e.parse_labels = false;
  for (const auto& v : variables) {
    for (std::size_t i = 0; i < n_labels; ++i) e.values.set_input(v, std::to_string(i), Real(uniform(rng, -3, 3)));
  }
  return e;
}

/// |e(a) - e(b)| for a random integer embedding: always a metric.
inline GroundMetric random_ground(Rng& rng, std::size_t n_labels) {
  std::vector<long> e(n_labels);
  for (auto& x : e) x = uniform(rng, -3, 3);
  std::vector<Real> dist;
  for (std::size_t i = 0; i < n_labels; ++i) {
    for (std::size_t j = 0; j < n_labels; ++j) dist.push_back(Real(std::abs(e[i] - e[j])));
  }
  return GroundMetric(labels(n_labels), std::move(dist));
}

/// One instance of every metric kind over the named variables, with labels
/// "0".."n_labels-1", followed by every transform applied to random bases.
inline std::vector<Metric> metric_zoo(Rng& rng, const std::vector<std::string>& variables, std::size_t n_labels) {
  std::vector<Metric> base{
      Metric::order(random_order(rng, variables, n_labels)),
      Metric::classification(random_partition(rng, variables, n_labels)),
      Metric::p(1.0, random_embedding(rng, variables, n_labels)),
      Metric::p(2.0, random_embedding(rng, variables, n_labels)),
      Metric::p_infinity(random_embedding(rng, variables, n_labels)),
      Metric::entropy(2.0),
      Metric::frechet(random_embedding(rng, variables, n_labels)),
      Metric::expected_ground(random_ground(rng, n_labels)),
  };
  auto pick = [&]() { return base[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(base.size()) - 1))]; };
  std::vector<Metric> out = base;
  out.push_back(transform(pick(), Power{static_cast<double>(uniform(rng, 1, 10)) / 10.0}));
  out.push_back(transform(pick(), Bounded{}));
  out.push_back(transform(pick(), MaxWith{pick()}));
  out.push_back(transform(pick(), SumWith{pick()}));
  out.push_back(transform(pick(), Mixture{{pick(), pick()}, random_distribution(rng, 3, 6, 0.0)}));
  return out;
}

/// Pr[A < 0, B >= 0] for a standard bivariate normal pair, by Simpson's rule
/// on the integral of phi(a) * Phi(rho a / sqrt(1 - rho^2)) over a < 0.
inline double quadrant_probability_quadrature(double rho, int intervals = 20000) {
  const double s = std::sqrt(1.0 - rho * rho);
  auto f = [&](double a) {
    const double phi = std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
    const double cdf = 0.5 * std::erfc(-(rho * a / s) / std::numbers::sqrt2);
    return phi * cdf;
  };
  const double lo = -10.0, hi = 0.0, h = (hi - lo) / intervals;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < intervals; ++i) sum += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

}  // namespace selinf::testgen
