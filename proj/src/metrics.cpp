#include "selinf/metrics.hpp"

#include <cmath>
#include <sstream>
#include <type_traits>

#include "selinf/error.hpp"

namespace selinf {

namespace detail {

struct MetricNode {
  std::string name;
  std::function<Real(const BivariateMarginal&)> eval;
};

}  // namespace detail

// --- OrderSpec / Partition / Embedding ----------------------------------------

OrderSpec::OrderSpec(LabelMap<long> ranks) : ranks_(std::move(ranks)) {
  ranks_.for_each([](const std::string& label, long r) {
    if (r < 1) throw Error(ErrorCode::InvalidInput, "rank of '" + label + "' must be >= 1");
  });
}

long OrderSpec::rank(const Axis& axis, const std::string& label) const {
  if (const long* r = ranks_.find(axis, label)) return *r;
  if (listing_) {
    for (std::size_t i = 0; i < axis.values.size(); ++i) {
      if (axis.values[i] == label) return static_cast<long>(i) + 1;
    }
  }
  throw Error(ErrorCode::UnrankedValue, "value '" + label + "' of " + axis.input + " has no rank");
}

namespace {

template <class Set>
void add_cells(const std::vector<std::vector<std::string>>& cells, Set set) {
  for (std::size_t k = 0; k < cells.size(); ++k) {
    for (const auto& label : cells[k]) set(label, static_cast<long>(k) + 1);
  }
}

}  // namespace

void Partition::add_global(const std::vector<std::vector<std::string>>& cells) {
  add_cells(cells, [&](const std::string& l, long k) { cells_.set_global(l, k); });
}

void Partition::add_input(const std::string& input, const std::vector<std::vector<std::string>>& cells) {
  add_cells(cells, [&](const std::string& l, long k) { cells_.set_input(input, l, k); });
}

void Partition::add_point(const std::string& input, const std::string& point,
                          const std::vector<std::vector<std::string>>& cells) {
  add_cells(cells, [&](const std::string& l, long k) { cells_.set_point(input, point, l, k); });
}

long Partition::cell(const Axis& axis, const std::string& label) const {
  if (const long* k = cells_.find(axis, label)) return *k;
  throw Error(ErrorCode::ValueNotInPartition, "value '" + label + "' of " + axis.input + " is in no cell");
}

Real Embedding::operator()(const Axis& axis, const std::string& label) const {
  if (const Real* v = values.find(axis, label)) return *v;
  if (parse_labels) {
    try {
      return parse_real(label);
    } catch (const Error&) {
    }
  }
  throw Error(ErrorCode::InvalidInput, "value '" + label + "' of " + axis.input + " has no numeric embedding");
}

// --- GroundMetric -------------------------------------------------------------

GroundMetric::GroundMetric(std::vector<std::string> labels, std::vector<Real> dist)
    : labels_(std::move(labels)), dist_(std::move(dist)) {
  const std::size_t n = labels_.size();
  if (dist_.size() != n * n) throw Error(ErrorCode::InvalidInput, "ground metric must be a square table");
  auto d = [&](std::size_t i, std::size_t j) -> const Real& { return dist_[i * n + j]; };
  for (std::size_t i = 0; i < n; ++i) {
    if (!d(i, i).is_zero())
      throw Error(ErrorCode::GroundAxiomViolation, "d(" + labels_[i] + "," + labels_[i] + ") != 0");
    for (std::size_t j = 0; j < n; ++j) {
      if (d(i, j).sign() < 0)
        throw Error(ErrorCode::GroundAxiomViolation, "negative distance between " + labels_[i] + " and " + labels_[j]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        if (d(i, j) > d(i, k) + d(k, j))
          throw Error(ErrorCode::GroundAxiomViolation,
                      "triangle inequality fails for " + labels_[i] + "," + labels_[k] + "," + labels_[j]);
      }
    }
  }
}

GroundMetric GroundMetric::absolute_difference(const std::vector<std::string>& labels) {
  std::vector<Real> d;
  for (const auto& a : labels) {
    for (const auto& b : labels) d.push_back(abs(parse_real(a) - parse_real(b)));
  }
  return GroundMetric(labels, std::move(d));
}

GroundMetric GroundMetric::discrete(const std::vector<std::string>& labels) {
  std::vector<Real> d;
  for (const auto& a : labels) {
    for (const auto& b : labels) d.push_back(Real(a == b ? 0 : 1));
  }
  return GroundMetric(labels, std::move(d));
}

std::size_t GroundMetric::index(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return i;
  }
  throw Error(ErrorCode::InvalidInput, "value '" + label + "' is not covered by the ground metric");
}

const Real& GroundMetric::operator()(const std::string& a, const std::string& b) const {
  return dist_[index(a) * labels_.size() + index(b)];
}

// --- evaluators ---------------------------------------------------------------

namespace {

bool in_support(const Real& p) {
  return p.exact() ? p.sign() > 0 : p.to_double() > kSupportEpsilon;
}

template <class Cell>
Real expectation(const BivariateMarginal& m, Cell cell) {
  Real sum;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const Real& p = m.at(i, j);
      if (p.is_zero()) continue;
      sum += p * cell(i, j);
    }
  }
  return sum;
}

std::vector<Real> embed_axis(const Axis& axis, const Embedding& embed) {
  std::vector<Real> out;
  out.reserve(axis.values.size());
  for (const auto& v : axis.values) out.push_back(embed(axis, v));
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

Real order_distance(const BivariateMarginal& m, const OrderSpec& order) {
  std::vector<long> row_rank, col_rank;
  for (const auto& v : m.row.values) row_rank.push_back(order.rank(m.row, v));
  for (const auto& v : m.col.values) col_rank.push_back(order.rank(m.col, v));
  Real sum;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (row_rank[i] < col_rank[j]) sum += m.at(i, j);
    }
  }
  return sum;
}

Real classification_distance(const BivariateMarginal& m, const Partition& partition) {
  std::vector<long> row_cell, col_cell;
  for (const auto& v : m.row.values) row_cell.push_back(partition.cell(m.row, v));
  for (const auto& v : m.col.values) col_cell.push_back(partition.cell(m.col, v));
  Real sum;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (row_cell[i] < col_cell[j]) sum += m.at(i, j);
    }
  }
  return sum;
}

Real p_distance(const BivariateMarginal& m, const Embedding& embed, double p) {
  if (std::isinf(p)) return p_infinity_distance(m, embed);
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidP, "p must be >= 1, got " + format_double(p));
  const auto a = embed_axis(m.row, embed);
  const auto b = embed_axis(m.col, embed);
  const bool integral = std::floor(p) == p && p <= 64;
  const Real moment = expectation(m, [&](std::size_t i, std::size_t j) {
    const Real diff = abs(a[i] - b[j]);
    if (!integral) return Real(std::pow(diff.to_double(), p));
    Real r(1);
    for (int k = 0; k < static_cast<int>(p); ++k) r *= diff;
    return r;
  });
  if (p == 1.0) return moment;
  return Real(std::pow(moment.to_double(), 1.0 / p));
}

Real p_infinity_distance(const BivariateMarginal& m, const Embedding& embed) {
  const auto a = embed_axis(m.row, embed);
  const auto b = embed_axis(m.col, embed);
  Real best;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (in_support(m.at(i, j))) best = max(best, abs(a[i] - b[j]));
    }
  }
  return best;
}

Real conditional_entropy(const BivariateMarginal& m, double log_base) {
  if (!(log_base > 1.0)) throw Error(ErrorCode::InvalidInput, "entropy log base must exceed 1");
  const double scale = std::log(log_base);
  double h = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const double pb = m.col_marginal(j).to_double();
    if (pb <= 0.0) continue;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const double pab = m.at(i, j).to_double();
      if (pab <= 0.0) continue;
      h -= pab * std::log(pab / pb);
    }
  }
  // -0.0 and tiny negative rounding on deterministic couplings
  return Real(h <= 0.0 ? 0.0 : h / scale);
}

Real frechet_distance(const BivariateMarginal& m, const Embedding& embed) {
  const auto a = embed_axis(m.row, embed);
  const auto b = embed_axis(m.col, embed);
  return expectation(m, [&](std::size_t i, std::size_t j) {
    const Real diff = abs(a[i] - b[j]);
    return diff / (Real(1) + diff);
  });
}

Real expected_ground(const BivariateMarginal& m, const GroundMetric& ground) {
  return expectation(m, [&](std::size_t i, std::size_t j) { return ground(m.row.values[i], m.col.values[j]); });
}

Real separation_distance(const JointTable& aub, const Embedding& embed) {
  if (aub.axes().size() != 3) throw Error(ErrorCode::InvalidInput, "separation distance needs a table over (A,U,B)");
  std::vector<std::vector<Real>> e;
  for (const auto& axis : aub.axes()) e.push_back(embed_axis(axis, embed));
  Real sum;
  for (std::size_t flat = 0; flat < aub.size(); ++flat) {
    const auto c = aub.coords(flat);
    const Real& a = e[0][c[0]];
    const Real& u = e[1][c[1]];
    const Real& b = e[2][c[2]];
    if (a <= u && u < b) sum += aub.probs()[flat];
  }
  return sum;
}

Real separation_distance(const BivariateMarginal& m, std::span<const SeparationPoint> u, const Embedding& embed) {
  const auto a = embed_axis(m.row, embed);
  const auto b = embed_axis(m.col, embed);
  return expectation(m, [&](std::size_t i, std::size_t j) {
    Real mass;
    for (const auto& pt : u) {
      if (a[i] <= pt.value && pt.value < b[j]) mass += pt.prob;
    }
    return mass;
  });
}

Real triangle_defect(const Real& d_ax, const Real& d_xb, const Real& d_ab) { return d_ax + d_xb - d_ab; }

bool defect_consistent(const Real& defect, double tolerance) {
  if (defect.exact()) return defect.sign() >= 0 && defect <= Real(1);
  const double d = defect.to_double();
  return d >= -tolerance && d <= 1.0 + tolerance;
}

// --- Metric -------------------------------------------------------------------

Metric Metric::make(std::string name, std::function<Real(const BivariateMarginal&)> eval) {
  return Metric(std::make_shared<const detail::MetricNode>(detail::MetricNode{std::move(name), std::move(eval)}));
}

Real Metric::evaluate(const BivariateMarginal& m) const { return node_->eval(m); }

const std::string& Metric::name() const { return node_->name; }

Metric Metric::renamed(std::string name) const { return make(std::move(name), node_->eval); }

Metric Metric::order(OrderSpec order) {
  return make("order", [order = std::move(order)](const BivariateMarginal& m) { return order_distance(m, order); });
}

Metric Metric::classification(Partition partition) {
  return make("classification", [partition = std::move(partition)](const BivariateMarginal& m) {
    return classification_distance(m, partition);
  });
}

Metric Metric::p(double p, Embedding embed) {
  if (std::isinf(p)) return p_infinity(std::move(embed));
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidP, "p must be >= 1, got " + format_double(p));
  return make("p=" + format_double(p),
              [p, embed = std::move(embed)](const BivariateMarginal& m) { return p_distance(m, embed, p); });
}

Metric Metric::p_infinity(Embedding embed) {
  return make("p=inf", [embed = std::move(embed)](const BivariateMarginal& m) { return p_infinity_distance(m, embed); });
}

Metric Metric::entropy(double log_base) {
  if (!(log_base > 1.0)) throw Error(ErrorCode::InvalidInput, "entropy log base must exceed 1");
  return make("entropy(base=" + format_double(log_base) + ")",
              [log_base](const BivariateMarginal& m) { return conditional_entropy(m, log_base); });
}

Metric Metric::frechet(Embedding embed) {
  return make("frechet", [embed = std::move(embed)](const BivariateMarginal& m) { return frechet_distance(m, embed); });
}

Metric Metric::separation(std::vector<SeparationPoint> u, Embedding embed) {
  for (const auto& pt : u) {
    if (pt.prob.sign() < 0) throw Error(ErrorCode::NegativeProbability, "separation point with negative mass");
  }
  return make("separation", [u = std::move(u), embed = std::move(embed)](const BivariateMarginal& m) {
    return separation_distance(m, u, embed);
  });
}

Metric Metric::expected_ground(GroundMetric ground) {
  return make("expected_ground",
              [ground = std::move(ground)](const BivariateMarginal& m) { return selinf::expected_ground(m, ground); });
}

Metric transform(const Metric& base, Transform t) {
  return std::visit(
      [&base](auto&& tr) -> Metric {
        using T = std::decay_t<decltype(tr)>;
        if constexpr (std::is_same_v<T, Power>) {
          if (!(tr.q > 0.0) || tr.q > 1.0)
            throw Error(ErrorCode::InvalidExponent, "power transform needs 0 < q <= 1, got " + format_double(tr.q));
          const double q = tr.q;
          return Metric::make("power(" + format_double(q) + "," + base.name() + ")",
                              [b = base, q](const BivariateMarginal& m) {
                                Real d = b.evaluate(m);
                                if (q == 1.0) return d;
                                return Real(std::pow(d.to_double(), q));
                              });
        } else if constexpr (std::is_same_v<T, Bounded>) {
          return Metric::make("bounded(" + base.name() + ")", [b = base](const BivariateMarginal& m) {
            Real d = b.evaluate(m);
            return d / (Real(1) + d);
          });
        } else if constexpr (std::is_same_v<T, MaxWith>) {
          return Metric::make("max(" + base.name() + "," + tr.other.name() + ")",
                              [b = base, o = tr.other](const BivariateMarginal& m) {
                                return max(b.evaluate(m), o.evaluate(m));
                              });
        } else if constexpr (std::is_same_v<T, SumWith>) {
          return Metric::make("sum(" + base.name() + "," + tr.other.name() + ")",
                              [b = base, o = tr.other](const BivariateMarginal& m) {
                                return b.evaluate(m) + o.evaluate(m);
                              });
        } else {
          if (tr.weights.size() != tr.others.size() + 1)
            throw Error(ErrorCode::InvalidInput, "mixture needs one weight per member, base included");
          for (const auto& w : tr.weights) {
            if (w.sign() < 0) throw Error(ErrorCode::InvalidInput, "mixture weights must be nonnegative");
          }
          std::vector<Metric> members{base};
          members.insert(members.end(), tr.others.begin(), tr.others.end());
          std::string name = "mixture(";
          for (std::size_t i = 0; i < members.size(); ++i) name += (i ? "," : "") + members[i].name();
          return Metric::make(name + ")", [members, w = tr.weights](const BivariateMarginal& m) {
            Real sum;
            for (std::size_t i = 0; i < members.size(); ++i) {
              if (!w[i].is_zero()) sum += w[i] * members[i].evaluate(m);
            }
            return sum;
          });
        }
      },
      std::move(t));
}

}  // namespace selinf
