#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "selinf/probspace.hpp"
#include "selinf/real.hpp"

namespace selinf {

/// Value-label lookup with three scopes, most specific first: a single input
/// point (input name + input value), a whole input, then every variable.
template <class T>
class LabelMap {
 public:
  void set_global(const std::string& label, T v) { global_[label] = std::move(v); }
  void set_input(const std::string& input, const std::string& label, T v) { by_input_[input][label] = std::move(v); }
  void set_point(const std::string& input, const std::string& point, const std::string& label, T v) {
    by_point_[{input, point}][label] = std::move(v);
  }

  const T* find(const Axis& axis, const std::string& label) const {
    if (auto it = by_point_.find({axis.input, axis.point}); it != by_point_.end()) {
      if (auto jt = it->second.find(label); jt != it->second.end()) return &jt->second;
    }
    if (auto it = by_input_.find(axis.input); it != by_input_.end()) {
      if (auto jt = it->second.find(label); jt != it->second.end()) return &jt->second;
    }
    if (auto jt = global_.find(label); jt != global_.end()) return &jt->second;
    return nullptr;
  }

  bool empty() const { return global_.empty() && by_input_.empty() && by_point_.empty(); }

  template <class F>
  void for_each(F&& f) const {
    for (const auto& [k, v] : global_) f(k, v);
    for (const auto& [_, m] : by_input_)
      for (const auto& [k, v] : m) f(k, v);
    for (const auto& [_, m] : by_point_)
      for (const auto& [k, v] : m) f(k, v);
  }

 private:
  std::map<std::string, T> global_;
  std::map<std::string, std::map<std::string, T>> by_input_;
  std::map<std::pair<std::string, std::string>, std::map<std::string, T>> by_point_;
};

/// Total preorder on output values: a ⪯ b iff rank(a) <= rank(b).
class OrderSpec {
 public:
  OrderSpec() = default;
  explicit OrderSpec(LabelMap<long> ranks);

  /// Ranks every value by its position in the axis' value list (1-based).
  static OrderSpec listing_order() { OrderSpec o; o.listing_ = true; return o; }
  /// Explicit ranks where given, listing order elsewhere.
  static OrderSpec over_listing_order(LabelMap<long> ranks) {
    OrderSpec o(std::move(ranks));
    o.listing_ = true;
    return o;
  }

  long rank(const Axis& axis, const std::string& label) const;
  const LabelMap<long>& ranks() const noexcept { return ranks_; }

 private:
  LabelMap<long> ranks_;
  bool listing_ = false;
};

/// Ordered partition of the value sets into cells 1..n.
class Partition {
 public:
  Partition() = default;
  void add_global(const std::vector<std::vector<std::string>>& cells);
  void add_input(const std::string& input, const std::vector<std::vector<std::string>>& cells);
  void add_point(const std::string& input, const std::string& point, const std::vector<std::vector<std::string>>& cells);

  long cell(const Axis& axis, const std::string& label) const;

 private:
  LabelMap<long> cells_;
};

/// Numeric reading of value labels. Labels without an explicit entry are
/// parsed as numbers when `parse_labels` is set.
struct Embedding {
  LabelMap<Real> values;
  bool parse_labels = true;

  Real operator()(const Axis& axis, const std::string& label) const;
};

/// Distance table on a finite label set, used as the ground metric for
/// expected_ground.
class GroundMetric {
 public:
  GroundMetric(std::vector<std::string> labels, std::vector<Real> dist);

  /// |a-b| on numeric labels.
  static GroundMetric absolute_difference(const std::vector<std::string>& labels);
  /// 0 on the diagonal, 1 elsewhere.
  static GroundMetric discrete(const std::vector<std::string>& labels);

  const Real& operator()(const std::string& a, const std::string& b) const;
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  std::size_t index(const std::string& label) const;
  std::vector<std::string> labels_;
  std::vector<Real> dist_;
};

struct SeparationPoint {
  Real value;
  Real prob;
};

namespace detail {
struct MetricNode;
}

struct Power;
struct Bounded;
struct MaxWith;
struct SumWith;
struct Mixture;

/// A pseudo-quasi-metric evaluated on ordered-pair marginals. Immutable and
/// cheap to copy.
class Metric {
 public:
  static Metric order(OrderSpec order);
  static Metric classification(Partition partition);
  static Metric p(double p, Embedding embed = {});
  static Metric p_infinity(Embedding embed = {});
  static Metric entropy(double log_base = 2.0);
  static Metric frechet(Embedding embed = {});
  static Metric separation(std::vector<SeparationPoint> u, Embedding embed = {});
  static Metric expected_ground(GroundMetric ground);

  Real evaluate(const BivariateMarginal& m) const;
  Real operator()(const BivariateMarginal& m) const { return evaluate(m); }
  const std::string& name() const;
  /// Same distance under another name.
  Metric renamed(std::string name) const;

 private:
  friend Metric transform(const Metric& base, std::variant<Power, Bounded, MaxWith, SumWith, Mixture> t);
  static Metric make(std::string name, std::function<Real(const BivariateMarginal&)> eval);
  explicit Metric(std::shared_ptr<const detail::MetricNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const detail::MetricNode> node_;
};

struct Power {
  double q;
};
struct Bounded {};
struct MaxWith {
  Metric other;
};
struct SumWith {
  Metric other;
};
/// weights[0] applies to the base metric, weights[i+1] to others[i].
struct Mixture {
  std::vector<Metric> others;
  std::vector<Real> weights;
};
using Transform = std::variant<Power, Bounded, MaxWith, SumWith, Mixture>;

Metric transform(const Metric& base, Transform t);

inline constexpr double kDefaultEntropyBase = 2.0;
inline constexpr double kSupportEpsilon = 1e-12;

Real order_distance(const BivariateMarginal& m, const OrderSpec& order);
Real classification_distance(const BivariateMarginal& m, const Partition& partition);
Real p_distance(const BivariateMarginal& m, const Embedding& embed, double p);
Real p_infinity_distance(const BivariateMarginal& m, const Embedding& embed);
Real conditional_entropy(const BivariateMarginal& m, double log_base = kDefaultEntropyBase);
Real frechet_distance(const BivariateMarginal& m, const Embedding& embed);
Real expected_ground(const BivariateMarginal& m, const GroundMetric& ground);

/// Pr[embed(A) <= embed(U) < embed(B)] for a joint table over (A, U, B).
Real separation_distance(const JointTable& aub, const Embedding& embed);
/// Same, with U independent of (A, B).
Real separation_distance(const BivariateMarginal& m, std::span<const SeparationPoint> u, const Embedding& embed);

/// d(A,X) + d(X,B) - d(A,B); lies in [0,1] for order-distances from one
/// joint distribution.
Real triangle_defect(const Real& d_ax, const Real& d_xb, const Real& d_ab);
bool defect_consistent(const Real& defect, double tolerance = 0.0);

}  // namespace selinf
