#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "selinf/real.hpp"

namespace selinf {

inline constexpr double kDefaultSumTolerance = 1e-9;
inline constexpr std::size_t kMaxExplicitTreatments = 100000;

/// One deterministic factor and the values it can take.
struct Input {
  std::string name;
  std::vector<std::string> values;
};

/// An input together with one of its values, stored as indices into the
/// owning Design.
struct InputPoint {
  std::size_t input = 0;
  std::size_t value = 0;

  friend auto operator<=>(const InputPoint&, const InputPoint&) = default;
};

/// A treatment assigns a value index to every input, in input order.
using Treatment = std::vector<std::size_t>;

/// Inputs, their value sets and the allowable treatments. Explicit
/// treatment lists are kept in lexicographic order; a full factorial design
/// is never materialized.
class Design {
 public:
  /// `treatments == std::nullopt` means every combination is allowed.
  Design(std::vector<Input> inputs, std::optional<std::vector<Treatment>> treatments);

  const std::vector<Input>& inputs() const noexcept { return inputs_; }
  bool full() const noexcept { return full_; }

  std::size_t input_index(std::string_view name) const;
  std::size_t value_index(std::size_t input, std::string_view value) const;

  std::size_t treatment_count() const noexcept { return treatment_count_; }
  Treatment treatment(std::size_t index) const;
  std::optional<std::size_t> treatment_index(const Treatment& t) const;

  std::size_t point_count() const noexcept { return point_offset_.back(); }
  std::size_t point_id(InputPoint x) const { return point_offset_[x.input] + x.value; }
  InputPoint point(std::size_t id) const;
  std::string point_name(InputPoint x) const;

  bool contains(const Treatment& t, InputPoint x) const { return t[x.input] == x.value; }

  /// Lexicographically first treatment containing every point, if any.
  std::optional<std::size_t> first_treatment_containing(std::span<const InputPoint> points) const;

  std::string treatment_name(std::size_t index) const;

 private:
  std::vector<Input> inputs_;
  bool full_;
  std::vector<Treatment> explicit_;
  std::size_t treatment_count_ = 0;
  std::vector<std::size_t> point_offset_;
};

/// Axis of a joint table: a variable label, the input point it belongs to
/// (when it comes from a design) and its value labels.
struct Axis {
  std::string input;  // input name, or a free-form variable name
  std::string point;  // input value name; empty when not tied to a design
  std::vector<std::string> values;
};

/// Dense joint probability table over a product of finite value sets,
/// row-major with the last axis varying fastest.
class JointTable {
 public:
  JointTable() = default;
  JointTable(std::vector<Axis> axes, std::vector<Real> probs);
  static JointTable zeros(std::vector<Axis> axes);

  const std::vector<Axis>& axes() const noexcept { return axes_; }
  const std::vector<Real>& probs() const noexcept { return probs_; }
  std::vector<Real>& probs() noexcept { return probs_; }
  std::size_t size() const noexcept { return probs_.size(); }

  std::size_t flat_index(std::span<const std::size_t> coords) const;
  std::vector<std::size_t> coords(std::size_t flat) const;
  const Real& at(std::span<const std::size_t> coords) const { return probs_[flat_index(coords)]; }
  Real& at(std::span<const std::size_t> coords) { return probs_[flat_index(coords)]; }

  Real total() const;
  bool exact() const;

  /// Table over the listed axes (in that order), summing out the rest.
  JointTable marginal(std::span<const std::size_t> keep) const;

 private:
  std::vector<Axis> axes_;
  std::vector<Real> probs_;
};

/// Output value sets per input point.
class OutcomeSpace {
 public:
  OutcomeSpace() = default;
  /// `values[point_id]` is V for that input point.
  explicit OutcomeSpace(std::vector<std::vector<std::string>> values) : values_(std::move(values)) {}

  const std::vector<std::string>& values(const Design& d, InputPoint x) const { return values_.at(d.point_id(x)); }
  const std::vector<std::vector<std::string>>& all() const noexcept { return values_; }

 private:
  std::vector<std::vector<std::string>> values_;
};

struct TreatmentTable {
  std::size_t treatment = 0;  // index into Design
  JointTable table;           // one axis per input, in design order
};

enum class Arithmetic { Rational, Float };

/// A design, its outcome spaces and the observed tables.
struct System {
  Design design;
  OutcomeSpace outcomes;
  std::vector<TreatmentTable> tables;
  Arithmetic arithmetic = Arithmetic::Rational;

  const TreatmentTable* find(std::size_t treatment) const;
  const TreatmentTable& table(std::size_t treatment) const;
};

/// Empty table for a treatment, with axes taken from the outcome space.
JointTable empty_table(const Design& d, const OutcomeSpace& o, const Treatment& t);

struct ValidationIssue {
  enum class Kind { MissingTreatment, ExtraTreatment, DuplicateTreatment, NegativeProbability, SumNotOne, ValueSetMismatch };
  Kind kind;
  std::string treatment;
  std::string detail;
  Real delta;  // |sum - 1| for SumNotOne, the offending value for NegativeProbability
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const noexcept { return issues.empty(); }
};

std::string_view to_string(ValidationIssue::Kind k);

ValidationReport validate_system(const System& system, double sum_tolerance = kDefaultSumTolerance);

/// Throws the Error matching the first issue in the report, if any.
void require_valid(const System& system, double sum_tolerance = kDefaultSumTolerance);

/// Joint table of the outputs of the listed inputs (by name), in the order given.
JointTable marginalize(const System& system, const TreatmentTable& table, std::span<const std::string> inputs);

/// Ordered-pair marginal of two variables.
struct BivariateMarginal {
  Axis row;
  Axis col;
  std::vector<Real> probs;  // row-major

  std::size_t rows() const noexcept { return row.values.size(); }
  std::size_t cols() const noexcept { return col.values.size(); }
  const Real& at(std::size_t i, std::size_t j) const { return probs[i * cols() + j]; }
  Real& at(std::size_t i, std::size_t j) { return probs[i * cols() + j]; }
  Real row_marginal(std::size_t i) const;
  Real col_marginal(std::size_t j) const;
  bool exact() const;
};

BivariateMarginal bivariate(const JointTable& table, std::size_t axis1, std::size_t axis2);
BivariateMarginal bivariate(const System& system, const TreatmentTable& table, std::string_view input1,
                            std::string_view input2);

/// A variable paired with itself: probabilities on the diagonal only.
BivariateMarginal diagonal_coupling(const JointTable& table, std::size_t axis);

BivariateMarginal transpose(const BivariateMarginal& m);

}  // namespace selinf
