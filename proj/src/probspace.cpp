#include "selinf/probspace.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "selinf/error.hpp"

namespace selinf {

Design::Design(std::vector<Input> inputs, std::optional<std::vector<Treatment>> treatments)
    : inputs_(std::move(inputs)), full_(!treatments.has_value()) {
  if (inputs_.empty()) throw Error(ErrorCode::InvalidInput, "design has no inputs");
  std::set<std::string> names;
  point_offset_.push_back(0);
  for (const auto& in : inputs_) {
    if (!names.insert(in.name).second) throw Error(ErrorCode::InvalidInput, "duplicate input '" + in.name + "'");
    if (in.values.empty()) throw Error(ErrorCode::InvalidInput, "input '" + in.name + "' has no values");
    std::set<std::string> vals(in.values.begin(), in.values.end());
    if (vals.size() != in.values.size())
      throw Error(ErrorCode::InvalidInput, "input '" + in.name + "' lists a value twice");
    point_offset_.push_back(point_offset_.back() + in.values.size());
  }

  if (full_) {
    std::size_t count = 1;
    for (const auto& in : inputs_) {
      if (count > std::numeric_limits<std::size_t>::max() / in.values.size())
        throw Error(ErrorCode::CapExceeded, "full factorial design is too large");
      count *= in.values.size();
    }
    treatment_count_ = count;
    return;
  }

  explicit_ = std::move(*treatments);
  if (explicit_.empty()) throw Error(ErrorCode::InvalidInput, "treatment set is empty");
  if (explicit_.size() > kMaxExplicitTreatments)
    throw Error(ErrorCode::CapExceeded, "more than " + std::to_string(kMaxExplicitTreatments) + " treatments");
  for (const auto& t : explicit_) {
    if (t.size() != inputs_.size())
      throw Error(ErrorCode::InvalidInput, "treatment does not assign every input exactly once");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] >= inputs_[i].values.size()) throw Error(ErrorCode::InvalidInput, "treatment value out of range");
    }
  }
  std::sort(explicit_.begin(), explicit_.end());
  if (std::adjacent_find(explicit_.begin(), explicit_.end()) != explicit_.end())
    throw Error(ErrorCode::InvalidInput, "duplicate treatment");
  treatment_count_ = explicit_.size();
}

std::size_t Design::input_index(std::string_view name) const {
  for (std::size_t i = 0; i < inputs_.size(); ++i) {
    if (inputs_[i].name == name) return i;
  }
  throw Error(ErrorCode::UnknownInput, "no input named '" + std::string(name) + "'");
}

std::size_t Design::value_index(std::size_t input, std::string_view value) const {
  const auto& vals = inputs_.at(input).values;
  auto it = std::find(vals.begin(), vals.end(), value);
  if (it == vals.end())
    throw Error(ErrorCode::InvalidInput,
                "input '" + inputs_[input].name + "' has no value '" + std::string(value) + "'");
  return static_cast<std::size_t>(it - vals.begin());
}

Treatment Design::treatment(std::size_t index) const {
  if (index >= treatment_count_) throw Error(ErrorCode::MissingTreatment, "treatment index out of range");
  if (!full_) return explicit_[index];
  Treatment t(inputs_.size());
  for (std::size_t i = inputs_.size(); i-- > 0;) {
    const std::size_t radix = inputs_[i].values.size();
    t[i] = index % radix;
    index /= radix;
  }
  return t;
}

std::optional<std::size_t> Design::treatment_index(const Treatment& t) const {
  if (t.size() != inputs_.size()) return std::nullopt;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= inputs_[i].values.size()) return std::nullopt;
  }
  if (full_) {
    std::size_t index = 0;
    for (std::size_t i = 0; i < t.size(); ++i) index = index * inputs_[i].values.size() + t[i];
    return index;
  }
  auto it = std::lower_bound(explicit_.begin(), explicit_.end(), t);
  if (it == explicit_.end() || *it != t) return std::nullopt;
  return static_cast<std::size_t>(it - explicit_.begin());
}

InputPoint Design::point(std::size_t id) const {
  auto it = std::upper_bound(point_offset_.begin(), point_offset_.end(), id);
  if (it == point_offset_.end()) throw Error(ErrorCode::InvalidInput, "input point id out of range");
  const std::size_t input = static_cast<std::size_t>(it - point_offset_.begin()) - 1;
  return {input, id - point_offset_[input]};
}

std::string Design::point_name(InputPoint x) const {
  return "(" + inputs_.at(x.input).name + "," + inputs_[x.input].values.at(x.value) + ")";
}

std::optional<std::size_t> Design::first_treatment_containing(std::span<const InputPoint> points) const {
  std::vector<std::optional<std::size_t>> fixed(inputs_.size());
  for (const auto& x : points) {
    if (fixed[x.input] && *fixed[x.input] != x.value) return std::nullopt;
    fixed[x.input] = x.value;
  }
  if (full_) {
    Treatment t(inputs_.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = fixed[i].value_or(0);
    return treatment_index(t);
  }
  for (std::size_t k = 0; k < explicit_.size(); ++k) {
    bool ok = true;
    for (std::size_t i = 0; i < inputs_.size() && ok; ++i) ok = !fixed[i] || explicit_[k][i] == *fixed[i];
    if (ok) return k;
  }
  return std::nullopt;
}

std::string Design::treatment_name(std::size_t index) const {
  const Treatment t = treatment(index);
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += inputs_[i].values[t[i]];
  }
  return s + ")";
}

// --- JointTable -------------------------------------------------------------

namespace {

std::size_t product_size(const std::vector<Axis>& axes) {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return n;
}

}  // namespace

JointTable::JointTable(std::vector<Axis> axes, std::vector<Real> probs)
    : axes_(std::move(axes)), probs_(std::move(probs)) {
  if (probs_.size() != product_size(axes_))
    throw Error(ErrorCode::InvalidInput, "table size does not match the product of its value sets");
}

JointTable JointTable::zeros(std::vector<Axis> axes) {
  const std::size_t n = product_size(axes);
  return JointTable(std::move(axes), std::vector<Real>(n));
}

std::size_t JointTable::flat_index(std::span<const std::size_t> coords) const {
  if (coords.size() != axes_.size()) throw Error(ErrorCode::InvalidInput, "coordinate rank mismatch");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (coords[i] >= axes_[i].values.size()) throw Error(ErrorCode::InvalidInput, "coordinate out of range");
    idx = idx * axes_[i].values.size() + coords[i];
  }
  return idx;
}

std::vector<std::size_t> JointTable::coords(std::size_t flat) const {
  std::vector<std::size_t> c(axes_.size());
  for (std::size_t i = axes_.size(); i-- > 0;) {
    c[i] = flat % axes_[i].values.size();
    flat /= axes_[i].values.size();
  }
  return c;
}

Real JointTable::total() const {
  Real sum;
  for (const auto& p : probs_) sum += p;
  return sum;
}

bool JointTable::exact() const {
  return std::all_of(probs_.begin(), probs_.end(), [](const Real& p) { return p.exact(); });
}

JointTable JointTable::marginal(std::span<const std::size_t> keep) const {
  std::vector<Axis> kept;
  for (std::size_t a : keep) {
    if (a >= axes_.size()) throw Error(ErrorCode::UnknownInput, "axis out of range");
    kept.push_back(axes_[a]);
  }
  JointTable out = zeros(std::move(kept));
  std::vector<std::size_t> c(axes_.size(), 0);
  std::vector<std::size_t> sub(keep.size());
  for (std::size_t flat = 0; flat < probs_.size(); ++flat) {
    for (std::size_t k = 0; k < keep.size(); ++k) sub[k] = c[keep[k]];
    out.at(sub) += probs_[flat];
    for (std::size_t i = axes_.size(); i-- > 0;) {
      if (++c[i] < axes_[i].values.size()) break;
      c[i] = 0;
    }
  }
  return out;
}

// --- System -----------------------------------------------------------------

const TreatmentTable* System::find(std::size_t treatment) const {
  for (const auto& t : tables) {
    if (t.treatment == treatment) return &t;
  }
  return nullptr;
}

const TreatmentTable& System::table(std::size_t treatment) const {
  if (const auto* t = find(treatment)) return *t;
  throw Error(ErrorCode::MissingTreatment, "no table for treatment " + design.treatment_name(treatment));
}

JointTable empty_table(const Design& d, const OutcomeSpace& o, const Treatment& t) {
  std::vector<Axis> axes;
  for (std::size_t i = 0; i < d.inputs().size(); ++i) {
    const InputPoint x{i, t[i]};
    axes.push_back({d.inputs()[i].name, d.inputs()[i].values[t[i]], o.values(d, x)});
  }
  return JointTable::zeros(std::move(axes));
}

std::string_view to_string(ValidationIssue::Kind k) {
  switch (k) {
    case ValidationIssue::Kind::MissingTreatment: return "MissingTreatment";
    case ValidationIssue::Kind::ExtraTreatment: return "ExtraTreatment";
    case ValidationIssue::Kind::DuplicateTreatment: return "DuplicateTreatment";
    case ValidationIssue::Kind::NegativeProbability: return "NegativeProbability";
    case ValidationIssue::Kind::SumNotOne: return "SumNotOne";
    case ValidationIssue::Kind::ValueSetMismatch: return "ValueSetMismatch";
  }
  return "Unknown";
}

ValidationReport validate_system(const System& system, double sum_tolerance) {
  using Kind = ValidationIssue::Kind;
  ValidationReport report;
  const Design& d = system.design;
  std::vector<int> seen(d.treatment_count(), 0);

  for (const auto& tt : system.tables) {
    if (tt.treatment >= d.treatment_count()) {
      report.issues.push_back({Kind::ExtraTreatment, "#" + std::to_string(tt.treatment), "not an allowable treatment", {}});
      continue;
    }
    const std::string name = d.treatment_name(tt.treatment);
    if (seen[tt.treatment]++) {
      report.issues.push_back({Kind::DuplicateTreatment, name, "more than one table", {}});
      continue;
    }
    const Treatment t = d.treatment(tt.treatment);
    const auto& axes = tt.table.axes();
    bool shape_ok = axes.size() == d.inputs().size();
    for (std::size_t i = 0; shape_ok && i < axes.size(); ++i) {
      shape_ok = axes[i].values == system.outcomes.values(d, {i, t[i]});
    }
    if (!shape_ok) {
      report.issues.push_back({Kind::ValueSetMismatch, name, "outcome value sets differ from the outcome space", {}});
      continue;
    }
    for (const auto& p : tt.table.probs()) {
      if (p.sign() < 0) {
        report.issues.push_back({Kind::NegativeProbability, name, "probability " + p.str(), p});
        break;
      }
    }
    const Real delta = abs(tt.table.total() - Real(1));
    const bool bad = delta.exact() ? !delta.is_zero() : delta.to_double() > sum_tolerance;
    if (bad) report.issues.push_back({Kind::SumNotOne, name, "probabilities sum to " + tt.table.total().str(), delta});
  }
  for (std::size_t k = 0; k < seen.size(); ++k) {
    if (!seen[k]) report.issues.push_back({Kind::MissingTreatment, d.treatment_name(k), "no table", {}});
  }
  return report;
}

void require_valid(const System& system, double sum_tolerance) {
  const auto report = validate_system(system, sum_tolerance);
  if (report.ok()) return;
  const auto& first = report.issues.front();
  ErrorCode code = ErrorCode::InvalidInput;
  switch (first.kind) {
    case ValidationIssue::Kind::MissingTreatment: code = ErrorCode::MissingTreatment; break;
    case ValidationIssue::Kind::NegativeProbability: code = ErrorCode::NegativeProbability; break;
    case ValidationIssue::Kind::SumNotOne: code = ErrorCode::SumNotOne; break;
    default: break;
  }
  throw Error(code, first.treatment + ": " + first.detail);
}

JointTable marginalize(const System& system, const TreatmentTable& table, std::span<const std::string> inputs) {
  std::vector<std::size_t> keep;
  for (const auto& name : inputs) keep.push_back(system.design.input_index(name));
  return table.table.marginal(keep);
}

// --- BivariateMarginal --------------------------------------------------------

Real BivariateMarginal::row_marginal(std::size_t i) const {
  Real s;
  for (std::size_t j = 0; j < cols(); ++j) s += at(i, j);
  return s;
}

Real BivariateMarginal::col_marginal(std::size_t j) const {
  Real s;
  for (std::size_t i = 0; i < rows(); ++i) s += at(i, j);
  return s;
}

bool BivariateMarginal::exact() const {
  return std::all_of(probs.begin(), probs.end(), [](const Real& p) { return p.exact(); });
}

BivariateMarginal bivariate(const JointTable& table, std::size_t axis1, std::size_t axis2) {
  if (axis1 == axis2) throw Error(ErrorCode::SameInput, "bivariate marginal needs two distinct variables");
  const std::size_t keep[] = {axis1, axis2};
  JointTable m = table.marginal(keep);
  return {m.axes()[0], m.axes()[1], m.probs()};
}

BivariateMarginal bivariate(const System& system, const TreatmentTable& table, std::string_view input1,
                            std::string_view input2) {
  return bivariate(table.table, system.design.input_index(input1), system.design.input_index(input2));
}

BivariateMarginal diagonal_coupling(const JointTable& table, std::size_t axis) {
  const std::size_t keep[] = {axis};
  JointTable m = table.marginal(keep);
  BivariateMarginal out{m.axes()[0], m.axes()[0], {}};
  const std::size_t n = out.rows();
  out.probs.assign(n * n, Real());
  for (std::size_t i = 0; i < n; ++i) out.at(i, i) = m.probs()[i];
  return out;
}

BivariateMarginal transpose(const BivariateMarginal& m) {
  BivariateMarginal t{m.col, m.row, std::vector<Real>(m.probs.size())};
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) t.at(j, i) = m.at(i, j);
  }
  return t;
}

}  // namespace selinf
