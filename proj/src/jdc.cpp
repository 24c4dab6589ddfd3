#include "selinf/jdc.hpp"

#include <algorithm>
#include <map>

#include "selinf/error.hpp"
#include "selinf/metrics.hpp"
#include "selinf/selectivity.hpp"
#include "selinf/simplex.hpp"

namespace selinf {

// --- problem construction ---------------------------------------------------------

JdcProblem build_jdc(const System& system, const JdcOptions& options) {
  require_valid(system, options.sum_tolerance);
  const Design& d = system.design;
  JdcProblem p(system);
  std::size_t product = 1;
  bool overflow = false;
  for (const auto& values : system.outcomes.all()) {
    p.radices_.push_back(values.size());
    if (product > options.hidden_cap || values.size() > options.hidden_cap) {
      overflow = true;
    } else {
      product *= values.size();
    }
  }
  if (overflow || product > options.hidden_cap) {
    throw Error(ErrorCode::HiddenSpaceTooLarge,
                "hidden space has " + (overflow ? std::string("more than ") + std::to_string(options.hidden_cap)
                                                : std::to_string(product)) +
                    " assignments; cap is " + std::to_string(options.hidden_cap));
  }
  p.variables_ = product;
  for (std::size_t k = 0; k < d.treatment_count(); ++k) {
    const auto& table = system.table(k).table;
    for (std::size_t o = 0; o < table.size(); ++o) {
      p.constraints_.push_back({k, o, table.probs()[o]});
      p.exact_ = p.exact_ && table.probs()[o].exact();
    }
  }
  return p;
}

std::vector<std::size_t> JdcProblem::hidden_values(std::size_t h) const {
  std::vector<std::size_t> v(radices_.size());
  for (std::size_t i = radices_.size(); i-- > 0;) {
    v[i] = h % radices_[i];
    h /= radices_[i];
  }
  return v;
}

namespace {

/// Per-treatment point ids, used to project hidden assignments.
std::vector<std::vector<std::size_t>> treatment_points(const Design& d) {
  std::vector<std::vector<std::size_t>> out(d.treatment_count());
  for (std::size_t k = 0; k < d.treatment_count(); ++k) {
    const Treatment t = d.treatment(k);
    for (std::size_t i = 0; i < t.size(); ++i) out[k].push_back(d.point_id({i, t[i]}));
  }
  return out;
}

std::size_t project_values(const std::vector<std::size_t>& hv, const std::vector<std::size_t>& points,
                           const std::vector<std::size_t>& radices) {
  std::size_t flat = 0;
  for (std::size_t pid : points) flat = flat * radices[pid] + hv[pid];
  return flat;
}

}  // namespace

std::size_t JdcProblem::project(std::size_t h, std::size_t treatment) const {
  const Design& d = system_.design;
  const Treatment t = d.treatment(treatment);
  const auto hv = hidden_values(h);
  std::size_t flat = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const std::size_t pid = d.point_id({i, t[i]});
    flat = flat * radices_[pid] + hv[pid];
  }
  return flat;
}

int JdcProblem::coefficient(std::size_t row, std::size_t col) const {
  const auto& c = constraints_.at(row);
  return project(col, c.treatment) == c.outcome ? 1 : 0;
}

// --- verification -----------------------------------------------------------------

namespace {

bool close_enough(const Real& diff, double tolerance) {
  return diff.exact() ? diff.is_zero() : std::abs(diff.to_double()) <= tolerance;
}

}  // namespace

bool verify_witness(const JdcProblem& problem, std::span<const Real> q, double tolerance) {
  if (q.size() != problem.variable_count()) return false;
  const System& sys = problem.system();
  const auto points = treatment_points(sys.design);
  for (const auto& v : q) {
    if (v.exact() ? v.sign() < 0 : v.to_double() < -tolerance) return false;
  }
  for (std::size_t k = 0; k < sys.design.treatment_count(); ++k) {
    const auto& table = sys.table(k).table;
    std::vector<Real> pushed(table.size());
    for (std::size_t h = 0; h < q.size(); ++h) {
      if (q[h].is_zero()) continue;
      pushed[project_values(problem.hidden_values(h), points[k], problem.radices())] += q[h];
    }
    for (std::size_t o = 0; o < table.size(); ++o) {
      if (!close_enough(pushed[o] - table.probs()[o], tolerance)) return false;
    }
  }
  return true;
}

bool verify_certificate(const JdcProblem& problem, std::span<const Real> y, double tolerance) {
  if (y.size() != problem.constraint_count()) return false;
  const System& sys = problem.system();
  const auto points = treatment_points(sys.design);
  // Row offsets per treatment; constraints are stored treatment by treatment.
  std::vector<std::size_t> offset(sys.design.treatment_count() + 1, 0);
  for (const auto& c : problem.constraints()) offset[c.treatment + 1] = std::max(offset[c.treatment + 1], c.outcome + 1);
  for (std::size_t k = 0; k < sys.design.treatment_count(); ++k) offset[k + 1] += offset[k];

  Real yb;
  for (std::size_t r = 0; r < y.size(); ++r) yb += y[r] * problem.constraints()[r].rhs;
  if (yb.exact() ? yb.sign() >= 0 : yb.to_double() >= -tolerance) return false;

  for (std::size_t h = 0; h < problem.variable_count(); ++h) {
    const auto hv = problem.hidden_values(h);
    Real col;
    for (std::size_t k = 0; k < sys.design.treatment_count(); ++k) {
      col += y[offset[k] + project_values(hv, points[k], problem.radices())];
    }
    if (col.exact() ? col.sign() < 0 : col.to_double() < -tolerance) return false;
  }
  return true;
}

// --- solving --------------------------------------------------------------------------

namespace {

template <class T>
T to_scalar(const Real& r);

template <>
mpq_class to_scalar<mpq_class>(const Real& r) {
  return r.rational();
}

template <>
double to_scalar<double>(const Real& r) {
  return r.to_double();
}

Real from_scalar(const mpq_class& v) { return Real(v); }
Real from_scalar(double v) { return Real(v); }

/// A row of the reduced system: the probability that the outputs at the
/// points of one treatment restricted to `inputs` take the non-last values
/// `values`. These rows are linearly independent, and under marginal
/// selectivity they span the full constraint set.
struct ReducedRow {
  std::vector<std::size_t> points;  // point ids
  std::vector<std::size_t> values;  // output index per point, never the last one
  std::size_t treatment;            // representative treatment
  std::vector<std::size_t> inputs;  // the sub-collection, as input indices
  Real rhs;
};

std::vector<ReducedRow> reduced_rows(const System& sys) {
  const Design& d = sys.design;
  const std::size_t n = d.inputs().size();
  if (n > 20) throw Error(ErrorCode::HiddenSpaceTooLarge, "too many inputs for the reduced LP");
  std::vector<ReducedRow> rows;
  for (unsigned long mask = 0; mask < (1UL << n); ++mask) {
    std::vector<std::size_t> inputs;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1UL << i)) inputs.push_back(i);
    }
    std::map<std::vector<std::size_t>, std::size_t> seen;  // restricted treatment -> representative
    for (std::size_t k = 0; k < d.treatment_count(); ++k) {
      const Treatment t = d.treatment(k);
      std::vector<std::size_t> points;
      for (std::size_t i : inputs) points.push_back(d.point_id({i, t[i]}));
      if (!seen.emplace(points, k).second) continue;

      const JointTable m = sys.table(k).table.marginal(inputs);
      std::vector<std::size_t> sizes;
      for (const auto& a : m.axes()) sizes.push_back(a.values.size());
      std::vector<std::size_t> v(inputs.size(), 0);
      bool any = std::all_of(sizes.begin(), sizes.end(), [](std::size_t s) { return s >= 2; });
      if (inputs.empty()) any = true;
      while (any) {
        rows.push_back({points, v, k, inputs, m.at(v)});
        std::size_t i = v.size();
        while (i-- > 0) {
          if (++v[i] + 1 < sizes[i]) break;
          v[i] = 0;
        }
        if (i == static_cast<std::size_t>(-1)) break;
      }
    }
  }
  return rows;
}

/// y with y^T A = 0 and y^T b != 0, from two treatments whose marginals on a
/// shared sub-collection differ.
std::vector<Real> selectivity_certificate(const JdcProblem& problem, const MarginalDiscrepancy& w) {
  const System& sys = problem.system();
  const JointTable ma = sys.table(w.treatment_a).table.marginal(w.inputs);
  const JointTable mb = sys.table(w.treatment_b).table.marginal(w.inputs);
  std::size_t cell = 0;
  Real best;
  for (std::size_t i = 0; i < ma.size(); ++i) {
    const Real diff = abs(ma.probs()[i] - mb.probs()[i]);
    if (diff > best) best = diff, cell = i;
  }
  const Real diff = ma.probs()[cell] - mb.probs()[cell];
  const Real sign = diff.sign() > 0 ? Real(-1) : Real(1);
  const auto target = ma.coords(cell);

  std::vector<Real> y(problem.constraint_count());
  for (std::size_t r = 0; r < y.size(); ++r) {
    const auto& c = problem.constraints()[r];
    if (c.treatment != w.treatment_a && c.treatment != w.treatment_b) continue;
    const auto full = sys.table(c.treatment).table.coords(c.outcome);
    bool match = true;
    for (std::size_t j = 0; j < w.inputs.size() && match; ++j) match = full[w.inputs[j]] == target[j];
    if (!match) continue;
    y[r] = c.treatment == w.treatment_a ? sign : -sign;
  }
  return y;
}

template <class T>
JdcVerdict solve_reduced(const JdcProblem& problem, const std::vector<ReducedRow>& rows, const JdcOptions& options) {
  const std::size_t cols = problem.variable_count();
  lp::EqualityProblem<T> lp;
  lp.rows = rows.size();
  lp.cols = cols;
  lp.a.assign(lp.rows * cols, T(0));
  for (std::size_t r = 0; r < rows.size(); ++r) lp.b.push_back(to_scalar<T>(rows[r].rhs));
  for (std::size_t h = 0; h < cols; ++h) {
    const auto hv = problem.hidden_values(h);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      bool hit = true;
      for (std::size_t j = 0; j < rows[r].points.size() && hit; ++j) hit = hv[rows[r].points[j]] == rows[r].values[j];
      if (hit) lp.at(r, h) = 1;
    }
  }

  const std::size_t pivot_limit = std::is_same_v<T, double> ? 50 * (lp.rows + lp.cols) : 0;
  const auto result = lp::solve_phase1(lp, pivot_limit);

  JdcVerdict v;
  v.exact = std::is_same_v<T, mpq_class>;
  v.pivots = result.pivots;
  v.lp_rows = lp.rows;
  if (result.feasible) {
    v.feasible = true;
    for (const auto& x : result.x) v.witness.push_back(from_scalar(x));
    return v;
  }

  // Spread each reduced multiplier over the full-table rows that sum to it.
  const System& sys = problem.system();
  std::vector<std::size_t> offset(sys.design.treatment_count() + 1, 0);
  for (const auto& c : problem.constraints()) offset[c.treatment + 1] = std::max(offset[c.treatment + 1], c.outcome + 1);
  for (std::size_t k = 0; k < sys.design.treatment_count(); ++k) offset[k + 1] += offset[k];
  std::vector<T> y(problem.constraint_count(), T(0));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (lp::Tolerance<T>::zero(result.farkas[r]) && std::is_same_v<T, double>) continue;
    const auto& row = rows[r];
    const auto& table = sys.table(row.treatment).table;
    for (std::size_t o = 0; o < table.size(); ++o) {
      const auto c = table.coords(o);
      bool match = true;
      for (std::size_t j = 0; j < row.inputs.size() && match; ++j) match = c[row.inputs[j]] == row.values[j];
      if (match) y[offset[row.treatment] + o] += result.farkas[r];
    }
  }
  v.feasible = false;
  for (const auto& e : y) v.certificate.push_back(from_scalar(e));
  v.reason = "no joint distribution reproduces every treatment table";
  (void)options;
  return v;
}

}  // namespace

JdcVerdict jdc_feasible(const JdcProblem& problem, const JdcOptions& options) {
  const System& sys = problem.system();
  const double tol = problem.exact() ? 0.0 : options.lp_tolerance;

  const auto selectivity = check_marginal_selectivity(sys, options.lp_tolerance);
  if (!selectivity.selective) {
    JdcVerdict v;
    v.exact = problem.exact();
    v.feasible = false;
    v.certificate = selectivity_certificate(problem, *selectivity.witness);
    v.reason = "marginal selectivity fails";
    if (!verify_certificate(problem, v.certificate, tol))
      throw Error(ErrorCode::NumericalInstability, "marginal selectivity certificate did not verify");
    return v;
  }

  const auto rows = reduced_rows(sys);
  JdcVerdict v = problem.exact() ? solve_reduced<mpq_class>(problem, rows, options)
                                 : solve_reduced<double>(problem, rows, options);
  const bool ok = v.feasible ? verify_witness(problem, v.witness, 10 * tol) : verify_certificate(problem, v.certificate, 10 * tol);
  if (!ok) {
    if (problem.exact()) throw Error(ErrorCode::NumericalInstability, "exact LP result failed verification");
    throw Error(ErrorCode::NumericalInstability, "float LP result failed verification; rerun in rational arithmetic");
  }
  return v;
}

// --- 2x2 binary specializations --------------------------------------------------------

bool is_binary_2x2(const System& system) {
  const Design& d = system.design;
  if (d.inputs().size() != 2 || d.inputs()[0].values.size() != 2 || d.inputs()[1].values.size() != 2) return false;
  if (d.treatment_count() != 4) return false;
  for (const auto& v : system.outcomes.all()) {
    if (v.size() != 2) return false;
  }
  for (std::size_t k = 0; k < 4; ++k) {
    if (!system.find(k)) return false;
  }
  return true;
}

namespace {

FineSystem::Table2 table2(const System& system, std::size_t x, std::size_t y) {
  const auto k = system.design.treatment_index({x, y});
  const auto& t = system.table(*k).table;
  FineSystem::Table2 out;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const std::size_t c[] = {i, j};
      out[i][j] = t.at(c);
    }
  }
  return out;
}

Real row1(const FineSystem::Table2& t) { return t[0][0] + t[0][1]; }
Real col1(const FineSystem::Table2& t) { return t[0][0] + t[1][0]; }

void require_equal(const Real& a, const Real& b, double tolerance, const char* what) {
  if (!close_enough(a - b, tolerance))
    throw Error(ErrorCode::MarginalSelectivityViolated, std::string(what) + " differs between treatments");
}

}  // namespace

FineSystem extract_fine(const System& system, double tolerance) {
  if (!is_binary_2x2(system)) throw Error(ErrorCode::InvalidInput, "not a 2x2 design with binary outputs");
  FineSystem fs;
  fs.p = table2(system, 0, 0);
  fs.q = table2(system, 0, 1);
  fs.r = table2(system, 1, 0);
  fs.s = table2(system, 1, 1);
  require_equal(row1(fs.p), row1(fs.q), tolerance, "a_1.");
  require_equal(row1(fs.r), row1(fs.s), tolerance, "a'_1.");
  require_equal(col1(fs.p), col1(fs.r), tolerance, "b_.1");
  require_equal(col1(fs.q), col1(fs.s), tolerance, "b'_.1");
  fs.a1 = row1(fs.p);
  fs.a1p = row1(fs.r);
  fs.b1 = col1(fs.p);
  fs.b1p = col1(fs.q);
  for (const auto* t : {&fs.p, &fs.q, &fs.r, &fs.s}) {
    for (const auto& row : *t) {
      for (const auto& v : row) fs.exact = fs.exact && v.exact();
    }
  }
  return fs;
}

FineReport fine_inequalities(const FineSystem& fs, double tolerance) {
  const Real& p11 = fs.p[0][0];
  const Real& q11 = fs.q[0][0];
  const Real& r11 = fs.r[0][0];
  const Real& s11 = fs.s[0][0];
  FineReport out;
  out.expressions = {
      p11 + r11 + s11 - q11 - fs.a1p - fs.b1,
      q11 + s11 + r11 - p11 - fs.a1p - fs.b1p,
      r11 + p11 + q11 - s11 - fs.a1 - fs.b1,
      s11 + q11 + p11 - r11 - fs.a1 - fs.b1p,
  };
  auto nonneg = [&](const Real& v) { return v.exact() ? v.sign() >= 0 : v.to_double() >= -tolerance; };
  for (std::size_t k = 0; k < 4; ++k) {
    out.upper[k] = -out.expressions[k];
    out.lower[k] = out.expressions[k] + Real(1);
    out.holds[k] = nonneg(out.upper[k]);
    out.holds[k + 4] = nonneg(out.lower[k]);
  }
  out.all_hold = std::all_of(out.holds.begin(), out.holds.end(), [](bool b) { return b; });
  return out;
}

ChainResiduals d1_d2_chain_residuals(const System& system) {
  if (!is_binary_2x2(system)) throw Error(ErrorCode::InvalidInput, "not a 2x2 design with binary outputs");
  const Design& d = system.design;

  // D1 ranks both outputs by listing order; D2 reverses the second output.
  const Metric d1 = Metric::order(OrderSpec::listing_order());
  LabelMap<long> reversed;
  for (std::size_t w = 0; w < 2; ++w) {
    const auto& a_vals = system.outcomes.values(d, {0, w});
    const auto& b_vals = system.outcomes.values(d, {1, w});
    const auto& a_name = d.inputs()[0];
    const auto& b_name = d.inputs()[1];
    reversed.set_point(a_name.name, a_name.values[w], a_vals[0], 1);
    reversed.set_point(a_name.name, a_name.values[w], a_vals[1], 2);
    reversed.set_point(b_name.name, b_name.values[w], b_vals[0], 2);
    reversed.set_point(b_name.name, b_name.values[w], b_vals[1], 1);
  }
  const Metric d2 = Metric::order(OrderSpec(reversed));

  const InputPoint x{0, 0}, xp{0, 1}, y{1, 0}, yp{1, 1};
  const std::array<std::array<InputPoint, 4>, 4> tetrad = {{
      {x, y, xp, yp},
      {x, yp, xp, y},
      {xp, y, x, yp},
      {xp, yp, x, y},
  }};
  ChainResiduals out;
  for (std::size_t k = 0; k < 4; ++k) {
    const auto w = witness_for(d, tetrad[k]);
    out.d1[k] = chain_test(d1, *w, system).residual;
    out.d2[k] = chain_test(d2, *w, system).residual;
  }
  return out;
}

Theorem4Report verify_theorem4(const System& system, double tolerance) {
  const FineSystem fs = extract_fine(system, tolerance);
  Theorem4Report out;
  out.fine = fine_inequalities(fs, tolerance);
  out.chain = d1_d2_chain_residuals(system);
  out.exact = fs.exact;

  Real worst;
  auto track = [&](const Real& a, const Real& b) { worst = max(worst, abs(a - b)); };
  for (std::size_t k = 0; k < 4; ++k) {
    track(out.chain.d1[k], -out.fine.expressions[k]);
    track(out.chain.d2[k], out.fine.expressions[k] + Real(1));
  }
  // Identities behind the equivalence for the first pair of inequalities.
  track(fs.q[0][1], fs.a1 - fs.q[0][0]);
  track(fs.p[0][1], fs.a1 - fs.p[0][0]);
  track(fs.r[1][0], fs.b1 - fs.r[0][0]);
  track(fs.s[0][1], fs.a1p - fs.s[0][0]);
  track(fs.r[1][1], Real(1) + fs.r[0][0] - fs.a1p - fs.b1);
  out.max_discrepancy = worst;
  return out;
}

}  // namespace selinf
