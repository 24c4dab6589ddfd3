#include "selinf/selectivity.hpp"

#include <algorithm>
#include <map>

#include "selinf/error.hpp"

namespace selinf {

// --- marginal selectivity -------------------------------------------------------

namespace {

Real max_abs_difference(const JointTable& a, const JointTable& b) {
  Real worst;
  for (std::size_t i = 0; i < a.size(); ++i) worst = max(worst, abs(a.probs()[i] - b.probs()[i]));
  return worst;
}

bool within(const Real& discrepancy, double tolerance) {
  return discrepancy.exact() ? discrepancy.is_zero() : discrepancy.to_double() <= tolerance;
}

}  // namespace

MarginalSelectivityReport check_marginal_selectivity(const System& system, double tolerance) {
  const Design& d = system.design;
  const std::size_t n = d.inputs().size();
  MarginalSelectivityReport report;

  std::vector<std::vector<std::size_t>> subsets;
  if (n <= 12) {
    for (unsigned long mask = 1; mask + 1 < (1UL << n); ++mask) {
      std::vector<std::size_t> s;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1UL << i)) s.push_back(i);
      }
      subsets.push_back(std::move(s));
    }
    std::stable_sort(subsets.begin(), subsets.end(),
                     [](const auto& a, const auto& b) { return a.size() < b.size(); });
  } else {
    for (std::size_t i = 0; i < n; ++i) subsets.push_back({i});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) subsets.push_back({i, j});
    }
  }

  for (const auto& s : subsets) {
    std::map<std::vector<std::size_t>, std::pair<std::size_t, JointTable>> first_by_restriction;
    std::optional<MarginalDiscrepancy> worst_here;
    for (const auto& tt : system.tables) {
      const Treatment t = d.treatment(tt.treatment);
      std::vector<std::size_t> key;
      for (std::size_t i : s) key.push_back(t[i]);
      JointTable m = tt.table.marginal(s);
      auto it = first_by_restriction.find(key);
      if (it == first_by_restriction.end()) {
        first_by_restriction.emplace(std::move(key), std::make_pair(tt.treatment, std::move(m)));
        continue;
      }
      const Real diff = max_abs_difference(it->second.second, m);
      if (!worst_here || diff > worst_here->discrepancy) {
        worst_here = MarginalDiscrepancy{s, it->second.first, tt.treatment, diff};
      }
    }
    if (!worst_here) continue;
    report.per_subset.push_back(*worst_here);
    if (!report.witness || worst_here->discrepancy > report.worst) {
      report.worst = worst_here->discrepancy;
      report.witness = *worst_here;
    }
  }
  report.selective = within(report.worst, tolerance);
  return report;
}

// --- sequences ------------------------------------------------------------------

std::optional<std::size_t> pair_coverable(const Design& design, InputPoint x, InputPoint y) {
  const InputPoint pts[] = {x, y};
  return design.first_treatment_containing(pts);
}

namespace {

/// Pairwise cover lookup over point ids.
class CoverIndex {
 public:
  explicit CoverIndex(const Design& d) : design_(d), n_(d.point_count()), cover_(n_ * n_) {
    for (std::size_t a = 0; a < n_; ++a) {
      for (std::size_t b = a; b < n_; ++b) {
        cover_[a * n_ + b] = cover_[b * n_ + a] = pair_coverable(d, d.point(a), d.point(b));
      }
    }
  }

  const std::optional<std::size_t>& operator()(std::size_t a, std::size_t b) const { return cover_[a * n_ + b]; }
  std::size_t points() const noexcept { return n_; }
  const Design& design() const noexcept { return design_; }

 private:
  const Design& design_;
  std::size_t n_;
  std::vector<std::optional<std::size_t>> cover_;
};

SequenceWitness make_witness(const CoverIndex& cover, const std::vector<std::size_t>& ids) {
  SequenceWitness w;
  const std::size_t l = ids.size();
  for (std::size_t id : ids) w.points.push_back(cover.design().point(id));
  w.covers.push_back(*cover(ids.front(), ids.back()));
  for (std::size_t i = 1; i < l; ++i) w.covers.push_back(*cover(ids[i - 1], ids[i]));
  return w;
}

bool in_some_treatment(const Design& d, std::span<const InputPoint> pts) {
  return d.first_treatment_containing(pts).has_value();
}

bool irreducible_ids(const Design& d, const std::vector<std::size_t>& ids) {
  const std::size_t l = ids.size();
  if (l < 3 || ids.front() == ids.back()) return false;
  std::vector<InputPoint> pts;
  for (std::size_t id : ids) pts.push_back(d.point(id));
  std::vector<InputPoint> subset;
  for (unsigned long mask = 1; mask < (1UL << l); ++mask) {
    if (__builtin_popcountl(mask) < 2) continue;
    const bool closing = mask == ((1UL << 0) | (1UL << (l - 1)));
    bool consecutive = false;
    for (std::size_t i = 1; i < l && !consecutive; ++i) consecutive = mask == ((1UL << (i - 1)) | (1UL << i));
    subset.clear();
    for (std::size_t i = 0; i < l; ++i) {
      if (mask & (1UL << i)) subset.push_back(pts[i]);
    }
    const bool inside = in_some_treatment(d, subset);
    if (closing || consecutive) {
      if (!inside) return false;  // not realizable
    } else if (inside) {
      return false;
    }
  }
  return true;
}

struct Enumerator {
  const CoverIndex& cover;
  const EnumerationOptions& options;
  const SequenceVisitor& visit;
  bool irreducible_only;
  std::vector<std::size_t> ids;
  std::size_t count = 0;
  bool stopped = false;
  bool hit_length_cap = false;

  void emit() {
    if (count >= options.count_bound)
      throw Error(ErrorCode::CapExceeded, "more than " + std::to_string(options.count_bound) + " sequences");
    ++count;
    if (!visit(make_witness(cover, ids))) stopped = true;
  }

  void extend() {
    if (stopped) return;
    const std::size_t k = ids.size();
    if (k >= 3 && cover(ids.front(), ids.back())) {
      if (!irreducible_only) {
        emit();
      } else if (irreducible_ids(cover.design(), ids)) {
        emit();
        return;
      } else {
        // x_1 and x_k share a treatment, so any extension is reducible.
        return;
      }
    }
    if (k == options.max_length) {
      if (irreducible_only && !cover(ids.front(), ids.back())) hit_length_cap = true;
      return;
    }
    for (std::size_t next = 0; next < cover.points() && !stopped; ++next) {
      if (!cover(ids.back(), next)) continue;
      if (irreducible_only && !compatible(next)) continue;
      ids.push_back(next);
      extend();
      ids.pop_back();
    }
  }

  // Irreducible prefixes: the new point may share a treatment with its
  // predecessor, and with x_1 only if the sequence closes there.
  bool compatible(std::size_t next) const {
    for (std::size_t i = 1; i + 1 < ids.size(); ++i) {
      if (cover(ids[i], next)) return false;
    }
    return true;
  }

  std::size_t run() {
    if (options.max_length < 3) throw Error(ErrorCode::InvalidInput, "maximum sequence length must be >= 3");
    for (std::size_t first = 0; first < cover.points() && !stopped; ++first) {
      if (!cover(first, first)) continue;
      ids = {first};
      extend();
    }
    return count;
  }
};

}  // namespace

std::size_t enumerate_realizable(const Design& design, const EnumerationOptions& options, const SequenceVisitor& visit) {
  CoverIndex cover(design);
  Enumerator e{cover, options, visit, false, {}};
  return e.run();
}

std::size_t enumerate_irreducible(const Design& design, const EnumerationOptions& options, const SequenceVisitor& visit) {
  CoverIndex cover(design);
  Enumerator e{cover, options, visit, true, {}};
  return e.run();
}

namespace {

std::vector<SequenceWitness> collect(const Design& design, const EnumerationOptions& options, bool irreducible) {
  std::vector<SequenceWitness> out;
  auto visit = [&](const SequenceWitness& w) {
    out.push_back(w);
    return true;
  };
  if (irreducible) {
    enumerate_irreducible(design, options, visit);
  } else {
    enumerate_realizable(design, options, visit);
  }
  return out;
}

/// True when an irreducible sequence longer than `max_length` might exist.
bool irreducible_truncated(const Design& design, const EnumerationOptions& options) {
  CoverIndex cover(design);
  SequenceVisitor ignore = [](const SequenceWitness&) { return true; };
  Enumerator e{cover, options, ignore, true, {}};
  e.run();
  return e.hit_length_cap;
}

}  // namespace

std::vector<SequenceWitness> collect_realizable(const Design& design, const EnumerationOptions& options) {
  return collect(design, options, false);
}

std::vector<SequenceWitness> collect_irreducible(const Design& design, const EnumerationOptions& options) {
  return collect(design, options, true);
}

std::vector<SequenceWitness> tetrads(const Design& design) {
  std::vector<std::vector<std::size_t>> sequences;
  const std::size_t n = design.inputs().size();
  for (std::size_t alpha = 0; alpha < n; ++alpha) {
    for (std::size_t beta = 0; beta < n; ++beta) {
      if (alpha == beta) continue;
      const std::size_t wa = design.inputs()[alpha].values.size();
      const std::size_t wb = design.inputs()[beta].values.size();
      for (std::size_t x = 0; x < wa; ++x) {
        for (std::size_t y = 0; y < wb; ++y) {
          for (std::size_t s = 0; s < wa; ++s) {
            if (s == x) continue;
            for (std::size_t t = 0; t < wb; ++t) {
              if (t == y) continue;
              sequences.push_back({design.point_id({alpha, x}), design.point_id({beta, y}),
                                   design.point_id({alpha, s}), design.point_id({beta, t})});
            }
          }
        }
      }
    }
  }
  std::sort(sequences.begin(), sequences.end());
  std::vector<SequenceWitness> out;
  for (const auto& ids : sequences) {
    std::vector<InputPoint> pts;
    for (std::size_t id : ids) pts.push_back(design.point(id));
    if (auto w = witness_for(design, pts)) out.push_back(std::move(*w));
  }
  return out;
}

std::optional<SequenceWitness> witness_for(const Design& design, std::span<const InputPoint> points) {
  const std::size_t l = points.size();
  if (l < 3) return std::nullopt;
  SequenceWitness w;
  w.points.assign(points.begin(), points.end());
  auto first = pair_coverable(design, points.front(), points.back());
  if (!first) return std::nullopt;
  w.covers.push_back(*first);
  for (std::size_t i = 1; i < l; ++i) {
    auto c = pair_coverable(design, points[i - 1], points[i]);
    if (!c) return std::nullopt;
    w.covers.push_back(*c);
  }
  return w;
}

bool is_realizable(const Design& design, std::span<const InputPoint> points) {
  return witness_for(design, points).has_value();
}

bool is_irreducible(const Design& design, std::span<const InputPoint> points) {
  std::vector<std::size_t> ids;
  for (const auto& x : points) ids.push_back(design.point_id(x));
  return irreducible_ids(design, ids);
}

// --- chain tests ----------------------------------------------------------------

BivariateMarginal pair_marginal(const System& system, std::size_t treatment, InputPoint x, InputPoint y) {
  const Treatment t = system.design.treatment(treatment);
  if (!system.design.contains(t, x) || !system.design.contains(t, y))
    throw Error(ErrorCode::InvalidInput, "treatment " + system.design.treatment_name(treatment) +
                                             " does not contain " + system.design.point_name(x) + " and " +
                                             system.design.point_name(y));
  const auto& table = system.table(treatment).table;
  if (x == y) return diagonal_coupling(table, x.input);
  return bivariate(table, x.input, y.input);
}

namespace {

bool is_violation(const Real& residual, double tolerance) {
  return residual.exact() ? residual.sign() < 0 : residual.to_double() < -tolerance;
}

}  // namespace

ChainReport chain_test(const Metric& metric, const SequenceWitness& sequence, const System& system, double tolerance) {
  const auto& pts = sequence.points;
  const std::size_t l = pts.size();
  if (l < 3 || sequence.covers.size() != l)
    throw Error(ErrorCode::InvalidInput, "a sequence needs at least three points and one cover per pair");
  ChainReport r;
  r.sequence = sequence;
  r.metric = metric.name();
  r.lhs = metric.evaluate(pair_marginal(system, sequence.covers[0], pts.front(), pts.back()));
  Real sum;
  for (std::size_t i = 1; i < l; ++i) {
    r.rhs_terms.push_back(metric.evaluate(pair_marginal(system, sequence.covers[i], pts[i - 1], pts[i])));
    sum += r.rhs_terms.back();
  }
  r.residual = sum - r.lhs;
  r.violated = is_violation(r.residual, tolerance);
  return r;
}

SuiteReport run_suite(const System& system, std::span<const Metric> metrics, const SuiteOptions& options) {
  const Design& d = system.design;
  SuiteReport report;
  report.marginal_selectivity = check_marginal_selectivity(system, options.tolerance);

  std::vector<SequenceWitness> sequences;
  if (d.full()) {
    sequences = tetrads(d);
  } else {
    sequences = collect_irreducible(d, options.enumeration);
    report.truncated = irreducible_truncated(d, options.enumeration);
  }
  report.sequences_tested = sequences.size();

  // Witnesses are lexicographic, so each ordered pair always maps to the same
  // marginal; cache the metric values.
  const std::size_t np = d.point_count();
  for (std::size_t mi = 0; mi < metrics.size(); ++mi) {
    std::vector<std::optional<Real>> cache(np * np);
    auto value = [&](std::size_t treatment, InputPoint x, InputPoint y) -> const Real& {
      auto& slot = cache[d.point_id(x) * np + d.point_id(y)];
      if (!slot) slot = metrics[mi].evaluate(pair_marginal(system, treatment, x, y));
      return *slot;
    };
    for (const auto& seq : sequences) {
      const auto& pts = seq.points;
      const std::size_t l = pts.size();
      Real lhs = value(seq.covers[0], pts.front(), pts.back());
      std::vector<Real> terms;
      Real sum;
      for (std::size_t i = 1; i < l; ++i) {
        terms.push_back(value(seq.covers[i], pts[i - 1], pts[i]));
        sum += terms.back();
      }
      Real residual = sum - lhs;
      report.exact = report.exact && residual.exact();
      ++report.chain_tests;
      if (is_violation(residual, options.tolerance)) {
        report.violations.push_back(
            ChainReport{seq, metrics[mi].name(), std::move(lhs), std::move(terms), std::move(residual), true});
      }
    }
  }
  return report;
}

System transform_outputs(const System& system, const OutputRelabel& relabel) {
  const Design& d = system.design;
  std::vector<std::vector<std::string>> new_values(d.point_count());
  std::vector<std::vector<std::size_t>> remap(d.point_count());
  for (std::size_t id = 0; id < d.point_count(); ++id) {
    const InputPoint x = d.point(id);
    for (const auto& label : system.outcomes.values(d, x)) {
      const std::string mapped = relabel(d, x, label);
      auto it = std::find(new_values[id].begin(), new_values[id].end(), mapped);
      if (it == new_values[id].end()) {
        new_values[id].push_back(mapped);
        it = new_values[id].end() - 1;
      }
      remap[id].push_back(static_cast<std::size_t>(it - new_values[id].begin()));
    }
  }

  System out{d, OutcomeSpace(new_values), {}, system.arithmetic};
  for (const auto& tt : system.tables) {
    const Treatment t = d.treatment(tt.treatment);
    JointTable table = empty_table(d, out.outcomes, t);
    std::vector<std::size_t> target(t.size());
    for (std::size_t flat = 0; flat < tt.table.size(); ++flat) {
      const auto c = tt.table.coords(flat);
      for (std::size_t i = 0; i < t.size(); ++i) target[i] = remap[d.point_id({i, t[i]})][c[i]];
      table.at(target) += tt.table.probs()[flat];
    }
    out.tables.push_back({tt.treatment, std::move(table)});
  }
  return out;
}

}  // namespace selinf
