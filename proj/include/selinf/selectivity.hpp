#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selinf/metrics.hpp"
#include "selinf/probspace.hpp"

namespace selinf {

inline constexpr double kDefaultTestTolerance = 1e-9;
inline constexpr std::size_t kDefaultMaxLength = 6;
inline constexpr std::size_t kDefaultSequenceBound = 1000000;

/// Input points x_1..x_l with covering treatments: covers[0] contains
/// {x_1, x_l}, covers[i] contains {x_{i-1}, x_i}.
struct SequenceWitness {
  std::vector<InputPoint> points;
  std::vector<std::size_t> covers;
};

struct ChainReport {
  SequenceWitness sequence;
  std::string metric;
  Real lhs;
  std::vector<Real> rhs_terms;
  Real residual;  // sum(rhs_terms) - lhs
  bool violated = false;
};

struct MarginalDiscrepancy {
  std::vector<std::size_t> inputs;  // the sub-collection compared
  std::size_t treatment_a = 0;
  std::size_t treatment_b = 0;
  Real discrepancy;
};

struct MarginalSelectivityReport {
  bool selective = true;
  Real worst;  // largest entrywise difference found
  std::optional<MarginalDiscrepancy> witness;
  std::vector<MarginalDiscrepancy> per_subset;  // worst pair for every compared sub-collection
};

/// Compares marginals over every proper sub-collection of inputs between
/// treatments that agree on it. Exact when the system is rational.
MarginalSelectivityReport check_marginal_selectivity(const System& system, double tolerance = kDefaultTestTolerance);

/// Some allowable treatment containing both points (the lexicographically
/// first one), if any.
std::optional<std::size_t> pair_coverable(const Design& design, InputPoint x, InputPoint y);

struct EnumerationOptions {
  std::size_t max_length = kDefaultMaxLength;
  std::size_t count_bound = kDefaultSequenceBound;
};

/// Receives each sequence; returning false stops the enumeration.
using SequenceVisitor = std::function<bool(const SequenceWitness&)>;

/// Calls `visit` for every treatment-realizable sequence of length
/// 3..max_length in lexicographic order of point ids. Returns the number
/// visited. Throws CapExceeded past `count_bound`.
std::size_t enumerate_realizable(const Design& design, const EnumerationOptions& options, const SequenceVisitor& visit);

/// Same, restricted to irreducible sequences.
std::size_t enumerate_irreducible(const Design& design, const EnumerationOptions& options, const SequenceVisitor& visit);

std::vector<SequenceWitness> collect_realizable(const Design& design, const EnumerationOptions& options = {});
std::vector<SequenceWitness> collect_irreducible(const Design& design, const EnumerationOptions& options = {});

/// Tetrads x,y,s,t over two inputs (x,s of one, y,t of the other, x!=s,
/// y!=t) in lexicographic order; for full designs these are exactly the
/// irreducible sequences.
std::vector<SequenceWitness> tetrads(const Design& design);

bool is_realizable(const Design& design, std::span<const InputPoint> points);
bool is_irreducible(const Design& design, std::span<const InputPoint> points);

/// Covering treatments chosen lexicographically; nullopt when not realizable.
std::optional<SequenceWitness> witness_for(const Design& design, std::span<const InputPoint> points);

/// Ordered-pair marginal of the outputs at x and y under treatment t; the
/// diagonal coupling when x == y.
BivariateMarginal pair_marginal(const System& system, std::size_t treatment, InputPoint x, InputPoint y);

ChainReport chain_test(const Metric& metric, const SequenceWitness& sequence, const System& system,
                       double tolerance = kDefaultTestTolerance);

struct SuiteOptions {
  EnumerationOptions enumeration;
  double tolerance = kDefaultTestTolerance;
};

struct SuiteReport {
  MarginalSelectivityReport marginal_selectivity;
  std::vector<ChainReport> violations;
  std::size_t sequences_tested = 0;
  std::size_t chain_tests = 0;
  bool truncated = false;  // restricted design whose sequences may exceed max_length
  bool exact = true;
};

/// Runs chain tests for every metric over the irreducible sequences (the
/// tetrads, for full designs).
SuiteReport run_suite(const System& system, std::span<const Metric> metrics, const SuiteOptions& options = {});

/// New output label for output `label` observed at input point `x`.
using OutputRelabel = std::function<std::string(const Design& design, InputPoint x, const std::string& label)>;

/// Pushes every table forward through the relabeling; labels mapped to the
/// same new value are merged.
System transform_outputs(const System& system, const OutputRelabel& relabel);

}  // namespace selinf
