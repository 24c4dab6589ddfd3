#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "selinf/jdc.hpp"
#include "selinf/metrics.hpp"
#include "selinf/probspace.hpp"
#include "selinf/selectivity.hpp"

namespace selinf::io {

using nlohmann::json;

enum class ArithmeticMode { Auto, Rational, Float };

/// Decimal places up to which "auto" still reads a decimal literal exactly.
inline constexpr int kAutoMaxDecimals = 9;

/// Parses JSON keeping floating-point literals as their source text (as JSON
/// strings), so that probabilities like 0.1 can be read exactly.
json parse_json_exact(const std::string& text);

System parse_system(const json& doc, ArithmeticMode mode = ArithmeticMode::Auto);
System parse_system_text(const std::string& text, ArithmeticMode mode = ArithmeticMode::Auto);
System load_system(const std::filesystem::path& path, ArithmeticMode mode = ArithmeticMode::Auto);

/// Serializes a system in the input schema; exact probabilities are written
/// as "p/q" strings.
json system_to_json(const System& system);

Metric parse_metric(const json& config);
/// A file path, or inline JSON (an object or an array of objects).
std::vector<Metric> load_metrics(const std::string& file_or_inline);

/// Numbers appear as doubles; exact values additionally carry a "p/q" string
/// under the same key with an "_exact" suffix.
json chain_report_json(const ChainReport& r, const Design& design);
json marginal_selectivity_json(const MarginalSelectivityReport& r, const Design& design);
json validation_json(const ValidationReport& r);
json suite_json(const SuiteReport& r, const Design& design);
/// Witness and certificate are listed sparsely, labelled by hidden assignment
/// and by (treatment, outcome) respectively.
json jdc_json(const JdcVerdict& v, const JdcProblem& problem);
json fine_json(const FineReport& f);

json real_json(const Real& r);

}  // namespace selinf::io
