#include "selinf/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <ostream>
#include <sstream>

#include "selinf/error.hpp"
#include "selinf/gauss.hpp"

namespace selinf::cli {

using io::json;

namespace {

std::string arithmetic_name(Arithmetic a) { return a == Arithmetic::Rational ? "rational" : "float"; }

json error_report(const std::string& command, const Error& e) {
  return {{"command", command}, {"error", {{"code", std::string(to_string(e.code()))}, {"message", e.message()}}}};
}

std::vector<Metric> metrics_of(const RunConfig& config) {
  std::vector<Metric> out;
  for (const auto& m : config.metric_configs) {
    for (auto& metric : io::load_metrics(m)) out.push_back(std::move(metric));
  }
  if (out.empty()) out.push_back(Metric::order(OrderSpec::listing_order()));
  return out;
}

void check_config(const RunConfig& c) {
  if (c.max_len < 3) throw Error(ErrorCode::InvalidInput, "--max-len must be at least 3");
  if (!(c.tol_sum > 0) || !(c.tol_test > 0) || !(c.tol_lp > 0))
    throw Error(ErrorCode::InvalidInput, "tolerances must be positive");
  if (c.cap == 0) throw Error(ErrorCode::InvalidInput, "--cap must be positive");
}

/// Loads and validates; returns the validation section, or throws.
System load_valid(const RunConfig& config, json& report) {
  System system = io::load_system(config.system_file, config.arithmetic);
  report["arithmetic"] = arithmetic_name(system.arithmetic);
  const ValidationReport v = validate_system(system, config.tol_sum);
  report["validation"] = io::validation_json(v);
  require_valid(system, config.tol_sum);
  return system;
}

}  // namespace

CommandResult cmd_check(const RunConfig& config) {
  json report{{"command", "check"}, {"system", config.system_file}};
  try {
    check_config(config);
    const System system = load_valid(config, report);
    const auto metrics = metrics_of(config);
    report["metrics"] = json::array();
    for (const auto& m : metrics) report["metrics"].push_back(m.name());
    SuiteOptions options;
    options.enumeration.max_length = config.max_len;
    options.enumeration.count_bound = config.cap;
    options.tolerance = config.tol_test;
    const SuiteReport suite = run_suite(system, metrics, options);
    report.update(io::suite_json(suite, system.design));
    const bool pass = suite.marginal_selectivity.selective && suite.violations.empty();
    report["verdict"] = pass ? "pass"
                        : suite.marginal_selectivity.selective ? "chain inequality violated"
                                                               : "marginal selectivity violated";
    return {pass ? kExitPass : kExitNegative, report};
  } catch (const Error& e) {
    report.update(error_report("check", e));
    return {kExitInputError, report};
  }
}

CommandResult cmd_jdc(const RunConfig& config) {
  json report{{"command", "jdc"}, {"system", config.system_file}};
  try {
    check_config(config);
    const System system = load_valid(config, report);
    JdcOptions options;
    options.hidden_cap = config.cap;
    options.lp_tolerance = config.tol_lp;
    options.sum_tolerance = config.tol_sum;
    const JdcProblem problem = build_jdc(system, options);
    const JdcVerdict verdict = jdc_feasible(problem, options);
    report.update(io::jdc_json(verdict, problem));
    if (is_binary_2x2(system)) {
      const auto ms = check_marginal_selectivity(system, config.tol_lp);
      if (ms.selective) {
        const Theorem4Report t4 = verify_theorem4(system, config.tol_lp);
        report["fine"] = io::fine_json(t4.fine);
        json chain;
        for (const char* key : {"d1", "d2"}) chain[key] = json::array();
        for (std::size_t k = 0; k < 4; ++k) {
          chain["d1"].push_back(io::real_json(t4.chain.d1[k]));
          chain["d2"].push_back(io::real_json(t4.chain.d2[k]));
        }
        if (t4.exact) {
          for (const char* key : {"d1_exact", "d2_exact"}) chain[key] = json::array();
          for (std::size_t k = 0; k < 4; ++k) {
            chain["d1_exact"].push_back(t4.chain.d1[k].str());
            chain["d2_exact"].push_back(t4.chain.d2[k].str());
          }
        }
        chain["exact"] = t4.exact;
        report["order_distance_chains"] = chain;
        report["theorem4_max_discrepancy"] = io::real_json(t4.max_discrepancy);
      } else {
        report["fine"] = nullptr;
      }
    }
    report["verdict"] = verdict.feasible ? "feasible" : "infeasible";
    return {verdict.feasible ? kExitPass : kExitNegative, report};
  } catch (const Error& e) {
    report.update(error_report("jdc", e));
    return {kExitInputError, report};
  }
}

CommandResult cmd_demo_normal(const RunConfig& config) {
  const ChainReport r = gauss::demo_chain_violation();
  json report{{"command", "demo-normal"}, {"correlation", "rho(v, w) = min(1, v + w)"}};
  report["sequence"] = json::array({json::array({1, 0.0}), json::array({2, 1.0}), json::array({1, 1.0}), json::array({2, 0.0})});
  report["metric"] = r.metric;
  report["lhs"] = r.lhs.to_double();
  report["rhs_terms"] = json::array();
  for (const auto& t : r.rhs_terms) report["rhs_terms"].push_back(t.to_double());
  report["rhs"] = (r.residual + r.lhs).to_double();
  report["residual"] = r.residual.to_double();
  report["violated"] = r.violated;
  if (config.rho_grid) {
    json grid = json::array();
    bool monotone = true;
    double prev = 1.0;
    for (int k = -10; k <= 10; ++k) {
      const double rho = k / 10.0;
      const double d = gauss::binormal_order_distance(rho);
      monotone = monotone && d <= prev;
      prev = d;
      grid.push_back({{"rho", rho}, {"order_distance", d}});
    }
    report["rho_grid"] = grid;
    report["rho_grid_monotone"] = monotone;
  }
  return {kExitPass, report};
}

std::string render_json(const json& report) { return report.dump(2) + "\n"; }

namespace {

/// The exact form when the report carries one.
std::string num(const json& obj, const std::string& key) {
  if (auto it = obj.find(key + "_exact"); it != obj.end()) return it->get<std::string>();
  return obj.at(key).dump();
}

std::string sequence_text(const json& seq) {
  std::string s;
  for (const auto& x : seq) {
    if (!s.empty()) s += " ";
    s += "(" + (x[0].is_string() ? x[0].get<std::string>() : x[0].dump()) + "," +
         (x[1].is_string() ? x[1].get<std::string>() : x[1].dump()) + ")";
  }
  return s;
}

std::string chain_text(const json& c) {
  std::string terms;
  const json& rhs = c.contains("rhs_terms_exact") ? c["rhs_terms_exact"] : c["rhs_terms"];
  for (const auto& t : rhs) terms += (terms.empty() ? "" : " + ") + (t.is_string() ? t.get<std::string>() : t.dump());
  std::ostringstream os;
  os << "  " << c["metric"].get<std::string>() << ": " << sequence_text(c["sequence"]) << ": lhs " << num(c, "lhs")
     << (c["violated"].get<bool>() ? " > " : " <= ") << terms << " (residual " << num(c, "residual") << ")\n";
  return os.str();
}

}  // namespace

std::string render_human(const json& report) {
  std::ostringstream os;
  const std::string command = report.value("command", "");
  if (report.contains("system")) os << "system: " << report["system"].get<std::string>();
  if (report.contains("arithmetic")) os << " (" << report["arithmetic"].get<std::string>() << " arithmetic)";
  if (report.contains("system")) os << "\n";
  if (auto it = report.find("validation"); it != report.end() && !(*it)["ok"].get<bool>()) {
    for (const auto& i : (*it)["issues"])
      os << "invalid: " << i["kind"].get<std::string>() << " in " << i["treatment"].get<std::string>() << ": "
         << i["detail"].get<std::string>() << "\n";
  }
  if (report.contains("error")) {
    os << "error: " << report["error"]["code"].get<std::string>() << ": " << report["error"]["message"].get<std::string>()
       << "\n";
    return os.str();
  }
  if (command == "check") {
    const auto& ms = report["marginal_selectivity"];
    os << "marginal selectivity: " << (ms["selective"].get<bool>() ? "holds" : "violated") << " (max discrepancy "
       << num(ms, "max_discrepancy") << ")\n";
    if (!ms["selective"].get<bool>() && !ms["witness"].is_null()) {
      const auto& w = ms["witness"];
      os << "  worst: inputs " << w["inputs"].dump() << " between " << w["treatments"][0].get<std::string>() << " and "
         << w["treatments"][1].get<std::string>() << "\n";
    }
    os << "metrics: ";
    for (std::size_t i = 0; i < report["metrics"].size(); ++i) os << (i ? ", " : "") << report["metrics"][i].get<std::string>();
    os << "\nsequences tested: " << report["sequences_tested"] << ", chain tests: " << report["chain_tests"] << "\n";
    if (report["truncated"].get<bool>()) os << "note: enumeration stopped at the length cap\n";
    os << "violations: " << report["violations"].size() << "\n";
    for (const auto& v : report["violations"]) os << chain_text(v);
  } else if (command == "jdc") {
    const auto& j = report;
    os << "hidden assignments: " << j["hidden_assignments"] << ", constraints: " << j["constraints"]
       << ", independent rows: " << j["lp_rows"] << ", pivots: " << j["pivots"] << "\n";
    if (j["feasible"].get<bool>()) {
      os << "joint distribution (nonzero entries: " << j["witness"].size() << ")\n";
      for (const auto& e : j["witness"]) {
        os << "  " << num(e, "q") << ":";
        for (const auto& a : e["assignment"]) os << " " << a[0].get<std::string>() << "=" << a[1].get<std::string>();
        os << "\n";
      }
    } else {
      if (j.contains("reason")) os << "reason: " << j["reason"].get<std::string>() << "\n";
      os << "certificate (nonzero entries: " << j["certificate"].size() << ")\n";
      for (const auto& e : j["certificate"])
        os << "  " << num(e, "y") << ": " << e["treatment"].get<std::string>() << " -> " << e["outcome"].dump() << "\n";
    }
    auto list = [&](const json& values) {
      for (const auto& v : values) os << " " << (v.is_string() ? v.get<std::string>() : v.dump());
    };
    if (auto it = report.find("fine"); it != report.end() && !it->is_null()) {
      os << "fine inequalities:";
      list(it->contains("values_exact") ? (*it)["values_exact"] : (*it)["values"]);
      os << (((*it)["all_hold"].get<bool>()) ? " (all within [-1, 0])" : " (violated)") << "\n";
      for (const auto& v : (*it)["violations"]) os << "  fails: " << v.get<std::string>() << "\n";
    }
    if (auto it = report.find("order_distance_chains"); it != report.end()) {
      const bool exact = it->contains("d1_exact");
      os << "order-distance chain residuals: d1";
      list((*it)[exact ? "d1_exact" : "d1"]);
      os << ", d2";
      list((*it)[exact ? "d2_exact" : "d2"]);
      os << "\n";
    }
  } else if (command == "demo-normal") {
    os << report["correlation"].get<std::string>() << "\n";
    os << "sequence: " << sequence_text(report["sequence"]) << "\n";
    std::string terms;
    for (const auto& t : report["rhs_terms"]) terms += (terms.empty() ? "" : " + ") + t.dump();
    os << "lhs " << report["lhs"].dump() << " <= " << terms << " ?\n";
    os << "residual " << report["residual"].dump() << (report["violated"].get<bool>() ? ": violated" : ": holds") << "\n";
    if (auto it = report.find("rho_grid"); it != report.end()) {
      os << "rho     arccos(rho)/(2 pi)\n";
      for (const auto& row : *it) {
        char line[64];
        std::snprintf(line, sizeof line, "%5.1f   %.12f\n", row["rho"].get<double>(), row["order_distance"].get<double>());
        os << line;
      }
    }
  }
  if (report.contains("verdict")) os << "verdict: " << report["verdict"].get<std::string>() << "\n";
  return os.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tests of selective influence on systems of jointly distributed outputs"};
  app.require_subcommand(1);
  RunConfig config;
  bool json_output = false;
  std::string arithmetic = "auto";

  auto add_common = [&](CLI::App* sub) {
    sub->add_flag("--json", json_output, "Print the JSON report");
  };
  auto add_system = [&](CLI::App* sub) {
    sub->add_option("system", config.system_file, "System JSON file")->required();
    sub->add_option("--arithmetic", arithmetic, "rational, float or auto")
        ->check(CLI::IsMember({"rational", "float", "auto"}));
    sub->add_option("--tol-sum", config.tol_sum, "Tolerance on table totals");
    sub->add_option("--cap", config.cap, "Bound on enumerated sequences (check) or hidden assignments (jdc)");
  };

  auto* check = app.add_subcommand("check", "Marginal selectivity and chain inequality tests");
  add_system(check);
  add_common(check);
  check->add_option("--metric", config.metric_configs, "Metric config: file or inline JSON (repeatable)");
  check->add_option("--max-len", config.max_len, "Longest sequence enumerated");
  check->add_option("--tol-test", config.tol_test, "Slack for float chain tests");

  auto* jdc = app.add_subcommand("jdc", "Joint distribution criterion by linear programming");
  add_system(jdc);
  add_common(jdc);
  jdc->add_option("--tol-lp", config.tol_lp, "Feasibility slack for float problems");

  auto* demo = app.add_subcommand("demo-normal", "Chain violation for bivariate normal outputs");
  add_common(demo);
  demo->add_flag("--rho-grid", config.rho_grid, "Also tabulate arccos(rho)/(2 pi)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInputError;
  }
  config.format = json_output ? OutputFormat::Json : OutputFormat::Human;
  config.arithmetic = arithmetic == "rational" ? io::ArithmeticMode::Rational
                      : arithmetic == "float" ? io::ArithmeticMode::Float
                                              : io::ArithmeticMode::Auto;

  CommandResult result;
  if (check->parsed()) {
    result = cmd_check(config);
  } else if (jdc->parsed()) {
    result = cmd_jdc(config);
  } else {
    result = cmd_demo_normal(config);
  }
  const std::string text = config.format == OutputFormat::Json ? render_json(result.report) : render_human(result.report);
  (result.exit_code == kExitInputError && config.format == OutputFormat::Human ? err : out) << text;
  return result.exit_code;
}

}  // namespace selinf::cli
