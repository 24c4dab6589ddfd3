#include "selinf/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "selinf/error.hpp"

namespace selinf::io {

// --- exact-number JSON parsing -------------------------------------------------

namespace {

/// SAX handler that builds the usual DOM but turns every floating-point
/// literal into a string holding its source text.
class RawFloatSax {
 public:
  explicit RawFloatSax(json& root) : dom_(root) {}

  bool null() { return dom_.null(); }
  bool boolean(bool v) { return dom_.boolean(v); }
  bool number_integer(json::number_integer_t v) { return dom_.number_integer(v); }
  bool number_unsigned(json::number_unsigned_t v) { return dom_.number_unsigned(v); }
  bool number_float(json::number_float_t, const json::string_t& s) {
    json::string_t copy = s;
    return dom_.string(copy);
  }
  bool string(json::string_t& v) { return dom_.string(v); }
  bool binary(json::binary_t& v) { return dom_.binary(v); }
  bool start_object(std::size_t n) { return dom_.start_object(n); }
  bool key(json::string_t& k) { return dom_.key(k); }
  bool end_object() { return dom_.end_object(); }
  bool start_array(std::size_t n) { return dom_.start_array(n); }
  bool end_array() { return dom_.end_array(); }
  bool parse_error(std::size_t pos, const std::string& tok, const nlohmann::detail::exception& ex) {
    return dom_.parse_error(pos, tok, ex);
  }

 private:
  nlohmann::detail::json_sax_dom_parser<json> dom_;
};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::InvalidInput, where + ": " + what);
}

std::string label_of(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  fail(where, "expected a value label (string or number)");
}

std::string number_text(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) {
    std::ostringstream os;
    os.precision(std::numeric_limits<double>::max_digits10);
    os << v.get<double>();
    return os.str();
  }
  fail(where, "expected a number or a \"a/b\" string");
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing \"") + key + "\"");
  return *it;
}

std::vector<std::string> labels(const json& arr, const std::string& where) {
  if (!arr.is_array()) fail(where, "expected an array");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(label_of(arr[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

json parse_json_exact(const std::string& text) {
  json root;
  RawFloatSax sax(root);
  try {
    json::sax_parse(text, &sax);
  } catch (const json::exception& e) {
    // the message carries "line L, column C"
    throw Error(ErrorCode::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
  return root;
}

// --- systems ----------------------------------------------------------------------

System parse_system(const json& doc, ArithmeticMode mode) {
  const json& inputs_json = member(doc, "inputs", "system");
  if (!inputs_json.is_array() || inputs_json.empty()) fail("inputs", "expected a nonempty array");
  std::vector<Input> inputs;
  for (std::size_t i = 0; i < inputs_json.size(); ++i) {
    const std::string where = "inputs[" + std::to_string(i) + "]";
    inputs.push_back({label_of(member(inputs_json[i], "name", where), where + ".name"),
                      labels(member(inputs_json[i], "values", where), where + ".values")});
  }

  auto value_indices = [&](const json& arr, const std::string& where) {
    const auto names = labels(arr, where);
    if (names.size() != inputs.size()) fail(where, "expected one value per input");
    Treatment t;
    for (std::size_t i = 0; i < names.size(); ++i) {
      auto it = std::find(inputs[i].values.begin(), inputs[i].values.end(), names[i]);
      if (it == inputs[i].values.end())
        fail(where, "input '" + inputs[i].name + "' has no value '" + names[i] + "'");
      t.push_back(static_cast<std::size_t>(it - inputs[i].values.begin()));
    }
    return t;
  };

  std::optional<std::vector<Treatment>> treatments;
  const json& tj = member(doc, "treatments", "system");
  if (tj.is_string()) {
    if (tj.get<std::string>() != "full") fail("treatments", "expected \"full\" or an array");
  } else if (tj.is_array()) {
    treatments.emplace();
    for (std::size_t k = 0; k < tj.size(); ++k) treatments->push_back(value_indices(tj[k], "treatments[" + std::to_string(k) + "]"));
  } else {
    fail("treatments", "expected \"full\" or an array");
  }
  Design design(inputs, std::move(treatments));

  const json& tables_json = member(doc, "tables", "system");
  if (!tables_json.is_array()) fail("tables", "expected an array");

  // Output value sets: explicit per input or per input point, otherwise the
  // labels seen for each input, in order of first appearance.
  std::vector<std::vector<std::string>> outcome_values(design.point_count());
  std::vector<bool> explicit_point(design.point_count(), false);
  if (auto it = doc.find("outputs"); it != doc.end()) {
    if (!it->is_object()) fail("outputs", "expected an object");
    for (const auto& [name, spec] : it->items()) {
      const std::size_t in = design.input_index(name);
      if (spec.is_array()) {
        const auto vals = labels(spec, "outputs." + name);
        for (std::size_t w = 0; w < inputs[in].values.size(); ++w) {
          outcome_values[design.point_id({in, w})] = vals;
          explicit_point[design.point_id({in, w})] = true;
        }
      } else if (spec.is_object()) {
        for (const auto& [wname, vals] : spec.items()) {
          const std::size_t pid = design.point_id({in, design.value_index(in, wname)});
          outcome_values[pid] = labels(vals, "outputs." + name + "." + wname);
          explicit_point[pid] = true;
        }
      } else {
        fail("outputs." + name, "expected an array or an object");
      }
    }
  }
  std::vector<std::vector<std::string>> seen_by_input(inputs.size());
  for (std::size_t k = 0; k < tables_json.size(); ++k) {
    const std::string where = "tables[" + std::to_string(k) + "]";
    const json& probs = member(tables_json[k], "probs", where);
    if (!probs.is_array()) fail(where + ".probs", "expected an array");
    for (std::size_t e = 0; e < probs.size(); ++e) {
      const std::string ew = where + ".probs[" + std::to_string(e) + "]";
      const auto outcome = labels(member(probs[e], "outcome", ew), ew + ".outcome");
      if (outcome.size() != inputs.size()) fail(ew + ".outcome", "expected one output value per input");
      for (std::size_t i = 0; i < outcome.size(); ++i) {
        auto& seen = seen_by_input[i];
        if (std::find(seen.begin(), seen.end(), outcome[i]) == seen.end()) seen.push_back(outcome[i]);
      }
    }
  }
  for (std::size_t pid = 0; pid < design.point_count(); ++pid) {
    if (explicit_point[pid]) continue;
    outcome_values[pid] = seen_by_input[design.point(pid).input];
    if (outcome_values[pid].empty()) fail("outputs", "no output values known for " + design.point_name(design.point(pid)));
  }
  OutcomeSpace outcomes(outcome_values);

  // Probabilities: gather text first so "auto" can decide the regime.
  struct Entry {
    std::size_t table;
    std::vector<std::size_t> coords;
    std::string text;
    std::string where;
  };
  std::vector<Entry> entries;
  System system{design, outcomes, {}, Arithmetic::Rational};
  for (std::size_t k = 0; k < tables_json.size(); ++k) {
    const std::string where = "tables[" + std::to_string(k) + "]";
    const Treatment t = value_indices(member(tables_json[k], "treatment", where), where + ".treatment");
    const auto index = design.treatment_index(t);
    if (!index) fail(where + ".treatment", "not an allowable treatment");
    system.tables.push_back({*index, empty_table(design, outcomes, t)});
    const json& probs = tables_json[k]["probs"];
    for (std::size_t e = 0; e < probs.size(); ++e) {
      const std::string ew = where + ".probs[" + std::to_string(e) + "]";
      const auto outcome = labels(probs[e]["outcome"], ew + ".outcome");
      std::vector<std::size_t> coords;
      for (std::size_t i = 0; i < outcome.size(); ++i) {
        const auto& vals = outcomes.values(design, {i, t[i]});
        auto it = std::find(vals.begin(), vals.end(), outcome[i]);
        if (it == vals.end())
          fail(ew + ".outcome", "'" + outcome[i] + "' is not an output value of " + design.point_name({i, t[i]}));
        coords.push_back(static_cast<std::size_t>(it - vals.begin()));
      }
      entries.push_back({system.tables.size() - 1, coords, number_text(member(probs[e], "p", ew), ew + ".p"), ew});
    }
  }

  std::vector<Real> values;
  bool all_exact = mode != ArithmeticMode::Float;
  for (const auto& e : entries) {
    Real v;
    try {
      v = mode == ArithmeticMode::Auto ? parse_real(e.text, kAutoMaxDecimals) : parse_real(e.text);
    } catch (const Error& err) {
      fail(e.where + ".p", err.message());
    }
    all_exact = all_exact && v.exact();
    values.push_back(std::move(v));
  }
  if (mode == ArithmeticMode::Float) all_exact = false;
  system.arithmetic = all_exact ? Arithmetic::Rational : Arithmetic::Float;

  std::vector<std::vector<bool>> filled(system.tables.size());
  for (std::size_t k = 0; k < system.tables.size(); ++k) filled[k].assign(system.tables[k].table.size(), false);
  for (std::size_t n = 0; n < entries.size(); ++n) {
    const auto& e = entries[n];
    auto& table = system.tables[e.table].table;
    const std::size_t flat = table.flat_index(e.coords);
    if (filled[e.table][flat]) fail(e.where, "outcome listed twice");
    filled[e.table][flat] = true;
    table.probs()[flat] = all_exact ? values[n] : Real(values[n].to_double());
  }
  // Unlisted outcomes have probability zero.
  if (!all_exact) {
    for (auto& tt : system.tables) {
      for (auto& p : tt.table.probs()) p = Real(p.to_double());
    }
  }
  return system;
}

System parse_system_text(const std::string& text, ArithmeticMode mode) {
  return parse_system(parse_json_exact(text), mode);
}

System load_system(const std::filesystem::path& path, ArithmeticMode mode) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_system_text(buf.str(), mode);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

json system_to_json(const System& system) {
  const Design& d = system.design;
  json doc;
  doc["inputs"] = json::array();
  for (const auto& in : d.inputs()) doc["inputs"].push_back({{"name", in.name}, {"values", in.values}});
  if (d.full()) {
    doc["treatments"] = "full";
  } else {
    doc["treatments"] = json::array();
    for (std::size_t k = 0; k < d.treatment_count(); ++k) {
      const Treatment t = d.treatment(k);
      json row = json::array();
      for (std::size_t i = 0; i < t.size(); ++i) row.push_back(d.inputs()[i].values[t[i]]);
      doc["treatments"].push_back(row);
    }
  }
  json outputs = json::object();
  for (std::size_t i = 0; i < d.inputs().size(); ++i) {
    json per_point = json::object();
    for (std::size_t w = 0; w < d.inputs()[i].values.size(); ++w)
      per_point[d.inputs()[i].values[w]] = system.outcomes.values(d, {i, w});
    outputs[d.inputs()[i].name] = per_point;
  }
  doc["outputs"] = outputs;
  doc["tables"] = json::array();
  for (const auto& tt : system.tables) {
    const Treatment t = d.treatment(tt.treatment);
    json tj;
    tj["treatment"] = json::array();
    for (std::size_t i = 0; i < t.size(); ++i) tj["treatment"].push_back(d.inputs()[i].values[t[i]]);
    tj["probs"] = json::array();
    for (std::size_t flat = 0; flat < tt.table.size(); ++flat) {
      const auto c = tt.table.coords(flat);
      json outcome = json::array();
      for (std::size_t i = 0; i < c.size(); ++i) outcome.push_back(tt.table.axes()[i].values[c[i]]);
      const Real& p = tt.table.probs()[flat];
      tj["probs"].push_back({{"outcome", outcome}, {"p", p.exact() ? json(p.str()) : json(p.to_double())}});
    }
    doc["tables"].push_back(tj);
  }
  return doc;
}

// --- metric configuration ------------------------------------------------------------

namespace {

Real real_of(const json& v, const std::string& where) {
  try {
    return parse_real(number_text(v, where));
  } catch (const Error& e) {
    fail(where, e.message());
  }
}

Embedding parse_embedding(const json& config) {
  Embedding e;
  auto it = config.find("embed");
  if (it == config.end()) return e;
  if (!it->is_object()) fail("embed", "expected an object");
  for (const auto& [scope, table] : it->items()) {
    if (!table.is_object()) fail("embed." + scope, "expected an object of label -> number");
    for (const auto& [label, value] : table.items()) {
      if (scope == "*") {
        e.values.set_global(label, real_of(value, "embed.*." + label));
      } else {
        e.values.set_input(scope, label, real_of(value, "embed." + scope + "." + label));
      }
    }
  }
  return e;
}

long rank_of(const json& v, const std::string& where) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) fail(where, "rank must be an integer");
  return v.get<long>();
}

OrderSpec parse_order(const json& config) {
  const bool has_ranks = config.contains("ranks");
  const bool has_points = config.contains("point_ranks");
  if (!has_ranks && !has_points) return OrderSpec::listing_order();
  LabelMap<long> ranks;
  if (has_ranks) {
    for (const auto& [scope, table] : config["ranks"].items()) {
      if (!table.is_object()) fail("ranks." + scope, "expected an object of label -> rank");
      for (const auto& [label, r] : table.items()) {
        if (scope == "*") {
          ranks.set_global(label, rank_of(r, "ranks.*." + label));
        } else {
          ranks.set_input(scope, label, rank_of(r, "ranks." + scope + "." + label));
        }
      }
    }
  }
  if (has_points) {
    for (const auto& [input, per_value] : config["point_ranks"].items()) {
      for (const auto& [value, table] : per_value.items()) {
        for (const auto& [label, r] : table.items()) {
          ranks.set_point(input, value, label, rank_of(r, "point_ranks." + input + "." + value + "." + label));
        }
      }
    }
  }
  if (config.value("strict", false)) return OrderSpec(std::move(ranks));
  return OrderSpec::over_listing_order(std::move(ranks));
}

std::vector<std::vector<std::string>> parse_cells(const json& cells, const std::string& where) {
  if (!cells.is_array()) fail(where, "expected an array of cells");
  std::vector<std::vector<std::string>> out;
  for (std::size_t k = 0; k < cells.size(); ++k) out.push_back(labels(cells[k], where + "[" + std::to_string(k) + "]"));
  return out;
}

Partition parse_partition(const json& config) {
  Partition p;
  bool any = false;
  if (auto it = config.find("cells"); it != config.end()) {
    p.add_global(parse_cells(*it, "cells"));
    any = true;
  }
  if (auto it = config.find("input_cells"); it != config.end()) {
    for (const auto& [input, cells] : it->items()) p.add_input(input, parse_cells(cells, "input_cells." + input));
    any = true;
  }
  if (auto it = config.find("point_cells"); it != config.end()) {
    for (const auto& [input, per_value] : it->items()) {
      for (const auto& [value, cells] : per_value.items())
        p.add_point(input, value, parse_cells(cells, "point_cells." + input + "." + value));
    }
    any = true;
  }
  if (!any) fail("classification", "needs \"cells\", \"input_cells\" or \"point_cells\"");
  return p;
}

GroundMetric parse_ground(const json& config) {
  const json& g = member(config, "ground", "expected_ground");
  if (g.is_string()) {
    const auto labs = labels(member(config, "labels", "expected_ground"), "labels");
    if (g == "abs") return GroundMetric::absolute_difference(labs);
    if (g == "discrete") return GroundMetric::discrete(labs);
    fail("ground", "expected \"abs\", \"discrete\" or an explicit table");
  }
  const auto labs = labels(member(g, "labels", "ground"), "ground.labels");
  const json& rows = member(g, "dist", "ground");
  if (!rows.is_array() || rows.size() != labs.size()) fail("ground.dist", "expected a square table");
  std::vector<Real> dist;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != labs.size()) fail("ground.dist", "expected a square table");
    for (std::size_t j = 0; j < labs.size(); ++j)
      dist.push_back(real_of(rows[i][j], "ground.dist[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
  }
  return GroundMetric(labs, std::move(dist));
}

double p_of(const json& v) {
  if (v.is_string() && (v == "inf" || v == "infinity")) return std::numeric_limits<double>::infinity();
  return real_of(v, "p").to_double();
}

Metric parse_base_metric(const json& config) {
  const std::string kind = label_of(member(config, "kind", "metric"), "kind");
  if (kind == "order") return Metric::order(parse_order(config));
  if (kind == "classification") return Metric::classification(parse_partition(config));
  if (kind == "p") return Metric::p(p_of(member(config, "p", "metric")), parse_embedding(config));
  if (kind == "entropy") {
    const double base = config.contains("base") ? real_of(config["base"], "base").to_double() : kDefaultEntropyBase;
    return Metric::entropy(base);
  }
  if (kind == "frechet") return Metric::frechet(parse_embedding(config));
  if (kind == "separation") {
    const json& u = member(config, "u", "separation");
    if (!u.is_array()) fail("u", "expected an array of {value, p}");
    std::vector<SeparationPoint> pts;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const std::string w = "u[" + std::to_string(i) + "]";
      pts.push_back({real_of(member(u[i], "value", w), w + ".value"), real_of(member(u[i], "p", w), w + ".p")});
    }
    return Metric::separation(std::move(pts), parse_embedding(config));
  }
  if (kind == "expected_ground") return Metric::expected_ground(parse_ground(config));
  fail("kind", "unknown metric kind '" + kind + "'");
}

}  // namespace

Metric parse_metric(const json& config) {
  Metric m = parse_base_metric(config);
  auto it = config.find("transform");
  if (it == config.end()) return config.contains("name") ? m.renamed(label_of(config["name"], "name")) : m;
  const json chain = it->is_array() ? *it : json::array({*it});
  for (const auto& step : chain) {
    if (!step.is_object() || step.size() != 1) fail("transform", "each step is an object with a single key");
    const auto& [name, arg] = *step.items().begin();
    if (name == "power") {
      m = transform(m, Power{real_of(arg, "transform.power").to_double()});
    } else if (name == "bounded") {
      m = transform(m, Bounded{});
    } else if (name == "max") {
      m = transform(m, MaxWith{parse_metric(arg)});
    } else if (name == "sum") {
      m = transform(m, SumWith{parse_metric(arg)});
    } else if (name == "mixture") {
      Mixture mix;
      for (const auto& o : member(arg, "others", "transform.mixture")) mix.others.push_back(parse_metric(o));
      for (const auto& w : member(arg, "weights", "transform.mixture")) mix.weights.push_back(real_of(w, "transform.mixture.weights"));
      m = transform(m, std::move(mix));
    } else {
      fail("transform", "unknown transform '" + name + "'");
    }
  }
  return config.contains("name") ? m.renamed(label_of(config["name"], "name")) : m;
}

std::vector<Metric> load_metrics(const std::string& file_or_inline) {
  std::string text = file_or_inline;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || (text[first] != '{' && text[first] != '[')) {
    std::ifstream in(file_or_inline);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot read metric config " + file_or_inline);
    std::stringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  const json doc = parse_json_exact(text);
  std::vector<Metric> out;
  if (doc.is_array()) {
    for (const auto& c : doc) out.push_back(parse_metric(c));
  } else {
    out.push_back(parse_metric(doc));
  }
  return out;
}

// --- reports -----------------------------------------------------------------------------

json real_json(const Real& r) { return r.to_double(); }

namespace {

void put_real(json& obj, const std::string& key, const Real& r) {
  obj[key] = real_json(r);
  if (r.exact()) obj[key + "_exact"] = r.str();
}

json point_json(const Design& d, InputPoint x) { return json::array({d.inputs()[x.input].name, d.inputs()[x.input].values[x.value]}); }

}  // namespace

json chain_report_json(const ChainReport& r, const Design& design) {
  json j;
  j["sequence"] = json::array();
  for (const auto& x : r.sequence.points) j["sequence"].push_back(point_json(design, x));
  j["treatments"] = json::array();
  for (std::size_t k : r.sequence.covers) j["treatments"].push_back(design.treatment_name(k));
  j["metric"] = r.metric;
  put_real(j, "lhs", r.lhs);
  j["rhs_terms"] = json::array();
  bool exact = true;
  for (const auto& t : r.rhs_terms) {
    j["rhs_terms"].push_back(real_json(t));
    exact = exact && t.exact();
  }
  if (exact) {
    j["rhs_terms_exact"] = json::array();
    for (const auto& t : r.rhs_terms) j["rhs_terms_exact"].push_back(t.str());
  }
  put_real(j, "rhs", r.residual + r.lhs);
  put_real(j, "residual", r.residual);
  j["violated"] = r.violated;
  return j;
}

json marginal_selectivity_json(const MarginalSelectivityReport& r, const Design& design) {
  json j;
  j["selective"] = r.selective;
  put_real(j, "max_discrepancy", r.worst);
  if (r.witness) {
    json w;
    w["inputs"] = json::array();
    for (std::size_t i : r.witness->inputs) w["inputs"].push_back(design.inputs()[i].name);
    w["treatments"] = json::array({design.treatment_name(r.witness->treatment_a), design.treatment_name(r.witness->treatment_b)});
    put_real(w, "discrepancy", r.witness->discrepancy);
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

json validation_json(const ValidationReport& r) {
  json j;
  j["ok"] = r.ok();
  j["issues"] = json::array();
  for (const auto& i : r.issues) {
    json e{{"kind", std::string(to_string(i.kind))}, {"treatment", i.treatment}, {"detail", i.detail}};
    if (i.kind == ValidationIssue::Kind::SumNotOne || i.kind == ValidationIssue::Kind::NegativeProbability)
      put_real(e, "delta", i.delta);
    j["issues"].push_back(e);
  }
  return j;
}

json suite_json(const SuiteReport& r, const Design& design) {
  json j;
  j["marginal_selectivity"] = marginal_selectivity_json(r.marginal_selectivity, design);
  j["violations"] = json::array();
  for (const auto& v : r.violations) j["violations"].push_back(chain_report_json(v, design));
  j["sequences_tested"] = r.sequences_tested;
  j["chain_tests"] = r.chain_tests;
  j["truncated"] = r.truncated;
  j["exact"] = r.exact;
  return j;
}

json jdc_json(const JdcVerdict& v, const JdcProblem& problem) {
  const System& sys = problem.system();
  const Design& d = sys.design;
  json j;
  j["feasible"] = v.feasible;
  j["exact"] = v.exact;
  j["hidden_assignments"] = problem.variable_count();
  j["constraints"] = problem.constraint_count();
  j["lp_rows"] = v.lp_rows;
  j["pivots"] = v.pivots;
  if (v.feasible) {
    json w = json::array();
    for (std::size_t h = 0; h < v.witness.size(); ++h) {
      if (v.witness[h].is_zero()) continue;
      const auto vals = problem.hidden_values(h);
      json assignment = json::array();
      for (std::size_t pid = 0; pid < vals.size(); ++pid) {
        const InputPoint x = d.point(pid);
        assignment.push_back(json::array({d.point_name(x), sys.outcomes.values(d, x)[vals[pid]]}));
      }
      json e{{"assignment", assignment}};
      put_real(e, "q", v.witness[h]);
      w.push_back(e);
    }
    j["witness"] = w;
    j["certificate"] = nullptr;
  } else {
    json c = json::array();
    for (std::size_t r = 0; r < v.certificate.size(); ++r) {
      if (v.certificate[r].is_zero()) continue;
      const auto& con = problem.constraints()[r];
      const auto& table = sys.table(con.treatment).table;
      const auto coords = table.coords(con.outcome);
      json outcome = json::array();
      for (std::size_t i = 0; i < coords.size(); ++i) outcome.push_back(table.axes()[i].values[coords[i]]);
      json e{{"treatment", d.treatment_name(con.treatment)}, {"outcome", outcome}};
      put_real(e, "y", v.certificate[r]);
      c.push_back(e);
    }
    j["witness"] = nullptr;
    j["certificate"] = c;
  }
  if (!v.reason.empty()) j["reason"] = v.reason;
  return j;
}

json fine_json(const FineReport& f) {
  json j;
  j["values"] = json::array();
  for (const auto& e : f.expressions) j["values"].push_back(real_json(e));
  if (f.expressions[0].exact()) {
    j["values_exact"] = json::array();
    for (const auto& e : f.expressions) j["values_exact"].push_back(e.str());
  }
  j["violations"] = json::array();
  for (std::size_t k = 0; k < 4; ++k) {
    if (!f.holds[k]) j["violations"].push_back("e" + std::to_string(k + 1) + " <= 0");
    if (!f.holds[k + 4]) j["violations"].push_back("e" + std::to_string(k + 1) + " >= -1");
  }
  j["all_hold"] = f.all_hold;
  return j;
}

}  // namespace selinf::io
