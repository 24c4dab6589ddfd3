#include <gtest/gtest.h>

#include <sstream>

#include "selinf/cli.hpp"

using namespace selinf;
using namespace selinf::cli;

namespace {

const std::string kData = SELINF_DATA_DIR;

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "selinf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return kData + "/" + name + ".json"; }

}  // namespace

TEST(Cli, CheckExitCodes) {
  EXPECT_EQ(invoke({"check", data("product")}).code, kExitPass);
  EXPECT_EQ(invoke({"check", data("fine_feasible")}).code, kExitPass);
  EXPECT_EQ(invoke({"check", data("restricted")}).code, kExitPass);
  EXPECT_EQ(invoke({"check", data("pr_box")}).code, kExitNegative);
  EXPECT_EQ(invoke({"check", data("not_selective")}).code, kExitNegative);
  EXPECT_EQ(invoke({"check", data("normal_sign")}).code, kExitNegative);
  EXPECT_EQ(invoke({"check", data("malformed")}).code, kExitInputError);
  EXPECT_EQ(invoke({"check", data("missing")}).code, kExitInputError);
}

TEST(Cli, JdcExitCodes) {
  EXPECT_EQ(invoke({"jdc", data("product")}).code, kExitPass);
  EXPECT_EQ(invoke({"jdc", data("fine_feasible")}).code, kExitPass);
  EXPECT_EQ(invoke({"jdc", data("restricted")}).code, kExitPass);
  EXPECT_EQ(invoke({"jdc", data("pr_box")}).code, kExitNegative);
  EXPECT_EQ(invoke({"jdc", data("not_selective")}).code, kExitNegative);
  EXPECT_EQ(invoke({"jdc", data("malformed")}).code, kExitInputError);
}

TEST(Cli, BadArguments) {
  EXPECT_EQ(invoke({}).code, kExitInputError);
  EXPECT_EQ(invoke({"frobnicate"}).code, kExitInputError);
  EXPECT_EQ(invoke({"check"}).code, kExitInputError);
  EXPECT_EQ(invoke({"check", data("product"), "--no-such-flag"}).code, kExitInputError);
  EXPECT_EQ(invoke({"check", data("product"), "--max-len", "x"}).code, kExitInputError);
  EXPECT_EQ(invoke({"check", data("product"), "--metric", R"({"kind": "nope"})"}).code, kExitInputError);
  EXPECT_EQ(invoke({"check", data("product"), "--arithmetic", "decimal"}).code, kExitInputError);
  EXPECT_EQ(invoke({"--help"}).code, kExitPass);
}

TEST(Cli, JdcCapIsInputError) {
  const Invocation r = invoke({"jdc", data("pr_box"), "--cap", "10", "--json"});
  EXPECT_EQ(r.code, kExitInputError);
  const auto j = io::json::parse(r.out);
  EXPECT_EQ(j["error"]["code"], "HiddenSpaceTooLarge");
}

TEST(Cli, JsonIsDeterministic) {
  for (const char* cmd : {"check", "jdc"}) {
    for (const char* f : {"pr_box", "fine_feasible", "restricted"}) {
      const Invocation a = invoke({cmd, data(f), "--json"});
      const Invocation b = invoke({cmd, data(f), "--json"});
      EXPECT_EQ(a.out, b.out) << cmd << " " << f;
      EXPECT_FALSE(a.out.empty());
      EXPECT_EQ(a.out.back(), '\n');
    }
  }
  EXPECT_EQ(invoke({"demo-normal", "--json", "--rho-grid"}).out, invoke({"demo-normal", "--json", "--rho-grid"}).out);
}

TEST(Cli, HumanOutputIsRenderedFromJson) {
  for (const char* f : {"pr_box", "product", "not_selective"}) {
    const Invocation j = invoke({"check", data(f), "--json"});
    const Invocation h = invoke({"check", data(f)});
    EXPECT_EQ(h.out, render_human(io::json::parse(j.out))) << f;
  }
  const Invocation j = invoke({"jdc", data("pr_box"), "--json"});
  EXPECT_EQ(invoke({"jdc", data("pr_box")}).out, render_human(io::json::parse(j.out)));
}

TEST(Cli, CheckReportOnPrBox) {
  const auto j = io::json::parse(invoke({"check", data("pr_box"), "--json"}).out);
  EXPECT_EQ(j["verdict"], "chain inequality violated");
  EXPECT_TRUE(j["marginal_selectivity"]["selective"]);
  ASSERT_FALSE(j["violations"].empty());
  for (const auto& v : j["violations"]) {
    EXPECT_TRUE(v["violated"]);
    EXPECT_LT(v["residual"].get<double>(), 0.0);
  }
}

TEST(Cli, CheckMaxLenAndMetrics) {
  const auto j2 = io::json::parse(invoke({"check", data("restricted"), "--json", "--max-len", "3"}).out);
  const auto j6 = io::json::parse(invoke({"check", data("restricted"), "--json", "--max-len", "6"}).out);
  EXPECT_LT(j2["sequences_tested"].get<long>(), j6["sequences_tested"].get<long>());
  EXPECT_TRUE(j2["truncated"]);
  EXPECT_FALSE(j6["truncated"]);
  const Invocation m = invoke({"check", data("product"), "--json", "--metric", data("metrics"), "--metric", R"({"kind": "p", "p": 2})"});
  EXPECT_EQ(m.code, kExitPass);
  const auto jm = io::json::parse(m.out);
  EXPECT_EQ(jm["metrics"].size(), 10u);
  const Invocation t = invoke({"check", data("restricted"), "--json", "--cap", "5"});
  EXPECT_EQ(t.code, kExitInputError);
  EXPECT_EQ(io::json::parse(t.out)["error"]["code"], "CapExceeded");
}

TEST(Cli, JdcReportOnPrBox) {
  const auto j = io::json::parse(invoke({"jdc", data("pr_box"), "--json"}).out);
  EXPECT_FALSE(j["feasible"]);
  EXPECT_TRUE(j["witness"].is_null());
  ASSERT_TRUE(j["certificate"].is_array());
  EXPECT_FALSE(j["certificate"].empty());
  EXPECT_EQ(j["fine"]["values_exact"], io::json::array({"-1/2", "-1/2", "1/2", "-1/2"}));
  EXPECT_EQ(j["fine"]["violations"], io::json::array({"e3 <= 0"}));
}

TEST(Cli, JdcReportOnFeasible) {
  const auto j = io::json::parse(invoke({"jdc", data("fine_feasible"), "--json"}).out);
  EXPECT_TRUE(j["feasible"]);
  EXPECT_TRUE(j["certificate"].is_null());
  ASSERT_TRUE(j["witness"].is_array());
  EXPECT_TRUE(j["fine"]["all_hold"]);
}

TEST(Cli, DemoNormal) {
  const Invocation r = invoke({"demo-normal", "--json"});
  EXPECT_EQ(r.code, kExitPass);
  const auto j = io::json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["lhs"].get<double>(), 0.25);
  EXPECT_DOUBLE_EQ(j["rhs"].get<double>(), 0.0);
  EXPECT_DOUBLE_EQ(j["residual"].get<double>(), -0.25);
  EXPECT_TRUE(j["violated"]);
  EXPECT_FALSE(j.contains("rho_grid"));
  const auto g = io::json::parse(invoke({"demo-normal", "--json", "--rho-grid"}).out);
  EXPECT_EQ(g["rho_grid"].size(), 21u);
  EXPECT_TRUE(g["rho_grid_monotone"]);
  EXPECT_FALSE(invoke({"demo-normal"}).out.empty());
}
