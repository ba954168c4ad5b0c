#include "lossfn/cli.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

namespace lossfn {
namespace {

using Json = nlohmann::json;

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "lossfn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

Json json_of(const Run& r) { return Json::parse(r.out); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override { unsetenv("LOSSFN_FORMAT"); }
};

TEST_F(CliTest, EvalExponential) {
  const auto r = run({"eval", "--dist", "exponential", "--params", "beta=2", "--loss", "L1", "--r", "1"});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  const auto j = json_of(r);
  EXPECT_EQ(j["distribution"], "exponential");
  EXPECT_EQ(j["parameters"]["beta"], 2.0);
  EXPECT_EQ(j["loss_kind"], "L1");
  EXPECT_EQ(j["r"], 1.0);
  EXPECT_NEAR(j["value"].get<double>(), 0.06766764161830635, 1e-17);
}

TEST_F(CliTest, EvalNormalCsv) {
  const auto r = run({"--format", "csv", "eval", "--dist", "normal", "--params", "mu=0,sigma=1",
                      "--loss", "L2", "--r", "0"});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  EXPECT_EQ(r.out, "distribution,parameters,loss_kind,r,value\nnormal,mu=0;sigma=1,L2,0,0.25\n");
}

TEST_F(CliTest, EvalDiscreteNonInteger) {
  const auto r = run({"eval", "--dist", "geometric", "--params", "p=0.5", "--loss", "L1", "--r", "0.5"});
  EXPECT_EQ(r.status, kExitUsage);
  EXPECT_NE(r.err.find("discrete distribution requires integer r"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST_F(CliTest, EvalUsageErrors) {
  EXPECT_EQ(run({"eval", "--dist", "weibull", "--params", "k=1", "--loss", "L1", "--r", "1"}).status,
            kExitUsage);
  EXPECT_EQ(run({"eval", "--dist", "poisson", "--params", "mu=1", "--loss", "L1", "--r", "1"}).status,
            kExitUsage);
  EXPECT_EQ(run({"eval", "--dist", "poisson", "--params", "lambda=-1", "--loss", "L1", "--r", "1"}).status,
            kExitUsage);
  EXPECT_EQ(run({"eval", "--dist", "poisson", "--params", "lambda=1", "--loss", "L9", "--r", "1"}).status,
            kExitUsage);
  EXPECT_EQ(run({"eval", "--dist", "poisson", "--params", "lambda=1", "--loss", "L1"}).status, kExitUsage);
  EXPECT_EQ(run({}).status, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).status, kExitUsage);
}

TEST_F(CliTest, FitGamma) {
  const auto r = run({"fit", "--dist", "gamma", "--mean", "4", "--var", "8"});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  const auto j = json_of(r);
  EXPECT_EQ(j["parameters"]["alpha"], 2.0);
  EXPECT_EQ(j["parameters"]["beta"], 0.5);
  EXPECT_EQ(j["mean"], 4.0);
  EXPECT_EQ(j["variance"], 8.0);
  EXPECT_NEAR(j["achieved_mean"].get<double>(), 4.0, 1e-15);
}

TEST_F(CliTest, FitDispersion) {
  const auto r = run({"fit", "--mean", "4", "--var", "8"});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  const auto j = json_of(r);
  EXPECT_EQ(j["cd"], 2.0);
  EXPECT_EQ(j["recommendation"], "negative_binomial");
}

TEST_F(CliTest, FitInfeasible) {
  const auto r = run({"fit", "--dist", "negative_binomial", "--mean", "4", "--var", "4"});
  EXPECT_EQ(r.status, kExitUsage);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, PolicyExamples) {
  auto a = run({"policy", "--dist", "exponential", "--params", "beta=1", "--r", "0", "--q", "1"});
  ASSERT_EQ(a.status, kExitOk) << a.err;
  EXPECT_NEAR(json_of(a)["stockout_frequency"].get<double>(), 0.6321205588285577, 1e-16);
  auto b = run({"policy", "--dist", "exponential", "--params", "beta=1", "--r", "1", "--q", "2"});
  ASSERT_EQ(b.status, kExitOk) << b.err;
  EXPECT_NEAR(json_of(b)["expected_backorders"].get<double>(), 0.15904618640178919, 1e-16);
  EXPECT_EQ(run({"policy", "--dist", "poisson", "--params", "lambda=3", "--r", "2.5", "--q", "1"}).status,
            kExitUsage);
}

TEST_F(CliTest, PolicyTarget) {
  auto r = run({"policy", "--dist", "normal", "--params", "mu=100,sigma=10", "--r", "100", "--q", "50",
                "--target", "0.05"});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  const auto j = json_of(r);
  EXPECT_EQ(j["target"], 0.05);
  EXPECT_NEAR(j["reorder_point"].get<double>(), 103.44867442209667, 1e-7);
}

TEST_F(CliTest, VerifyFamily) {
  const auto r = run({"verify", "--dist", "exponential", "--tol", "1e-8"});
  ASSERT_EQ(r.status, kExitOk) << r.err;
  const auto j = json_of(r);
  EXPECT_EQ(j["summary"]["failed"], 0);
  EXPECT_GT(j["summary"]["total"].get<int>(), 0);
  EXPECT_EQ(j["summary"]["total"].get<std::size_t>(), j["cases"].size());
  for (const auto& c : j["cases"]) EXPECT_EQ(c["distribution"], "exponential");
}

TEST_F(CliTest, VerifyUnattainableTolerance) {
  const auto r = run({"verify", "--dist", "gamma", "--tol", "1e-30"});
  EXPECT_EQ(r.status, kExitVerifyFailed);
  EXPECT_GT(json_of(r)["summary"]["failed"].get<int>(), 0);
}

TEST_F(CliTest, FormatFromEnvironment) {
  setenv("LOSSFN_FORMAT", "csv", 1);
  const auto r = run({"fit", "--mean", "4", "--var", "4"});
  unsetenv("LOSSFN_FORMAT");
  ASSERT_EQ(r.status, kExitOk);
  EXPECT_EQ(r.out, "mean,variance,cd,recommendation\n4,4,1,poisson\n");
}

TEST_F(CliTest, NumbersRoundTrip) {
  const auto r = run({"eval", "--dist", "lognormal", "--params", "mu=0.3,sigma=0.7", "--loss", "L2",
                      "--r", "1.5"});
  ASSERT_EQ(r.status, kExitOk);
  const double v = json_of(r)["value"].get<double>();
  const auto c = run({"--format", "csv", "eval", "--dist", "lognormal", "--params", "mu=0.3,sigma=0.7",
                      "--loss", "L2", "--r", "1.5"});
  const auto last = c.out.substr(c.out.rfind(',') + 1);
  EXPECT_EQ(std::stod(last), v);
}

TEST(ParseParams, Basics) {
  const auto p = parse_params("mu=0,sigma=1.5");
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0].first, "mu");
  EXPECT_EQ(p[1].second, 1.5);
  EXPECT_THROW(parse_params("mu"), DomainError);
  EXPECT_THROW(parse_params("mu=abc"), DomainError);
  EXPECT_EQ(parse_format("table"), OutputFormat::Table);
  EXPECT_FALSE(parse_format("xml"));
}

}  // namespace
}  // namespace lossfn
