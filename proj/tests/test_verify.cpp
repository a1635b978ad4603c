#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "chiral/verify.hpp"

using namespace chiral;

namespace {

SuiteConfig quick_config() {
  SuiteConfig c;
  c.grid.nt = c.grid.nx = 7;
  c.identity_count = 10;
  c.sample_count = 5;
  c.oracle_points = 10;
  return c;
}

}  // namespace

TEST(Convergence, SecondOrderAndFloor) {
  const auto t = convergence_study([](double h) { return 3.0 * h * h; }, {4e-4, 2e-4, 1e-4});
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_FALSE(t.rows[0].order.has_value());
  EXPECT_NEAR(*t.rows[2].order, 2.0, 1e-12);
  EXPECT_LT(t.worst_order_deviation(), 1e-12);
  const auto f = convergence_study([](double) { return 1e-16; }, {4e-4, 2e-4, 1e-4});
  EXPECT_TRUE(f.at_floor());
  EXPECT_EQ(f.to_json()[1]["order"], "floor");
  EXPECT_THROW(convergence_study([](double h) { return h; }, {1e-4, 2e-4, 4e-4}), ConfigError);
  EXPECT_THROW(convergence_study([](double h) { return h; }, {1e-4, 2e-4}), ConfigError);
}

TEST(Report, EntriesSortedAndPassRule) {
  ResidualReport r;
  r.add(make_entry("b", 1.0, 2.0));
  r.add(make_entry("a", 3.0, 2.0));
  r.add(make_entry("c", std::nan(""), 2.0));
  r.sort();
  EXPECT_EQ(r.entries()[0].name, "a");
  EXPECT_FALSE(r.entries()[0].pass);
  EXPECT_TRUE(r.entries()[1].pass);
  EXPECT_FALSE(r.entries()[2].pass);
  const Json j = r.to_json(Json::object());
  EXPECT_EQ(j["entries"][2]["context"]["non_finite"], true);
  EXPECT_FALSE(j["pass"].get<bool>());
}

TEST(Config, JsonOverlayAndErrors) {
  SuiteConfig c;
  apply_config_json(c, Json::parse(R"({"p": 2, "thetas": [1.0, 2.0], "K": 1,
      "grid": {"nt": 5}, "tolerances": {"derivative": 0}, "lambdas": [0.5, [0.1, 0.2]]})"));
  EXPECT_EQ(c.p, 2.0);
  EXPECT_EQ(c.K, 1u);
  EXPECT_EQ(c.grid.nt, 5u);
  EXPECT_EQ(c.tolerances.derivative, 0.0);
  EXPECT_EQ(c.lambdas[1], Complex(0.1, 0.2));
  EXPECT_THROW(apply_config_json(c, Json::parse(R"({"bogus": 1})")), ConfigError);
  EXPECT_THROW(apply_config_json(c, Json::parse(R"({"grid": {"nz": 1}})")), ConfigError);
  EXPECT_THROW(apply_config_json(c, Json::parse(R"({"tolerances": {"x": 1}})")), ConfigError);
  EXPECT_THROW(apply_config_json(c, Json::parse(R"({"K": "two"})")), ConfigError);
  EXPECT_THROW(load_config_file("/nonexistent/config.json"), ConfigError);
  SuiteConfig bad;
  bad.K = 4;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Config, EchoRoundTrips) {
  SuiteConfig c = quick_config();
  c.rng_seed = 99;
  SuiteConfig d;
  apply_config_json(d, config_to_json(c));
  EXPECT_EQ(config_to_json(c).dump(), config_to_json(d).dump());
}

TEST(Suite, DefaultPassesAndIsDeterministic) {
  const SuiteConfig c = quick_config();
  const ResidualReport a = run_full_suite(c);
  for (const ResidualEntry& e : a.entries()) EXPECT_TRUE(e.pass) << e.name << " = " << e.value;
  EXPECT_TRUE(a.all_pass());
  EXPECT_EQ(report_json(a, c).dump(), report_json(run_full_suite(c), c).dump());
  for (std::size_t i = 1; i < a.entries().size(); ++i)
    EXPECT_LE(a.entries()[i - 1].name, a.entries()[i].name);
  ASSERT_NE(a.find("quasidet.nc_jacobi"), nullptr);
  ASSERT_NE(a.find("chain.K2.eom.curvature.order"), nullptr);
  ASSERT_NE(a.find("su2.two_soliton.vs_engine"), nullptr);
}

TEST(Suite, InvalidThetaIsAnEntryNotACrash) {
  SuiteConfig c = quick_config();
  c.thetas = {0.0, std::numbers::pi / 3};
  const ResidualReport r = run_full_suite(c);
  EXPECT_FALSE(r.all_pass());
  const ResidualEntry* e = r.find("spectral.validation");
  ASSERT_NE(e, nullptr);
  EXPECT_FALSE(e->pass);
  EXPECT_NE(r.find("quasidet.homological"), nullptr);
  EXPECT_TRUE(r.find("quasidet.homological")->pass);
}

TEST(Suite, DuplicateThetaWarns) {
  SuiteConfig c = quick_config();
  c.thetas = {std::numbers::pi / 2, std::numbers::pi / 2};
  const ResidualReport r = run_full_suite(c);
  const ResidualEntry* e = r.find("chain.K2.equivalence.qdet_condition");
  ASSERT_NE(e, nullptr);
  EXPECT_TRUE(e->pass);
  EXPECT_EQ(e->context["warning"], true);
}

TEST(Suite, ZeroDerivativeToleranceFailsDerivativeEntries) {
  SuiteConfig c = quick_config();
  c.K = 1;
  c.tolerances.derivative = 0.0;
  const ResidualReport r = run_full_suite(c);
  EXPECT_FALSE(r.all_pass());
  std::size_t checked = 0;
  for (const ResidualEntry& e : r.entries()) {
    const bool derivative = e.name.rfind("seed.lax", 0) == 0 || e.name.rfind("chain.K1.lax", 0) == 0 ||
                            e.name.rfind("chain.K1.eom", 0) == 0;
    if (!derivative || e.name.ends_with(".order")) continue;
    EXPECT_FALSE(e.pass) << e.name;
    ++checked;
  }
  EXPECT_GT(checked, 10u);
  EXPECT_FALSE(r.find("seed.lax[0.5+0i].plus")->pass);
}
