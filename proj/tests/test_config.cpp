#include "fdh/config.hpp"
#include "fdh/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <string>

namespace fdh {
namespace {

Json minimal() { return Json::parse(R"({"model": {"n": 3}})"); }

std::string schema_message(const Json& doc) {
  try {
    parse_config_json(doc);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SchemaError);
    return e.what();
  }
  ADD_FAILURE() << "expected SchemaError";
  return {};
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

TEST(Config, MinimalConfigUsesDefaults) {
  const ExperimentConfig cfg = parse_config_json(minimal());
  ASSERT_TRUE(cfg.model.has_value());
  EXPECT_EQ(cfg.model->size(), 3u);
  EXPECT_EQ(cfg.coeffs.r, 0.5);
  EXPECT_NEAR(cfg.coeffs.sigma, 8.0 / 3.0, 1e-15);
  EXPECT_NEAR(cfg.coeffs.eta.at(0.0), 1.0, 1e-15);
  EXPECT_EQ(cfg.x, StateVector::Zero(3));
  EXPECT_EQ(cfg.y, cfg.x);
  EXPECT_EQ(cfg.p, 2.0);
  EXPECT_EQ(cfg.f.kind(), TestFunction::Kind::ExpNegHSq);
  EXPECT_GT(cfg.coeffs.xi.at(0.0), 0.0);
}

TEST(Config, ParsesNamedConfigs) {
  for (const char* name : {"n2_constant.json", "n4_dirichlet.json", "n4_invariant.json", "dirichlet_example.json"}) {
    const ExperimentConfig cfg = parse_config(std::string(FDH_CONFIG_DIR) + "/" + name);
    EXPECT_TRUE(cfg.model.has_value()) << name;
  }
}

TEST(Config, OffsetAlongModeHasRequestedDistance) {
  Json doc = minimal();
  doc["x"] = {0.1, 0.2, 0.3};
  doc["y"] = {{"offset_h", 0.25}, {"mode", 2}};
  const ExperimentConfig cfg = parse_config_json(doc);
  EXPECT_NEAR(cfg.model->norm_h(cfg.y - cfg.x), 0.25, 1e-14);
}

TEST(Config, ScheduleCoefficients) {
  Json doc = minimal();
  doc["coeffs"] = Json::parse(R"({"gamma": {"breaks": [0.5], "values": [1, -1]}, "xi": 0.2})");
  const ExperimentConfig cfg = parse_config_json(doc);
  EXPECT_EQ(cfg.coeffs.gamma.at(0.2), 1.0);
  EXPECT_EQ(cfg.coeffs.gamma.at(0.7), -1.0);
  EXPECT_EQ(cfg.coeffs.xi.at(0.0), 0.2);
  EXPECT_FALSE(cfg.coeffs.time_homogeneous());
}

TEST(Config, ROutOfRange) {
  Json doc = minimal();
  doc["coeffs"] = {{"r", 1.5}};
  EXPECT_TRUE(contains(schema_message(doc), "coeffs.r: r must be in (0,1)"));
}

TEST(Config, SigmaBelowFloor) {
  Json doc = minimal();
  doc["coeffs"] = {{"sigma", 1.0}};
  EXPECT_TRUE(contains(schema_message(doc), "coeffs.sigma: sigma must be >= 4/(1+r)"));
}

TEST(Config, UnknownKeyRejected) {
  Json doc = minimal();
  doc["run"] = {{"pahts", 10}};
  EXPECT_TRUE(contains(schema_message(doc), "run.pahts: unknown key"));
  doc = minimal();
  doc["extra"] = 1;
  EXPECT_TRUE(contains(schema_message(doc), "unknown key"));
}

TEST(Config, AllErrorsCollected) {
  Json doc = minimal();
  doc["coeffs"] = {{"r", 1.5}};
  doc["run"] = {{"dt", -1.0}, {"paths", 1}};
  doc["p"] = 1.0;
  const std::string msg = schema_message(doc);
  EXPECT_TRUE(contains(msg, "coeffs.r"));
  EXPECT_TRUE(contains(msg, "run.dt: must be positive"));
  EXPECT_TRUE(contains(msg, "run.paths: must be at least 2"));
  EXPECT_TRUE(contains(msg, "p: p must exceed 1"));
}

TEST(Config, ModelErrorsSurface) {
  EXPECT_TRUE(contains(schema_message(Json::parse("{}")), "model: required"));
  EXPECT_TRUE(contains(schema_message(Json::parse(R"({"model": {"n": 2, "q_diag": [1, 0]}})")), "model"));
  EXPECT_TRUE(contains(schema_message(Json::parse(R"({"model": {"n": 2, "q_diag": [1]}})")),
                       "model.q_diag: needs n entries"));
  EXPECT_TRUE(contains(
      schema_message(Json::parse(R"({"model": {"n": 2, "operator": {"matrix": [[-1, 0.5], [0, -1]]}}})")),
      "model"));
}

TEST(Config, UnknownCheckAndTestFunction) {
  Json doc = minimal();
  doc["conditions"] = {{"checks", {"hs", "bogus"}}};
  doc["F"] = "nope";
  const std::string msg = schema_message(doc);
  EXPECT_TRUE(contains(msg, "unknown check \"bogus\""));
  EXPECT_TRUE(contains(msg, "unknown test function \"nope\""));
}

TEST(Config, MissingFileIsIOError) {
  try {
    parse_config("/nonexistent/config.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IOError);
  }
}

}  // namespace
}  // namespace fdh
