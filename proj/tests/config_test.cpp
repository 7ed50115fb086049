#include "setreadout/config.hpp"
#include "setreadout/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace setreadout;

namespace {

std::string field_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "<accepted>";
}

}  // namespace

TEST(ParseConfig, EmptyDocumentGivesDefaults) {
  for (const char* text : {"", "  \n", "{}"}) {
    const auto cfg = parse_config_text(text);
    EXPECT_EQ(cfg.system.nu1(), 10000.0);
    EXPECT_DOUBLE_EQ(cfg.system.delta(), 63.5);
    EXPECT_EQ(cfg.system.J(), 50.0);
    EXPECT_EQ(cfg.tunneling.t0, 150.0);
    EXPECT_DOUBLE_EQ(1.0 / cfg.rates.gammap, 25.0);
    EXPECT_DOUBLE_EQ(1.0 / cfg.rates.gamma0, 2500.0);
    EXPECT_EQ(cfg.system.constants().k_spring, 70.0);
    EXPECT_EQ(cfg.mechanics.gradient, 4e6);
    EXPECT_NEAR(cfg.pulse.omega0, 3.5714285714, 1e-9);
    EXPECT_FALSE(cfg.pulse_frequency.has_value());
    EXPECT_TRUE(config_warnings(cfg).empty());
  }
}

TEST(ParseConfig, DeltaIsRecomputedFromFrequencies) {
  const auto cfg = parse_config_text(R"({"system": {"nu1": 9000, "nu2": 9100}})");
  EXPECT_EQ(cfg.system.delta(), 100.0);
  const auto by_delta = parse_config_text(R"({"system": {"nu1": 9000, "delta": 40}})");
  EXPECT_EQ(by_delta.system.nu2(), 9040.0);
  EXPECT_EQ(field_of(R"({"system": {"nu2": 9000, "delta": 40}})"), "system.delta");
}

TEST(ParseConfig, NegativeDeltaAcceptedWithDiagnostic) {
  const auto cfg = parse_config_text(R"({"system": {"nu1": 10000, "nu2": 9990}})");
  EXPECT_LT(cfg.system.delta(), 0.0);
  const auto warnings = config_warnings(cfg);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("weak-coupling"), std::string::npos);
}

TEST(ParseConfig, RangeErrorsNameTheField) {
  EXPECT_EQ(field_of(R"({"tunneling": {"alpha": 1.5}})"), "tunneling.alpha");
  EXPECT_EQ(field_of(R"({"tunneling": {"p_leak_drain": 1.0}})"), "tunneling.p_leak_drain");
  EXPECT_EQ(field_of(R"({"rates": {"gammap": -1}})"), "rates.gammap");
  EXPECT_EQ(field_of(R"({"system": {"nu1": 0}})"), "system.nu1");
  EXPECT_EQ(field_of(R"({"mechanics": {"spacing": 0}})"), "mechanics.spacing");
  EXPECT_EQ(field_of(R"({"constants": {"k_spring": 0}})"), "constants.k_spring");
  EXPECT_EQ(field_of(R"({"pulse": {"duration": 200}})"), "pulse.duration");
  EXPECT_EQ(field_of(R"({"pulse": {"period": 100}})"), "pulse.duration");
  EXPECT_EQ(field_of(R"({"tunneling": {"cycle_period": 300}, "pulse": {"period": 150}})"),
            "pulse.period");
}

TEST(ParseConfig, UnknownKeysRejected) {
  EXPECT_EQ(field_of(R"({"sytem": {}})"), "sytem");
  EXPECT_EQ(field_of(R"({"system": {"nu3": 1}})"), "system.nu3");
  EXPECT_EQ(field_of(R"({"tunneling": {"alpha": 0.1, "beta": 2}})"), "tunneling.beta");
}

TEST(ParseConfig, TypeErrors) {
  EXPECT_EQ(field_of(R"({"system": {"nu1": "10 GHz"}})"), "system.nu1");
  EXPECT_EQ(field_of(R"({"seed": -3})"), "seed");
  EXPECT_EQ(field_of(R"({"seed": 1.5})"), "seed");
  EXPECT_EQ(field_of(R"({"output_dir": 4})"), "output_dir");
  EXPECT_EQ(field_of(R"({"system": 4})"), "system");
  EXPECT_THROW(parse_config_text("{not json"), ValidationError);
}

TEST(ParseConfig, OptionalPulseFields) {
  const auto cfg = parse_config_text(R"({"pulse": {"duration": 100, "frequency": 20100}})");
  EXPECT_DOUBLE_EQ(cfg.pulse.omega0, 5.0);  // calibrated to the new duration
  ASSERT_TRUE(cfg.pulse_frequency.has_value());
  EXPECT_EQ(*cfg.pulse_frequency, 20100.0);
  const auto explicit_amp = parse_config_text(R"({"pulse": {"omega0": 36}})");
  EXPECT_EQ(explicit_amp.pulse.omega0, 36.0);
}

TEST(ParseConfig, SeedAndOutputDir) {
  const auto cfg = parse_config_text(R"({"seed": 18446744073709551615, "output_dir": "runs/a"})");
  EXPECT_EQ(cfg.seed, 18446744073709551615ull);
  EXPECT_EQ(cfg.output_dir, "runs/a");
}

TEST(ParseConfig, MissingFileIsIoError) {
  EXPECT_THROW(parse_config("/nonexistent/dir/config.json"), IoError);
}

TEST(ParseConfig, ReadsFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "setreadout_config_test.json";
  std::ofstream(path) << R"({"tunneling": {"alpha": 0.1}, "seed": 7})";
  const auto cfg = parse_config(path);
  EXPECT_EQ(cfg.tunneling.alpha, 0.1);
  EXPECT_EQ(cfg.seed, 7u);
  std::filesystem::remove(path);
}

TEST(ParseConfig, EchoRoundTrips) {
  const auto cfg = parse_config_text(
      R"({"system": {"nu1": 12000, "J": 20}, "anisotropy": {"D2": 3}, "tunneling": {"alpha": 0.05}, "seed": 3})");
  // The echo is itself a valid config document once derived and null keys are dropped.
  auto echo = cfg.echo();
  const auto again = cfg.echo();
  EXPECT_EQ(echo, again);
  EXPECT_NE(echo.find("\"delta\": 63.5"), std::string::npos);
}
