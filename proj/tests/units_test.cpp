#include <gtest/gtest.h>

#include "photonbits/error.hpp"
#include "photonbits/units.hpp"

using namespace photonbits;
using namespace photonbits::units;

TEST(Duration, Suffixes) {
  EXPECT_DOUBLE_EQ(parse_duration("25ns", "--dead-time"), 25e-9);
  EXPECT_DOUBLE_EQ(parse_duration("1.5us", "--tau"), 1.5e-6);
  EXPECT_DOUBLE_EQ(parse_duration("2e-7", "--tau"), 2e-7);
  EXPECT_DOUBLE_EQ(parse_duration("2e-7s", "--tau"), 2e-7);
  EXPECT_DOUBLE_EQ(parse_duration("3ms", "--tau"), 3e-3);
  EXPECT_DOUBLE_EQ(parse_duration("40ps", "--skew"), 40e-12);
}

TEST(Frequency, Suffixes) {
  EXPECT_DOUBLE_EQ(parse_frequency("48MHz", "--clock"), 48e6);
  EXPECT_DOUBLE_EQ(parse_frequency("2e6", "--rate"), 2e6);
  EXPECT_DOUBLE_EQ(parse_frequency("2e6Hz", "--rate"), 2e6);
  EXPECT_DOUBLE_EQ(parse_frequency("1.2GHz", "--clock"), 1.2e9);
  EXPECT_DOUBLE_EQ(parse_frequency("5kHz", "--clock"), 5e3);
}

TEST(Count, ExactIntegers) {
  EXPECT_EQ(parse_count("1e6", "--events"), 1'000'000u);
  EXPECT_EQ(parse_count("10000000", "--events"), 10'000'000u);
  EXPECT_EQ(parse_count("2.5e3", "--events"), 2500u);
  EXPECT_EQ(parse_count("0", "--events"), 0u);
}

TEST(Count, Rejections) {
  EXPECT_THROW(parse_count("1.5", "--events"), ConfigError);
  EXPECT_THROW(parse_count("-3", "--events"), ConfigError);
  EXPECT_THROW(parse_count("1e30", "--events"), ConfigError);
  EXPECT_THROW(parse_count("12k", "--events"), ConfigError);
}

TEST(Errors, NameTheFlag) {
  try {
    parse_duration("25 parsecs", "--dead-time");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("--dead-time"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("25 parsecs"), std::string::npos);
  }
  try {
    parse_frequency("fast", "--clock");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("--clock"), std::string::npos);
  }
}

TEST(Errors, Malformed) {
  EXPECT_THROW(parse_duration("", "--tau"), ConfigError);
  EXPECT_THROW(parse_duration("ns", "--tau"), ConfigError);
  EXPECT_THROW(parse_duration("1e400", "--tau"), ConfigError);
  EXPECT_THROW(parse_frequency("3MHzz", "--clock"), ConfigError);
  EXPECT_THROW(parse_number("0.5x", "--phase"), ConfigError);
  EXPECT_DOUBLE_EQ(parse_number("0.25", "--phase"), 0.25);
}
