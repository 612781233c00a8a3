#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "msmc/data.hpp"
#include "msmc/error.hpp"

using namespace msmc;

namespace {

SeriesDataset parse(const std::string& text, Transformation t = Transformation::none) {
  std::istringstream in(text);
  return parse_series(in, t, "test");
}

}  // namespace

TEST(Ingest, LogDiffHandComputation) {
  const auto d = parse("1,100\n2,101\n", Transformation::log_diff_100);
  ASSERT_EQ(d.values.size(), 1u);
  EXPECT_NEAR(d.values[0], 100.0 * std::log(1.01), 1e-12);
  EXPECT_NEAR(d.values[0], 0.99503, 1e-5);
  EXPECT_EQ(d.labels, (std::vector<std::string>{"2"}));
}

TEST(Ingest, NonePassesValuesThrough) {
  const auto d = parse("# comment\ndate,value\n2001Q1,1.5\n2001Q2,-0.25\n2001Q3,3\n");
  EXPECT_EQ(d.values, (std::vector<double>{1.5, -0.25, 3.0}));
  EXPECT_EQ(d.labels.front(), "2001Q1");
}

TEST(Ingest, SingleColumn) {
  const auto d = parse("value\n1\n2\n4\n", Transformation::log_diff_100);
  ASSERT_EQ(d.values.size(), 2u);
  EXPECT_NEAR(d.values[1], 100.0 * std::log(2.0), 1e-12);
}

TEST(Ingest, Errors) {
  try {
    parse("1,1.0\n2,abc\n");
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse("1,1.0\n2,\n"), InvalidInput);
  EXPECT_THROW(parse("1,1.0\n2,NA\n"), InvalidInput);
  EXPECT_THROW(parse("2,1.0\n1,2.0\n"), InvalidInput);
  EXPECT_THROW(parse("1,1.0\n1,2.0\n"), InvalidInput);
  EXPECT_THROW(parse("1,1.0\n2,0.0\n", Transformation::log_diff_100), InvalidInput);
  EXPECT_THROW(parse("1,5.0\n", Transformation::log_diff_100), InvalidInput);
  EXPECT_THROW(ingest_series("/nonexistent/file.csv", Transformation::none), InvalidInput);
}

TEST(Ingest, HamiltonFile) {
  const auto d = ingest_series(std::string(MSMC_DATA_DIR) + "/gnp_hamilton.csv", Transformation::none);
  EXPECT_EQ(d.values.size(), 135u);
  EXPECT_EQ(d.labels.front(), "1951Q2");
  EXPECT_EQ(d.labels.back(), "1984Q4");
}

TEST(Ingest, TransformationNames) {
  EXPECT_EQ(parse_transformation("logdiff100"), Transformation::log_diff_100);
  EXPECT_EQ(parse_transformation("none"), Transformation::none);
  EXPECT_THROW(parse_transformation("log"), InvalidInput);
}
