#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "statealign/error.hpp"
#include "statealign/ingest.hpp"

namespace sa = statealign;

namespace {

// Rows for series `id` at t0 + i * stride, value base + i, skipping `holes`.
std::string rows(const std::string& id, int count, int stride, double base, std::vector<int> holes = {},
                 const std::string& extra = "") {
  std::ostringstream os;
  for (int i = 0; i < count; ++i) {
    const bool hole = std::find(holes.begin(), holes.end(), i) != holes.end();
    os << 1000 + i * stride << ',' << id << ',';
    if (!hole) os << base + i;
    os << extra << '\n';
  }
  return os.str();
}

}  // namespace

TEST(Ingest, ThreeSeries) {
  const std::string text = "timestamp,series_id,value\n" + rows("b", 10, 60, 0) + rows("a", 10, 60, 5) +
                           rows("c", 10, 60, -2);
  const auto r = sa::ingest_csv_text(text, std::nullopt);
  ASSERT_EQ(r.segments.size(), 3u);
  EXPECT_EQ(r.segments[0].series_id, "a");
  EXPECT_EQ(r.segments[2].series_id, "c");
  EXPECT_EQ(r.stride, 60);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_EQ(r.segments[0].values[3], 8.0);
  EXPECT_EQ(r.segments[1].timestamps.front(), 1000);
  EXPECT_NO_THROW(r.segments[1].validate());
}

TEST(Ingest, ShortGapIsInterpolated) {
  const std::string text =
      "timestamp,series_id,value\n" + rows("a", 10, 60, 0, {4}) + rows("b", 10, 60, 0, {6, 7});
  const auto r = sa::ingest_csv_text(text, std::nullopt);
  ASSERT_EQ(r.segments.size(), 2u);
  EXPECT_DOUBLE_EQ(r.segments[0].values[4], 4.0);
  EXPECT_DOUBLE_EQ(r.segments[1].values[6], 6.0);
  EXPECT_DOUBLE_EQ(r.segments[1].values[7], 7.0);
  ASSERT_EQ(r.filled.size(), 2u);
  EXPECT_EQ(r.filled[0].series_id, "a");
  EXPECT_EQ(r.filled[0].first_missing, 1000 + 4 * 60);
  EXPECT_EQ(r.filled[0].points, 1);
  EXPECT_EQ(r.filled[1].points, 2);
  EXPECT_EQ(r.warnings.size(), 2u);
}

TEST(Ingest, LongGapRejectsTheSeries) {
  const std::string text =
      "timestamp,series_id,value\n" + rows("a", 10, 60, 0, {3, 4, 5}) + rows("b", 10, 60, 0) + rows("c", 10, 60, 1);
  const auto r = sa::ingest_csv_text(text, std::nullopt);
  EXPECT_EQ(r.rejected, (std::vector<std::string>{"a"}));
  EXPECT_EQ(r.segments.size(), 2u);
}

TEST(Ingest, MinorityStrideIsRejected) {
  const std::string text = "timestamp,series_id,value\n" + rows("a", 20, 60, 0) + rows("b", 20, 60, 1) +
                           rows("slow", 4, 300, 0);
  const auto r = sa::ingest_csv_text(text, std::nullopt);
  EXPECT_EQ(r.rejected, (std::vector<std::string>{"slow"}));
  ASSERT_EQ(r.segments.size(), 2u);
  ASSERT_FALSE(r.warnings.empty());
  EXPECT_NE(r.warnings[0].find("IrregularStride"), std::string::npos);
  EXPECT_NE(r.warnings[0].find("slow"), std::string::npos);
}

TEST(Ingest, LabelsAndDimensions) {
  const std::string text = "timestamp,series_id,value,device,group_label\n" + rows("a", 5, 60, 0, {}, ",ios,g1") +
                           rows("b", 5, 60, 0, {}, ",web,g2");
  const auto r = sa::ingest_csv_text(text, std::nullopt);
  ASSERT_EQ(r.segments.size(), 2u);
  EXPECT_EQ(r.segments[0].meta.group_label, "g1");
  ASSERT_EQ(r.segments[1].meta.dimension_labels.size(), 1u);
  EXPECT_EQ(r.segments[1].meta.dimension_labels[0], std::make_pair(std::string("device"), std::string("web")));
}

TEST(Ingest, WindowAndCommonSpan) {
  const std::string text = "timestamp,series_id,value\n" + rows("a", 10, 60, 0) + rows("b", 8, 60, 0);
  const auto r = sa::ingest_csv_text(text, std::nullopt);
  EXPECT_EQ(r.segments[0].size(), 8u);
  const auto w = sa::ingest_csv_text(text, sa::TimeWindow{1060, 1240});
  EXPECT_EQ(w.segments[0].size(), 4u);
  EXPECT_EQ(w.segments[0].timestamps.front(), 1060);
}

TEST(Ingest, ParseErrorsReportRowAndColumn) {
  const auto detail = [](const std::string& text) {
    try {
      sa::ingest_csv_text(text, std::nullopt);
    } catch (const sa::Error& e) {
      EXPECT_EQ(e.code(), sa::ErrorCode::ParseError);
      return e.detail();
    }
    return std::string("no error");
  };
  EXPECT_EQ(detail("timestamp,series_id,value\n1,a,1\n2,a,x\n").substr(0, 20), "row 3, column 'value");
  EXPECT_EQ(detail("timestamp,series_id,value\nnoon,a,1\n").substr(0, 24), "row 2, column 'timestamp");
  EXPECT_NE(detail("timestamp,value\n1,1\n").find("series_id"), std::string::npos);
  EXPECT_NE(detail("timestamp,series_id,value\n1,a,1\n1,a,2\n").find("duplicate timestamp"), std::string::npos);
  EXPECT_NE(detail("timestamp,series_id,value\n1,a\n").find("row 2"), std::string::npos);
}

TEST(Ingest, CsvRoundTrip) {
  const std::string text = "timestamp,series_id,value,group_label\n" + rows("a", 6, 60, 0.125, {}, ",x") +
                           rows("b", 6, 60, 1e-7, {}, ",y");
  const auto first = sa::ingest_csv_text(text, std::nullopt);
  const auto second = sa::ingest_csv_text(sa::to_csv(first.segments), std::nullopt);
  ASSERT_EQ(first.segments.size(), second.segments.size());
  for (std::size_t i = 0; i < first.segments.size(); ++i) {
    EXPECT_EQ(first.segments[i].values, second.segments[i].values);
    EXPECT_EQ(first.segments[i].meta, second.segments[i].meta);
  }
}

TEST(Ingest, MissingFile) {
  EXPECT_THROW(sa::ingest_csv("/nonexistent/input.csv", std::nullopt), sa::Error);
}
