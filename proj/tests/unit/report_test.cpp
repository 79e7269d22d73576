#include <gtest/gtest.h>

#include <cstdlib>
#include <regex>

#include "fixtures.hpp"
#include "statealign/report.hpp"

namespace sa = statealign;

namespace {

sa::IngestResult labelled_input() {
  sa::SimSpec spec;
  spec.n_groups = 2;
  spec.series_per_group = 4;
  spec.length = 40;
  spec.seed = 3;
  sa::IngestResult in;
  in.segments = sa::generate_dataset(spec, 5.0).segments;
  in.stride = 60;
  return in;
}

}  // namespace

TEST(FormatNumber, SixSignificantDigits) {
  EXPECT_EQ(sa::format_number(0.0), "0");
  EXPECT_EQ(sa::format_number(-0.0), "0");
  EXPECT_EQ(sa::format_number(1.0 / 3.0), "0.333333");
  EXPECT_EQ(sa::format_number(123456789.0), "1.23457e+08");
  EXPECT_EQ(sa::format_number(NAN), "nan");
  EXPECT_EQ(sa::format_number(-INFINITY), "-inf");
}

TEST(InputDigest, FormatAndSensitivity) {
  auto in = labelled_input();
  const std::string d = sa::input_digest(in.segments);
  EXPECT_TRUE(std::regex_match(d, std::regex("fnv1a64:[0-9a-f]{16}")));
  EXPECT_EQ(d, sa::input_digest(in.segments));
  in.segments[3].values[7] = std::nextafter(in.segments[3].values[7], 1e300);
  EXPECT_NE(d, sa::input_digest(in.segments));
  EXPECT_EQ(sa::input_digest({}), "fnv1a64:cbf29ce484222325");
}

TEST(Report, ByteIdenticalAcrossRunsAndWorkerCounts) {
  const auto in = labelled_input();
  ::setenv("STATEALIGN_WORKERS", "1", 1);
  const auto r1 = sa::run_pipeline({}, in.segments);
  ::setenv("STATEALIGN_WORKERS", "4", 1);
  const auto r4 = sa::run_pipeline({}, in.segments);
  ::unsetenv("STATEALIGN_WORKERS");
  EXPECT_EQ(sa::report_json(r1, in), sa::report_json(r4, in));
  EXPECT_EQ(sa::report_text(r1, in), sa::report_text(r4, in));
  EXPECT_EQ(sa::report_json(r1, in), sa::report_json(sa::run_pipeline({}, in.segments), in));
}

TEST(Report, EvaluationColumns) {
  const auto in = labelled_input();
  const auto r = sa::run_pipeline({}, in.segments);
  const std::string text = sa::report_text(r, in);
  EXPECT_NE(text.find("DCI-Avg"), std::string::npos);
  EXPECT_NE(text.find("C/NC"), std::string::npos);
  EXPECT_NE(text.find("gini (weighted)"), std::string::npos);
  const std::string json = sa::report_json(r, in);
  EXPECT_NE(json.find("\"gini_weighted\""), std::string::npos);
  EXPECT_NE(json.find("\"annotation\""), std::string::npos);
  EXPECT_NE(json.find(sa::input_digest(in.segments)), std::string::npos);
}

TEST(Report, NoEvaluationWithoutLabels) {
  auto in = labelled_input();
  for (auto& s : in.segments) s.meta.group_label.reset();
  const auto r = sa::run_pipeline({}, in.segments);
  EXPECT_EQ(sa::report_json(r, in).find("\"evaluation\""), std::string::npos);
  EXPECT_EQ(sa::report_text(r, in).find("DCI-Avg"), std::string::npos);
}

TEST(Report, EmitOutputs) {
  const auto in = labelled_input();
  const auto r = sa::run_pipeline({}, in.segments);
  sa::testing::TempDir dir("report");
  const auto files = sa::emit_outputs(r, in, dir.path() / "out");
  EXPECT_EQ(files.size(), 5u);
  for (const char* name : {"report.json", "summary.txt", "dci_samples.csv", "states.csv", "classification_error.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.path() / "out" / name)) << name;
  }
  const std::string states = sa::testing::read_file(dir.path() / "out" / "states.csv");
  EXPECT_EQ(states.substr(0, states.find('\n')), "series_id,t,z,state,label");
  EXPECT_EQ(std::count(states.begin(), states.end(), '\n'), 1 + 8 * 40);
}
