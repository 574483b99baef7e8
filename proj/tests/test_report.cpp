#include <gtest/gtest.h>

#include <random>

#include "autojournal/error.hpp"
#include "autojournal/report.hpp"
#include "support/fixtures.hpp"

using namespace autojournal;
using namespace autojournal::pipeline;
using journal::StreamTag;

namespace {

ReportRow row(const std::string& p, const std::string& d, StreamTag s, double ev, double fe) {
  ReportRow r{p, d, s, {}};
  r.scores.event_t = r.scores.event_p = r.scores.event_overall = ev;
  r.scores.feeling_t = r.scores.feeling_p = r.scores.feeling_overall = fe;
  return r;
}

EvalReport grid_3x5() {
  // invented values, stable for the golden rendering
  const double ev[3][5] = {{0.91, 0.88, 0.95, 0.90, 0.87}, {0.93, 0.89, 0.92, 0.94, 0.90},
                           {0.86, 0.91, 0.89, 0.93, 0.95}};
  const double fe[3][5] = {{0.96, 0.94, 0.97, 0.93, 0.95}, {0.92, 0.95, 0.94, 0.91, 0.96},
                           {0.97, 0.93, 0.92, 0.95, 0.94}};
  const char* who[3] = {"Carol", "Alice", "Bob"};
  EvalReport r;
  for (int p = 0; p < 3; ++p) {
    for (int d = 4; d >= 0; --d) {
      r.rows.push_back(row(who[p], "2024-05-0" + std::to_string(d + 1), StreamTag::Text, ev[p][d], fe[p][d]));
    }
  }
  return r;
}

}  // namespace

TEST(Report, SingleRowCells) {
  EvalReport r;
  r.rows.push_back(row("p", "2024-05-01", StreamTag::Text, 0.91, 0.96));
  const auto text = render_report(r);
  const std::string expected =
      "Stream: text\n"
      "      p\n"
      "Day   event   feeling\n"
      "1     0.91    0.96\n"
      "Mean  0.91    0.96\n";
  EXPECT_EQ(text, expected);
}

TEST(Report, EmptyIsMalformed) {
  try {
    render_report(EvalReport{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedReport);
  }
  EXPECT_THROW(parse_report_csv(to_csv(EvalReport{})), Error);
  EXPECT_THROW(parse_report_csv(""), Error);
  EXPECT_THROW(parse_report_csv("participant,date\n"), Error);
  auto bad = to_csv(grid_3x5());
  bad.replace(bad.find("0.91"), 4, "1.91");
  EXPECT_THROW(parse_report_csv(bad), Error);
}

TEST(Report, GoldenThreeByFive) {
  const auto text = render_report(grid_3x5());
  EXPECT_EQ(text, ajtest::read_text(std::filesystem::path(AJ_TEST_GOLDEN_DIR) / "report_3x5.txt"));
}

TEST(Report, CsvRoundTripIsLossless) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  EvalReport r;
  for (int i = 0; i < 30; ++i) {
    ReportRow x{"p" + std::to_string(i % 3), "2024-05-0" + std::to_string(1 + i % 5),
                i % 2 ? StreamTag::Video : StreamTag::Text, {}};
    x.scores = {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), i % 3 == 0, i % 4 == 0};
    r.rows.push_back(x);
  }
  r.sort();
  const auto back = parse_report_csv(to_csv(r));
  ASSERT_EQ(back.rows.size(), r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto &a = r.rows[i].scores, &b = back.rows[i].scores;
    EXPECT_EQ(a.event_t, b.event_t);
    EXPECT_EQ(a.event_p, b.event_p);
    EXPECT_EQ(a.event_overall, b.event_overall);
    EXPECT_EQ(a.feeling_t, b.feeling_t);
    EXPECT_EQ(a.feeling_p, b.feeling_p);
    EXPECT_EQ(a.feeling_overall, b.feeling_overall);
    EXPECT_EQ(a.event_warning, b.event_warning);
    EXPECT_EQ(a.feeling_warning, b.feeling_warning);
  }
  EXPECT_EQ(to_csv(back), to_csv(r));
}

TEST(Report, ParticipantMeans) {
  const auto means = participant_means(grid_3x5());
  ASSERT_EQ(means.size(), 3u);
  EXPECT_EQ(means[0].participant, "Alice");
  EXPECT_EQ(means[0].days, 5u);
  EXPECT_NEAR(means[0].event_overall, (0.93 + 0.89 + 0.92 + 0.94 + 0.90) / 5, 1e-12);
}
