#include <gtest/gtest.h>

#include "acc2dc/errors.hpp"
#include "acc2dc/report.hpp"
#include "fixtures.hpp"

using namespace acc2dc;
using namespace acc2dc::testing;

namespace {

ModeResults corpus_results(std::initializer_list<Mode> modes) {
  ModeResults results;
  auto config = corpus_config().analysis;
  for (const auto &path : corpus_files()) {
    auto src = load_source(read_text(path), path);
    for (auto m : modes)
      results[m].push_back(transform_file(src, m, config));
  }
  return results;
}

MigrationReport with_counts(std::vector<std::pair<Mode, std::size_t>> counts) {
  MigrationReport r;
  for (auto [m, n] : counts) {
    VersionSummary s;
    s.mode = m;
    s.acc_lines = n;
    r.summaries.push_back(s);
  }
  return r;
}

} // namespace

TEST(Report, SummaryCountsMatchOutputs) {
  auto results = corpus_results({Mode::A, Mode::AD, Mode::D2XU});
  auto summaries = version_summary(results);
  ASSERT_EQ(summaries.size(), 3u);
  for (const auto &s : summaries) {
    std::size_t acc = 0, total = 0;
    for (const auto &r : results.at(s.mode)) {
      acc += r.counts_after.total;
      total += r.output.line_count();
    }
    EXPECT_EQ(s.acc_lines, acc);
    EXPECT_EQ(s.total_lines, total);
    EXPECT_EQ(s.files.size(), corpus_files().size());
    EXPECT_TRUE(std::is_sorted(s.files.begin(), s.files.end(),
                               [](const auto &a, const auto &b) { return a.path < b.path; }));
  }
  EXPECT_EQ(summaries[0].recommended_flags, "-acc=gpu -gpu=cc80");
  EXPECT_EQ(summaries[2].acc_lines, 0u);
}

TEST(Report, MismatchedFileSetsAreRejected) {
  auto results = corpus_results({Mode::A, Mode::AD});
  results[Mode::AD].pop_back();
  EXPECT_THROW(version_summary(results), ReportError);
}

TEST(Report, CensusIsTheInputCensus) {
  auto results = corpus_results({Mode::AD, Mode::D2XU});
  auto report = build_report(results);
  CensusReport expected;
  for (const auto &path : corpus_files())
    expected += directive_census(load_source(read_text(path), path));
  EXPECT_EQ(report.census, expected);
}

TEST(Report, OrderingCheck) {
  auto ok = compare_modes(with_counts({{Mode::A, 30}, {Mode::AD, 12}, {Mode::ADU, 5}, {Mode::AD2XU, 2},
                                       {Mode::D2XU, 0}}));
  EXPECT_TRUE(ok.pass);
  auto bad = compare_modes(with_counts({{Mode::A, 30}, {Mode::AD, 31}, {Mode::D2XU, 0}}));
  EXPECT_FALSE(bad.pass);
  ASSERT_TRUE(bad.violation);
  EXPECT_EQ(*bad.violation, std::make_pair(Mode::A, Mode::AD));
  auto d2xad = compare_modes(with_counts({{Mode::D2XU, 3}, {Mode::D2XAd, 1}}));
  EXPECT_FALSE(d2xad.pass);
  EXPECT_TRUE(compare_modes(with_counts({{Mode::D2XU, 0}, {Mode::D2XAd, 13}})).pass);
}

TEST(Report, DiagnosticOrder) {
  std::vector<Diagnostic> d{
      {Severity::Info, "b", "m", "y.f90", 3, Mode::AD},
      {Severity::Warning, "a", "m", "x.f90", 3, Mode::AD},
      {Severity::Info, "a", "m", "x.f90", 3, Mode::AD},
      {Severity::Info, "z", "m", "a.f90", 1, Mode::D2XU},
      {Severity::Info, "a", "m", "x.f90", 1, Mode::AD},
  };
  sort_diagnostics(d);
  EXPECT_EQ(d[0].line, 1u);
  EXPECT_EQ(d[1].severity, Severity::Info);
  EXPECT_EQ(d[1].line, 3u);
  EXPECT_EQ(d[2].severity, Severity::Warning);
  EXPECT_EQ(d[3].file, "y.f90");
  EXPECT_EQ(d[4].mode, Mode::D2XU);
}

TEST(Report, JsonRoundTrip) {
  auto report = build_report(corpus_results({Mode::A, Mode::AD, Mode::ADU, Mode::AD2XU, Mode::D2XU,
                                             Mode::D2XAd}));
  auto json = serialize_report(report);
  for (const char *key : {"\"census\"", "\"summaries\"", "\"diagnostics\"", "\"action_required\"",
                          "\"info\""})
    EXPECT_NE(json.find(key), std::string::npos) << key;
  auto back = parse_report(json);
  EXPECT_EQ(back, report);
  EXPECT_EQ(serialize_report(back), json);
}

TEST(Report, MalformedJson) {
  EXPECT_THROW(parse_report("{"), ReportError);
  EXPECT_THROW(parse_report("{\"census\": 3}"), ReportError);
  EXPECT_THROW(parse_report("[]"), ReportError);
}

TEST(Report, TableLayout) {
  auto report = build_report(corpus_results({Mode::A, Mode::D2XU}));
  auto table = render_table(report);
  EXPECT_NE(table.find("Code Version"), std::string::npos);
  EXPECT_NE(table.find("1: A"), std::string::npos);
  EXPECT_NE(table.find("5: D2XU"), std::string::npos);
  EXPECT_NE(table.find("-stdpar=gpu -gpu=cc80 -Minline=reshape,name:"), std::string::npos);
  EXPECT_NE(table.find("continuation"), std::string::npos);
}
