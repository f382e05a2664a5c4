#include <gtest/gtest.h>

#include "acc2dc/report.hpp"
#include "census_oracle.hpp"
#include "generator.hpp"

using namespace acc2dc;
using namespace acc2dc::testing;

namespace {

constexpr std::uint64_t kPrograms = 100;

ModeResults run_all(std::uint64_t seed) {
  auto src = load_source(random_program(seed), "gen" + std::to_string(seed) + ".f90");
  ModeResults results;
  for (auto m : kAllModes)
    results[m].push_back(transform_file(src, m, {}));
  return results;
}

void expect_census(const SourceFile &src, const CensusReport &c, const std::string &what) {
  auto oracle = oracle_census(emit_source(src));
  EXPECT_EQ(c.total, oracle.at("total")) << what;
  for (auto cat : kAllCensusCategories)
    EXPECT_EQ(c[cat], oracle.at(std::string(to_string(cat)))) << what << " " << to_string(cat);
  for (auto s : kAllDataSubtypes)
    EXPECT_EQ(c.detail(s), oracle.at("data_management." + std::string(to_string(s)))) << what;
}

} // namespace

TEST(Property, DirectiveCountsNeverGrowAlongTheModes) {
  for (std::uint64_t seed = 1; seed <= kPrograms; ++seed) {
    auto check = compare_modes(build_report(run_all(seed)));
    EXPECT_TRUE(check.pass) << "seed " << seed << ": " << to_string(check.violation->first) << " < "
                            << to_string(check.violation->second);
  }
}

TEST(Property, CensusMatchesOracleForEveryOutput) {
  for (std::uint64_t seed = 1; seed <= kPrograms; ++seed)
    for (const auto &[mode, list] : run_all(seed)) {
      const auto &r = list.front();
      expect_census(r.output, r.counts_after, "seed " + std::to_string(seed) + " " +
                                                  std::string(to_string(mode)));
      EXPECT_EQ(directive_census(r.output), r.counts_after);
    }
}

TEST(Property, TransformIsIdempotent) {
  for (std::uint64_t seed = 1; seed <= kPrograms; ++seed)
    for (const auto &[mode, list] : run_all(seed)) {
      const auto &once = list.front().output;
      auto twice = transform_file(once, mode, {}).output;
      EXPECT_EQ(emit_source(twice), emit_source(once))
          << "seed " << seed << " " << to_string(mode);
    }
}

TEST(Property, ModeAIsIdentity) {
  for (std::uint64_t seed = 1; seed <= kPrograms; ++seed) {
    auto text = random_program(seed);
    auto r = transform_file(load_source(text), Mode::A, {});
    EXPECT_EQ(emit_source(r.output), text);
  }
}

TEST(Property, FullModesWithoutUnsupportedRegionsLeaveNoDirectives) {
  GeneratorOptions opt;
  opt.unsupported = false;
  for (std::uint64_t seed = 1; seed <= kPrograms; ++seed) {
    auto src = load_source(random_program(seed, opt));
    auto r = transform_file(src, Mode::D2XU, {});
    EXPECT_EQ(r.counts_after.total, 0u) << "seed " << seed;
  }
}

TEST(Property, Deterministic) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed)
    EXPECT_EQ(serialize_report(build_report(run_all(seed))),
              serialize_report(build_report(run_all(seed))));
}
