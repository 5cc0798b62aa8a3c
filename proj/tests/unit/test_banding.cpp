#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "multimax/banding.hpp"
#include "multimax/errors.hpp"
#include "support/builders.hpp"

namespace multimax {
namespace {

using testing::build_catalog;
using testing::RunSpec;

// Predictions over n instances (all labelled favourable) with `errors` misses.
std::vector<BinaryClass> with_errors(std::size_t n, std::size_t errors) {
  std::vector<BinaryClass> v(n, 1);
  for (std::size_t i = 0; i < errors; ++i) v[i] = 0;
  return v;
}

RunCatalog catalog_with_errors(std::size_t n, const std::vector<std::size_t>& errors) {
  std::vector<RunSpec> specs;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    specs.push_back({fmt::format("run{:02}", i), with_errors(n, errors[i]), std::nullopt});
  }
  return build_catalog(std::vector<BinaryClass>(n, 1), specs);
}

TEST(BandingPolicy, ParsesAndPrints) {
  EXPECT_EQ(BandingPolicy::parse("strict").str(), "strict");
  EXPECT_EQ(BandingPolicy::parse("round:3").str(), "round:3");
  EXPECT_EQ(BandingPolicy::parse("tol:0.005").str(), "tol:1/200");
  EXPECT_EQ(BandingPolicy{}.str(), "round:2");
  EXPECT_THROW(BandingPolicy::parse("round:0"), ValidationError);
  EXPECT_THROW(BandingPolicy::parse("round:x"), ValidationError);
  EXPECT_THROW(BandingPolicy::parse("tol:-0.1"), ValidationError);
  EXPECT_THROW(BandingPolicy::parse("loose"), ValidationError);
}

TEST(BandingPolicy, TieBreakValidation) {
  auto p = BandingPolicy::strict();
  p.tie_break = parse_tie_break("specificity,recall");
  EXPECT_NO_THROW(p.validate());
  p.tie_break = parse_tie_break("accuracy,recall");
  EXPECT_THROW(p.validate(), ValidationError);
  p.tie_break = parse_tie_break("recall,recall");
  EXPECT_THROW(p.validate(), ValidationError);
}

TEST(Partition, StrictGroupsEqualUtilities) {
  auto catalog = catalog_with_errors(100, {2, 2, 1, 7, 2});
  const auto banding = partition(catalog, BandingPolicy::strict());
  ASSERT_EQ(banding.bands.size(), 3u);
  EXPECT_EQ(banding.bands[0].label, "99/100");
  EXPECT_EQ(banding.bands[1].label, "98/100");
  EXPECT_EQ(banding.bands[1].run_ids, (std::vector<std::string>{"run00", "run01", "run04"}));
  EXPECT_EQ(banding.bands[2].epsilon_display, "0.9300");
  EXPECT_FALSE(banding.overlapping);
}

TEST(Partition, RoundedMergesNearbyUtilities) {
  // 0.995 rounds to 1.00, 0.994 to 0.99.
  auto catalog = catalog_with_errors(1000, {5, 6, 4, 0, 15});
  const auto banding = partition(catalog, BandingPolicy::rounded(2));
  // 0.985 sits exactly half-way and joins 0.99.
  ASSERT_EQ(banding.bands.size(), 2u);
  EXPECT_EQ(banding.bands[0].label, "1.00");
  EXPECT_EQ(banding.bands[0].run_ids, (std::vector<std::string>{"run00", "run02", "run03"}));
  EXPECT_EQ(banding.bands[1].label, "0.99");
  EXPECT_EQ(banding.bands[1].run_ids, (std::vector<std::string>{"run01", "run04"}));
}

TEST(Partition, ToleranceMayOverlap) {
  auto catalog = catalog_with_errors(100, {0, 1, 2});
  const auto banding = partition(catalog, BandingPolicy::parse("tol:0.01"));
  ASSERT_EQ(banding.bands.size(), 3u);
  EXPECT_TRUE(banding.overlapping);
  EXPECT_EQ(banding.bands[1].run_ids.size(), 3u);
  EXPECT_EQ(banding.bands[1].label, "[49/50, 1/1]");

  const auto zero = partition(catalog, BandingPolicy::parse("tol:0"));
  EXPECT_FALSE(zero.overlapping);
  EXPECT_EQ(zero.bands.size(), 3u);
}

TEST(Partition, ToleranceWithExplicitAnchors) {
  auto catalog = catalog_with_errors(100, {0, 1, 5});
  auto policy = BandingPolicy::tolerance(SignedRatio(1, 100), {ExactRatio(995, 1000)});
  const auto banding = partition(catalog, policy);
  ASSERT_EQ(banding.bands.size(), 1u);
  EXPECT_EQ(banding.bands[0].run_ids, (std::vector<std::string>{"run00", "run01"}));
}

TEST(Partition, IndependentOfRunOrder) {
  auto a = catalog_with_errors(50, {3, 1, 4, 1, 5, 9, 2, 6});
  std::vector<RunSpec> specs;
  const std::vector<std::size_t> errors{3, 1, 4, 1, 5, 9, 2, 6};
  for (std::size_t i = errors.size(); i-- > 0;) {
    specs.push_back({fmt::format("run{:02}", i), with_errors(50, errors[i]), std::nullopt});
  }
  auto b = build_catalog(std::vector<BinaryClass>(50, 1), specs);
  for (const auto& policy : {BandingPolicy::strict(), BandingPolicy::rounded(1)}) {
    const auto x = partition(a, policy);
    const auto y = partition(b, policy);
    ASSERT_EQ(x.bands.size(), y.bands.size());
    for (std::size_t i = 0; i < x.bands.size(); ++i) {
      EXPECT_EQ(x.bands[i].label, y.bands[i].label);
      EXPECT_EQ(x.bands[i].run_ids, y.bands[i].run_ids);
    }
  }
}

TEST(Partition, EveryRunLandsInExactlyOneNonToleranceBand) {
  testing::TestRng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::size_t> errors;
    for (std::size_t i = 0; i < rng.between(1, 30); ++i) errors.push_back(rng.between(0, 40));
    auto catalog = catalog_with_errors(40, errors);
    for (const auto& policy : {BandingPolicy::strict(), BandingPolicy::rounded(1),
                               BandingPolicy::rounded(2)}) {
      const auto banding = partition(catalog, policy);
      std::multiset<std::string> seen;
      for (const auto& band : banding.bands) {
        for (const auto& id : band.run_ids) {
          seen.insert(id);
          EXPECT_TRUE(band.admits(catalog.at(id).utility()));
        }
      }
      EXPECT_EQ(seen.size(), catalog.size());
      for (const auto& run : catalog.runs()) EXPECT_EQ(seen.count(run.id()), 1u);
      for (std::size_t i = 1; i < banding.bands.size(); ++i) {
        EXPECT_GT(banding.bands[i - 1].epsilon, banding.bands[i].epsilon);
      }
    }
  }
}

TEST(Refinement, SplitsByMetricTupleDescending) {
  // Labels: 2 favourable, 2 unfavourable. Three runs with one error each.
  auto catalog = build_catalog({1, 1, 0, 0}, {{"fn", {0, 1, 0, 0}, std::nullopt},
                                              {"fp", {1, 1, 1, 0}, std::nullopt},
                                              {"fn2", {1, 0, 0, 0}, std::nullopt}});
  auto policy = BandingPolicy::strict();
  policy.tie_break = {MetricKind::specificity, MetricKind::recall};
  const auto banding = partition(catalog, policy);
  ASSERT_EQ(banding.bands.size(), 2u);
  EXPECT_EQ(banding.bands[0].label, "3/4 | specificity=2/2, recall=1/2");
  EXPECT_EQ(banding.bands[0].run_ids, (std::vector<std::string>{"fn", "fn2"}));
  EXPECT_EQ(banding.bands[1].label, "3/4 | specificity=1/2, recall=2/2");
  EXPECT_TRUE(banding.bands[1].admits(catalog.at("fp").confusion()));
  EXPECT_FALSE(banding.bands[1].admits(catalog.at("fn").confusion()));
}

TEST(Refinement, UndefinedMetricNamesRunAndMetric) {
  auto catalog = build_catalog({0, 0}, {{"only", {0, 0}, std::nullopt}});
  auto policy = BandingPolicy::strict();
  policy.tie_break = {MetricKind::recall};
  try {
    (void)partition(catalog, policy);
    FAIL() << "expected ComputationError";
  } catch (const ComputationError& e) {
    EXPECT_NE(std::string(e.what()).find("only"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("recall"), std::string::npos);
  }
}

TEST(BandCounts, NonIncreasingUnderCoarserRounding) {
  testing::TestRng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::size_t> errors;
    for (int i = 0; i < 40; ++i) errors.push_back(rng.between(0, 300));
    auto catalog = catalog_with_errors(997, errors);
    std::vector<BandingPolicy> policies{BandingPolicy::strict(), BandingPolicy::rounded(3),
                                        BandingPolicy::rounded(2), BandingPolicy::rounded(1)};
    const auto counts = band_counts(catalog, policies);
    for (std::size_t i = 1; i < counts.size(); ++i) EXPECT_LE(counts[i].bands, counts[i - 1].bands);
  }
}

}  // namespace
}  // namespace multimax
