#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "multimax/banding.hpp"
#include "multimax/fairness.hpp"
#include "support/builders.hpp"

namespace multimax {
namespace {

PerformanceBand band_of(const RunCatalog& catalog, std::vector<std::string> ids) {
  PerformanceBand b;
  b.label = "random";
  std::sort(ids.begin(), ids.end());
  b.run_ids = std::move(ids);
  b.epsilon = catalog.at(b.run_ids.front()).utility();
  return b;
}

TEST(Property, FairEnsembleNeverLowersRecallNorRaisesSpecificity) {
  testing::TestRng rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    auto rb = testing::random_band(rng, rng.between(2, 12), rng.between(10, 120), trial % 3 == 0);
    const auto band = band_of(rb.catalog, rb.run_ids);
    const auto report = fair_ensemble(band, rb.catalog);
    const auto& eval = report.validation;
    for (const auto& id : band.run_ids) {
      const auto& cm = rb.catalog.at(id).confusion();
      if (auto r = try_metric(cm, MetricKind::recall)) EXPECT_GE(*eval.recall, *r);
      if (auto s = try_metric(cm, MetricKind::specificity)) EXPECT_LE(*eval.specificity, *s);
    }
  }
}

TEST(Property, AmbiguityBoundsDiscrepancyAndMatchesFairness) {
  testing::TestRng rng(202);
  for (int trial = 0; trial < 300; ++trial) {
    auto rb = testing::random_band(rng, rng.between(1, 10), rng.between(1, 60), trial % 2 == 0);
    const auto band = band_of(rb.catalog, rb.run_ids);
    const auto amb = ambiguity(band, rb.catalog);
    const auto stats = discrepancy(band, rb.catalog);
    if (auto m = stats.max()) EXPECT_LE(*m, amb);
    const bool all_fair = std::all_of(band.run_ids.begin(), band.run_ids.end(), [&](const auto& id) {
      return is_individually_fair(id, band, rb.catalog).fair();
    });
    const bool zero = amb.num() == 0;
    EXPECT_EQ(zero, all_fair);
    EXPECT_EQ(zero, unique_prediction_vectors(band, rb.catalog).size() == 1);
  }
}

TEST(Property, AmbiguityIsMonotoneInBandMembership) {
  testing::TestRng rng(303);
  for (int trial = 0; trial < 200; ++trial) {
    auto rb = testing::random_band(rng, rng.between(2, 10), rng.between(5, 50), true);
    const auto full = band_of(rb.catalog, rb.run_ids);
    auto subset = rb.run_ids;
    subset.resize(rng.between(1, subset.size()));
    EXPECT_LE(ambiguity(band_of(rb.catalog, subset), rb.catalog), ambiguity(full, rb.catalog));
  }
}

TEST(Property, RefinementPartitionsItsBand) {
  testing::TestRng rng(404);
  for (int trial = 0; trial < 100; ++trial) {
    auto rb = testing::random_band(rng, rng.between(1, 20), rng.between(20, 40));
    auto policy = BandingPolicy::rounded(1);
    const auto coarse = partition(rb.catalog, policy);
    policy.tie_break = {MetricKind::specificity, MetricKind::recall};
    const auto fine = partition(rb.catalog, policy);
    std::multiset<std::string> a;
    std::multiset<std::string> b;
    for (const auto& band : coarse.bands) a.insert(band.run_ids.begin(), band.run_ids.end());
    for (const auto& band : fine.bands) {
      b.insert(band.run_ids.begin(), band.run_ids.end());
      for (const auto& id : band.run_ids) EXPECT_TRUE(band.admits(rb.catalog.at(id).confusion()));
    }
    EXPECT_EQ(a, b);
    EXPECT_GE(fine.bands.size(), coarse.bands.size());
  }
}

}  // namespace
}  // namespace multimax
