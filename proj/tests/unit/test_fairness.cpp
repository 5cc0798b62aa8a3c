#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "multimax/banding.hpp"
#include "multimax/errors.hpp"
#include "multimax/fairness.hpp"
#include "support/builders.hpp"

namespace multimax {
namespace {

using testing::build_catalog;
using testing::RunSpec;

PerformanceBand band_of(const RunCatalog& catalog, std::vector<std::string> ids,
                        std::string label = "band") {
  PerformanceBand b;
  b.label = std::move(label);
  std::sort(ids.begin(), ids.end());
  b.run_ids = std::move(ids);
  b.epsilon = catalog.at(b.run_ids.front()).utility();
  b.epsilon_display = b.epsilon.decimal(4);
  return b;
}

PerformanceBand whole(const RunCatalog& catalog) {
  std::vector<std::string> ids;
  for (const auto& r : catalog.runs()) ids.push_back(r.id());
  return band_of(catalog, ids);
}

class SmallBand : public ::testing::Test {
 protected:
  // Validation labels 1,1,0,0; fairness set of 5 unlabelled instances.
  RunCatalog catalog = build_catalog(
      {1, 1, 0, 0},
      {{"a", {1, 1, 0, 0}, std::vector<BinaryClass>{1, 0, 0, 1, 0}},
       {"b", {1, 1, 0, 0}, std::vector<BinaryClass>{1, 0, 1, 1, 0}},
       {"c", {1, 1, 0, 0}, std::vector<BinaryClass>{1, 1, 1, 1, 0}}},
      5);
};

TEST_F(SmallBand, DisputableInstancesCarryVotes) {
  const auto set = disputable_instances(whole(catalog), catalog);
  EXPECT_EQ(set.instance_ids, (std::vector<std::string>{"f0001", "f0002"}));
  EXPECT_EQ(set.votes[0], (VoteCount{1, 2}));
  EXPECT_EQ(set.votes[1], (VoteCount{2, 1}));
  EXPECT_EQ(ambiguity(whole(catalog), catalog), ExactRatio(2, 5));
}

TEST_F(SmallBand, VerdictGivesWitness) {
  const auto v = is_individually_fair("a", whole(catalog), catalog);
  ASSERT_FALSE(v.fair());
  EXPECT_EQ(v.witness->other_run, "b");
  EXPECT_EQ(v.witness->instance_id, "f0002");
  EXPECT_TRUE(is_individually_fair("a", band_of(catalog, {"a"}), catalog).fair());
  EXPECT_THROW(is_individually_fair("zz", whole(catalog), catalog), ValidationError);
}

TEST_F(SmallBand, FairEnsembleIsPerInstanceOr) {
  const auto report = fair_ensemble(whole(catalog), catalog);
  ASSERT_TRUE(report.fairness_preds.has_value());
  const auto values = report.fairness_preds->values();
  EXPECT_EQ(std::vector<BinaryClass>(values.begin(), values.end()),
            (std::vector<BinaryClass>{1, 1, 1, 1, 0}));
  EXPECT_EQ(report.validation.accuracy, ExactRatio(4, 4));
  EXPECT_FALSE(report.fairness.has_value());
}

TEST_F(SmallBand, FairEnsembleScoredOnFairnessLabels) {
  LabelVector flabels(catalog.at("a").fairness().index_ref(), {1, 0, 0, 1, 1});
  const auto report = fair_ensemble(whole(catalog), catalog, &flabels);
  ASSERT_TRUE(report.fairness.has_value());
  // f* = 1,1,1,1,0 against 1,0,0,1,1.
  EXPECT_EQ(report.fairness->confusion, (ConfusionMatrix{2, 1, 2, 0}));
  ASSERT_EQ(report.fairness->deltas.size(), 3u);
  EXPECT_EQ(report.fairness->deltas[0].run_id, "a");
  EXPECT_EQ(report.fairness->deltas[0].accuracy, SignedRatio(-2, 5));
}

TEST_F(SmallBand, GroupAmbiguity) {
  std::map<std::string, std::string, std::less<>> groups{
      {"f0000", "g1"}, {"f0001", "g1"}, {"f0002", "g2"}, {"f0003", "g2"}, {"f0004", "g2"}};
  const auto by_group = ambiguity_by_group(whole(catalog), catalog, groups);
  EXPECT_EQ(by_group.at("g1"), ExactRatio(1, 2));
  EXPECT_EQ(by_group.at("g2"), ExactRatio(1, 3));
  groups.erase("f0004");
  EXPECT_THROW(ambiguity_by_group(whole(catalog), catalog, groups), ValidationError);
}

TEST_F(SmallBand, UniqueVectorsOrderedByCount) {
  auto c2 = build_catalog({1, 0}, {{"p", {1, 0}, std::nullopt},
                                   {"q", {0, 0}, std::nullopt},
                                   {"r", {0, 0}, std::nullopt}});
  const auto groups = unique_prediction_vectors(whole(c2), c2);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0].run_ids, (std::vector<std::string>{"q", "r"}));
  EXPECT_EQ(groups[1].run_ids, (std::vector<std::string>{"p"}));
}

TEST(Fairness, BandWithoutFairnessPredictionsIsRejected) {
  auto idx = make_index("v", {"a", "b"});
  LabelVector labels(idx, {1, 0});
  auto run = ModelRun::evaluate("r", "t", PredictionVector(idx, {1, 0}), std::nullopt, labels);
  RunCatalog catalog(labels, {run});
  PerformanceBand band;
  band.label = "x";
  band.run_ids = {"r"};
  EXPECT_THROW(disputable_instances(band, catalog), ValidationError);
  EXPECT_NO_THROW(fair_ensemble(band, catalog));
  PerformanceBand empty;
  EXPECT_THROW(ambiguity(empty, catalog), ValidationError);
}

TEST(Discrepancy, MatchesBruteForcePairEnumeration) {
  testing::TestRng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    auto rb = testing::random_band(rng, rng.between(1, 15), rng.between(1, 130), trial % 2 == 0);
    const auto band = band_of(rb.catalog, rb.run_ids);
    const auto stats = discrepancy(band, rb.catalog);
    std::vector<ExactRatio> expected;
    for (std::size_t i = 0; i < band.run_ids.size(); ++i) {
      for (std::size_t j = i + 1; j < band.run_ids.size(); ++j) {
        const auto a = rb.catalog.at(band.run_ids[i]).fairness().values();
        const auto b = rb.catalog.at(band.run_ids[j]).fairness().values();
        std::uint64_t d = 0;
        for (std::size_t k = 0; k < a.size(); ++k) d += a[k] != b[k];
        expected.emplace_back(d, a.size());
      }
    }
    ASSERT_EQ(stats.pair_fractions.size(), expected.size());
    for (std::size_t p = 0; p < expected.size(); ++p) {
      EXPECT_EQ(stats.pair_fractions[p].str(), expected[p].str());
    }
    EXPECT_EQ(stats.single_run, band.size() == 1);
  }
}

TEST(Discrepancy, SamplingIsSeededAndThreadIndependent) {
  testing::TestRng rng(9);
  auto rb = testing::random_band(rng, 40, 64);
  const auto band = band_of(rb.catalog, rb.run_ids);
  const auto a = discrepancy(band, rb.catalog, {10, 42, 1});
  const auto b = discrepancy(band, rb.catalog, {10, 42, 4});
  const auto c = discrepancy(band, rb.catalog, {10, 43, 1});
  EXPECT_EQ(a.sampled_runs, 10u);
  EXPECT_EQ(a.pair_fractions.size(), 45u);
  EXPECT_EQ(a.sampled_run_ids, b.sampled_run_ids);
  EXPECT_EQ(a.pair_fractions, b.pair_fractions);
  EXPECT_NE(a.sampled_run_ids, c.sampled_run_ids);
  EXPECT_TRUE(std::is_sorted(a.sampled_run_ids.begin(), a.sampled_run_ids.end()));
  EXPECT_THROW(discrepancy(band, rb.catalog, {1, 0, 1}), ValidationError);
}

TEST(Discrepancy, IdenticalMembersGiveFlatStats) {
  auto catalog = build_catalog({1, 0}, {{"a", {1, 0}, std::nullopt}, {"b", {1, 0}, std::nullopt}});
  const auto stats = discrepancy(whole(catalog), catalog);
  EXPECT_TRUE(stats.all_identical);
  EXPECT_EQ(stats.max(), ExactRatio(0, 2));
  EXPECT_EQ(stats.mean(), ExactRatio(0, 2));
}

TEST(FairPredictions, RejectsEmptyOrMisaligned) {
  EXPECT_THROW(fair_predictions({}), ValidationError);
  PredictionVector a(make_index("v", {"x", "y"}), {1, 0});
  PredictionVector b(make_index("v", {"y", "x"}), {1, 0});
  const PredictionVector* both[] = {&a, &b};
  EXPECT_THROW(fair_predictions(both), ValidationError);
}

}  // namespace
}  // namespace multimax
