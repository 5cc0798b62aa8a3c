#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "multimax/banding.hpp"
#include "multimax/prediction.hpp"
#include "multimax/ratio.hpp"

namespace multimax {

struct VoteCount {
  std::size_t favourable = 0;
  std::size_t unfavourable = 0;
  friend bool operator==(const VoteCount&, const VoteCount&) = default;
};

/// Fairness-set instances on which at least two band members disagree.
struct DisputableSet {
  std::string band_label;
  IndexRef fairness_index;
  /// In fairness-index order.
  std::vector<std::string> instance_ids;
  /// Aligned with instance_ids.
  std::vector<VoteCount> votes;

  [[nodiscard]] std::size_t size() const noexcept { return instance_ids.size(); }
  [[nodiscard]] bool empty() const noexcept { return instance_ids.empty(); }
};

/// The fairness index shared by every band member. Throws ValidationError
/// when a member has no fairness predictions or members disagree on the
/// index.
IndexRef band_fairness_index(const PerformanceBand& band, const RunCatalog& catalog);

DisputableSet disputable_instances(const PerformanceBand& band, const RunCatalog& catalog);

struct UnfairnessWitness {
  std::string other_run;
  std::string instance_id;
  friend bool operator==(const UnfairnessWitness&, const UnfairnessWitness&) = default;
};

/// `witness` is empty iff the run is individually fair within its band.
struct FairnessVerdict {
  std::optional<UnfairnessWitness> witness;
  [[nodiscard]] bool fair() const noexcept { return !witness.has_value(); }
};

/// Throws ValidationError when the run is not a band member.
FairnessVerdict is_individually_fair(std::string_view run_id, const PerformanceBand& band,
                                     const RunCatalog& catalog);

/// |disputable instances| / |fairness index|.
ExactRatio ambiguity(const PerformanceBand& band, const RunCatalog& catalog);

struct DiscrepancyOptions {
  std::size_t cap = 500;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Pairwise disagreement over (a sample of) band members.
struct DiscrepancyStats {
  std::string band_label;
  /// Retained runs, sorted ascending by id.
  std::vector<std::string> sampled_run_ids;
  std::size_t sampled_runs = 0;
  std::uint64_t seed = 0;
  std::size_t fairness_size = 0;
  /// One per unordered pair (i < j over sampled_run_ids, row-major).
  std::vector<ExactRatio> pair_fractions;
  /// Single-member band: no pairs exist.
  bool single_run = false;
  /// Every pair agrees everywhere (flat violin).
  bool all_identical = false;

  [[nodiscard]] std::optional<ExactRatio> min() const;
  [[nodiscard]] std::optional<ExactRatio> max() const;
  /// Exact mean over pairs: sum of disagreements / (pairs * fairness size).
  [[nodiscard]] std::optional<ExactRatio> mean() const;
};

/// Bands larger than `cap` are subsampled without replacement by a
/// deterministic function of (seed, members sorted by id). Throws
/// ValidationError when cap < 2 and the band has at least two runs.
DiscrepancyStats discrepancy(const PerformanceBand& band, const RunCatalog& catalog,
                             const DiscrepancyOptions& options = {});

struct MetricDeltas {
  std::string run_id;
  SignedRatio accuracy;
  std::optional<SignedRatio> recall;
  std::optional<SignedRatio> specificity;
  friend bool operator==(const MetricDeltas&, const MetricDeltas&) = default;
};

/// f* scored on one labelled instance set.
struct EnsembleEvaluation {
  std::string set_name;
  ConfusionMatrix confusion;
  ExactRatio accuracy;
  std::optional<ExactRatio> recall;
  std::optional<ExactRatio> specificity;
  /// f* minus member, sorted by run id.
  std::vector<MetricDeltas> deltas;
};

struct FairEnsembleReport {
  std::string band_label;
  PredictionVector validation_preds;
  EnsembleEvaluation validation;
  /// Present when every member carries fairness predictions.
  std::optional<PredictionVector> fairness_preds;
  /// Present when fairness labels were supplied as well.
  std::optional<EnsembleEvaluation> fairness;
};

/// Favourable-wins aggregation: 1 wherever any vector predicts 1.
/// Throws ValidationError on an empty input or misaligned vectors.
PredictionVector fair_predictions(std::span<const PredictionVector* const> members);

/// Builds f* for the band, evaluates it on the validation set (and on the
/// fairness set when `fairness_labels` is given), and checks that no member
/// has higher recall or lower specificity than f*. A violation throws
/// ComputationError: it can only mean a bug.
FairEnsembleReport fair_ensemble(const PerformanceBand& band, const RunCatalog& catalog,
                                 const LabelVector* fairness_labels = nullptr);

/// Ratio of disputable instances to group size, per group. Throws
/// ValidationError when an instance has no group.
std::map<std::string, ExactRatio> ambiguity_by_group(
    const PerformanceBand& band, const RunCatalog& catalog,
    const std::map<std::string, std::string, std::less<>>& grouping);

/// Runs sharing one fairness-set prediction vector.
struct VectorGroup {
  std::vector<BinaryClass> predictions;
  /// Sorted ascending.
  std::vector<std::string> run_ids;
  [[nodiscard]] std::size_t count() const noexcept { return run_ids.size(); }
};

/// Distinct fairness prediction vectors of a band, most frequent first
/// (ties broken by smallest run id).
std::vector<VectorGroup> unique_prediction_vectors(const PerformanceBand& band,
                                                   const RunCatalog& catalog);

}  // namespace multimax
