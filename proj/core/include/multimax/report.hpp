#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "multimax/fairness.hpp"
#include "multimax/prediction.hpp"
#include "multimax/ratio.hpp"

namespace multimax::report {

inline constexpr int kFormatVersion = 1;

struct VoteRecord {
  std::string instance_id;
  std::size_t favourable = 0;
  std::size_t unfavourable = 0;
  friend bool operator==(const VoteRecord&, const VoteRecord&) = default;
};

struct DiscrepancyRecord {
  std::uint64_t seed = 0;
  std::size_t sampled_runs = 0;
  std::size_t pairs = 0;
  std::optional<ExactRatio> min;
  std::optional<ExactRatio> max;
  std::optional<ExactRatio> mean;
  bool single_run = false;
  bool all_identical = false;
  friend bool operator==(const DiscrepancyRecord&, const DiscrepancyRecord&) = default;
};

struct EnsembleRecord {
  std::string set_name;
  ConfusionMatrix confusion;
  ExactRatio accuracy;
  std::optional<ExactRatio> recall;
  std::optional<ExactRatio> specificity;
  std::vector<MetricDeltas> deltas;
  friend bool operator==(const EnsembleRecord&, const EnsembleRecord&) = default;
};

struct BandRecord {
  std::string label;
  std::string epsilon_display;
  ExactRatio epsilon;
  std::vector<std::string> run_ids;
  /// Run count of each distinct fairness prediction vector, largest first.
  std::vector<std::size_t> unique_vector_counts;
  ExactRatio ambiguity;
  DiscrepancyRecord discrepancy;
  std::vector<VoteRecord> disputable;
  std::vector<std::string> individually_fair_runs;
  EnsembleRecord fair_validation;
  std::optional<EnsembleRecord> fair_fairness;
  std::map<std::string, ExactRatio> group_ambiguity;
  friend bool operator==(const BandRecord&, const BandRecord&) = default;
};

struct PolicyRow {
  std::string policy;
  std::size_t bands = 0;
  bool overlapping = false;
  std::string top_band;
  ExactRatio top_band_ambiguity;
  friend bool operator==(const PolicyRow&, const PolicyRow&) = default;
};

struct ManifestEcho {
  std::string fold_id;
  std::string labels;
  std::string predictions;
  std::optional<std::string> fairness_predictions;
  std::optional<std::string> fairness_labels;
  std::optional<std::string> group_map;
  std::string favourable_label;
  std::string unfavourable_label;
  std::string band;
  std::vector<std::string> tie_break;
  std::size_t discrepancy_cap = 0;
  std::uint64_t seed = 0;
  bool seed_from_environment = false;
  std::size_t top_n = 0;
  std::size_t max_instances = 0;
  std::string profile_variant;
  std::map<std::string, std::string> provenance;
  friend bool operator==(const ManifestEcho&, const ManifestEcho&) = default;
};

struct AuditReport {
  int format_version = kFormatVersion;
  ManifestEcho manifest;
  std::size_t run_count = 0;
  std::size_t validation_size = 0;
  std::size_t fairness_size = 0;
  /// Accuracy of predicting the favourable class for everyone.
  ExactRatio baseline_accuracy;
  bool overlapping_bands = false;
  std::vector<BandRecord> bands;
  std::vector<PolicyRow> policy_comparison;
  friend bool operator==(const AuditReport&, const AuditReport&) = default;
};

nlohmann::json to_json(const AuditReport& report);
/// Throws ValidationError on a malformed document or an unknown format version.
AuditReport from_json(const nlohmann::json& doc);

/// Canonical text: two-space indentation, trailing newline.
std::string emit(const AuditReport& report);
AuditReport parse(const std::string& text);

}  // namespace multimax::report
