#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "multimax/ratio.hpp"

namespace multimax {

/// A crisp binary class; 1 is the favourable outcome.
using BinaryClass = std::uint8_t;

inline constexpr BinaryClass kFavourable = 1;
inline constexpr BinaryClass kUnfavourable = 0;

/// Ordered, unique instance identifiers shared by every vector aligned to it.
class InstanceIndex {
 public:
  /// Throws ValidationError on an empty list or duplicate ids.
  InstanceIndex(std::string name, std::vector<std::string> ids);

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
  [[nodiscard]] const std::vector<std::string>& ids() const noexcept { return ids_; }
  [[nodiscard]] const std::string& id(std::size_t pos) const { return ids_.at(pos); }
  [[nodiscard]] std::optional<std::size_t> position(std::string_view id) const;

  /// Same identity, or the same ids in the same order.
  [[nodiscard]] bool same_as(const InstanceIndex& other) const noexcept;

 private:
  std::string name_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> positions_;
};

using IndexRef = std::shared_ptr<const InstanceIndex>;

IndexRef make_index(std::string name, std::vector<std::string> ids);

namespace detail {

/// Binary classes aligned to an InstanceIndex.
class AlignedClasses {
 public:
  AlignedClasses(IndexRef index, std::vector<BinaryClass> values);

  [[nodiscard]] const InstanceIndex& index() const noexcept { return *index_; }
  [[nodiscard]] const IndexRef& index_ref() const noexcept { return index_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] BinaryClass operator[](std::size_t pos) const noexcept { return values_[pos]; }
  [[nodiscard]] std::span<const BinaryClass> values() const noexcept { return values_; }
  [[nodiscard]] std::size_t count_favourable() const noexcept;

  friend bool operator==(const AlignedClasses& a, const AlignedClasses& b) noexcept {
    return a.index_->same_as(*b.index_) && a.values_ == b.values_;
  }

 private:
  IndexRef index_;
  std::vector<BinaryClass> values_;
};

}  // namespace detail

class LabelVector : public detail::AlignedClasses {
 public:
  using AlignedClasses::AlignedClasses;
};

class PredictionVector : public detail::AlignedClasses {
 public:
  using AlignedClasses::AlignedClasses;
};

/// Favourable class is the positive class.
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fn_ = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;

  [[nodiscard]] std::uint64_t total() const noexcept { return tp + fn_ + fp + tn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

enum class MetricKind { accuracy, recall, specificity, precision };

std::string_view to_string(MetricKind kind) noexcept;
MetricKind parse_metric_kind(std::string_view text);

/// Throws ValidationError when the two vectors are aligned to different indices.
ConfusionMatrix confusion_matrix(const PredictionVector& preds, const LabelVector& labels);

/// Throws ComputationError when the metric's denominator is zero.
ExactRatio metric(const ConfusionMatrix& cm, MetricKind kind);

/// Same as metric() but returns nullopt instead of throwing.
std::optional<ExactRatio> try_metric(const ConfusionMatrix& cm, MetricKind kind) noexcept;

/// One classifier execution. Utility is always recomputed from the
/// validation predictions; it is never taken from outside.
class ModelRun {
 public:
  static ModelRun evaluate(std::string run_id, std::string family_tag, PredictionVector validation,
                           std::optional<PredictionVector> fairness, const LabelVector& labels,
                           std::optional<double> complexity = std::nullopt);

  [[nodiscard]] const std::string& id() const noexcept { return id_; }
  [[nodiscard]] const std::string& family() const noexcept { return family_; }
  [[nodiscard]] const PredictionVector& validation() const noexcept { return validation_; }
  [[nodiscard]] bool has_fairness() const noexcept { return fairness_.has_value(); }
  /// Throws ValidationError when the run carries no fairness predictions.
  [[nodiscard]] const PredictionVector& fairness() const;
  [[nodiscard]] const ConfusionMatrix& confusion() const noexcept { return confusion_; }
  [[nodiscard]] const ExactRatio& utility() const noexcept { return utility_; }
  [[nodiscard]] std::optional<double> complexity() const noexcept { return complexity_; }

 private:
  ModelRun(std::string id, std::string family, PredictionVector validation,
           std::optional<PredictionVector> fairness, ConfusionMatrix cm, ExactRatio utility,
           std::optional<double> complexity);

  std::string id_;
  std::string family_;
  PredictionVector validation_;
  std::optional<PredictionVector> fairness_;
  ConfusionMatrix confusion_;
  ExactRatio utility_;
  std::optional<double> complexity_;
};

/// The run collection under audit: validation labels plus runs keyed by id.
class RunCatalog {
 public:
  /// Throws ValidationError on an empty run set, duplicate ids, or runs
  /// evaluated on a different validation index than `labels`.
  RunCatalog(LabelVector labels, std::vector<ModelRun> runs);

  [[nodiscard]] const LabelVector& labels() const noexcept { return labels_; }
  [[nodiscard]] std::span<const ModelRun> runs() const noexcept { return runs_; }
  [[nodiscard]] std::size_t size() const noexcept { return runs_.size(); }
  [[nodiscard]] bool contains(std::string_view run_id) const;
  /// Throws ValidationError for an unknown id.
  [[nodiscard]] const ModelRun& at(std::string_view run_id) const;

 private:
  LabelVector labels_;
  std::vector<ModelRun> runs_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

}  // namespace multimax
