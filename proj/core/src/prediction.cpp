#include "multimax/prediction.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "multimax/errors.hpp"

namespace multimax {

InstanceIndex::InstanceIndex(std::string name, std::vector<std::string> ids)
    : name_(std::move(name)), ids_(std::move(ids)) {
  if (ids_.empty()) throw ValidationError(fmt::format("instance index '{}' is empty", name_));
  positions_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!positions_.emplace(ids_[i], i).second) {
      throw ValidationError(
          fmt::format("instance index '{}' repeats instance id '{}'", name_, ids_[i]));
    }
  }
}

std::optional<std::size_t> InstanceIndex::position(std::string_view id) const {
  if (auto it = positions_.find(std::string(id)); it != positions_.end()) return it->second;
  return std::nullopt;
}

bool InstanceIndex::same_as(const InstanceIndex& other) const noexcept {
  return this == &other || ids_ == other.ids_;
}

IndexRef make_index(std::string name, std::vector<std::string> ids) {
  return std::make_shared<const InstanceIndex>(std::move(name), std::move(ids));
}

namespace detail {

AlignedClasses::AlignedClasses(IndexRef index, std::vector<BinaryClass> values)
    : index_(std::move(index)), values_(std::move(values)) {
  if (!index_) throw ValidationError("binary vector constructed without an instance index");
  if (values_.size() != index_->size()) {
    throw ValidationError(fmt::format("vector of length {} does not match index '{}' of size {}",
                                      values_.size(), index_->name(), index_->size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] > 1) {
      throw ValidationError(fmt::format("class {} for instance '{}' is not binary",
                                        int{values_[i]}, index_->id(i)));
    }
  }
}

std::size_t AlignedClasses::count_favourable() const noexcept {
  return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), kFavourable));
}

}  // namespace detail

std::string_view to_string(MetricKind kind) noexcept {
  switch (kind) {
    case MetricKind::accuracy: return "accuracy";
    case MetricKind::recall: return "recall";
    case MetricKind::specificity: return "specificity";
    case MetricKind::precision: return "precision";
  }
  return "unknown";
}

MetricKind parse_metric_kind(std::string_view text) {
  for (auto kind : {MetricKind::accuracy, MetricKind::recall, MetricKind::specificity,
                    MetricKind::precision}) {
    if (text == to_string(kind)) return kind;
  }
  throw ValidationError(fmt::format(
      "unknown metric '{}' (expected accuracy, recall, specificity or precision)", text));
}

ConfusionMatrix confusion_matrix(const PredictionVector& preds, const LabelVector& labels) {
  if (!preds.index().same_as(labels.index())) {
    throw ValidationError(fmt::format("predictions aligned to index '{}' but labels to index '{}'",
                                      preds.index().name(), labels.index().name()));
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool predicted = preds[i] == kFavourable;
    const bool actual = labels[i] == kFavourable;
    if (actual) {
      predicted ? ++cm.tp : ++cm.fn_;
    } else {
      predicted ? ++cm.fp : ++cm.tn;
    }
  }
  return cm;
}

std::optional<ExactRatio> try_metric(const ConfusionMatrix& cm, MetricKind kind) noexcept {
  std::uint64_t num = 0;
  std::uint64_t den = 0;
  switch (kind) {
    case MetricKind::accuracy: num = cm.tp + cm.tn; den = cm.total(); break;
    case MetricKind::recall: num = cm.tp; den = cm.tp + cm.fn_; break;
    case MetricKind::specificity: num = cm.tn; den = cm.tn + cm.fp; break;
    case MetricKind::precision: num = cm.tp; den = cm.tp + cm.fp; break;
  }
  if (den == 0) return std::nullopt;
  return ExactRatio(num, den);
}

ExactRatio metric(const ConfusionMatrix& cm, MetricKind kind) {
  if (auto value = try_metric(cm, kind)) return *value;
  throw ComputationError(fmt::format("{} is undefined for confusion matrix tp={} fn={} fp={} tn={}",
                                     to_string(kind), cm.tp, cm.fn_, cm.fp, cm.tn));
}

ModelRun::ModelRun(std::string id, std::string family, PredictionVector validation,
                   std::optional<PredictionVector> fairness, ConfusionMatrix cm,
                   ExactRatio utility, std::optional<double> complexity)
    : id_(std::move(id)),
      family_(std::move(family)),
      validation_(std::move(validation)),
      fairness_(std::move(fairness)),
      confusion_(cm),
      utility_(utility),
      complexity_(complexity) {}

ModelRun ModelRun::evaluate(std::string run_id, std::string family_tag, PredictionVector validation,
                            std::optional<PredictionVector> fairness, const LabelVector& labels,
                            std::optional<double> complexity) {
  if (run_id.empty()) throw ValidationError("run id must not be empty");
  if (complexity && *complexity < 0) {
    throw ValidationError(fmt::format("run '{}' has negative complexity", run_id));
  }
  const auto cm = confusion_matrix(validation, labels);
  const auto utility = metric(cm, MetricKind::accuracy);
  return {std::move(run_id), std::move(family_tag), std::move(validation), std::move(fairness),
          cm, utility, complexity};
}

const PredictionVector& ModelRun::fairness() const {
  if (!fairness_) {
    throw ValidationError(fmt::format("run '{}' carries no fairness-set predictions", id_));
  }
  return *fairness_;
}

RunCatalog::RunCatalog(LabelVector labels, std::vector<ModelRun> runs)
    : labels_(std::move(labels)), runs_(std::move(runs)) {
  if (runs_.empty()) throw ValidationError("run collection is empty");
  for (std::size_t i = 0; i < runs_.size(); ++i) {
    const auto& run = runs_[i];
    if (!run.validation().index().same_as(labels_.index())) {
      throw ValidationError(fmt::format(
          "run '{}' was evaluated on index '{}' but the collection uses index '{}'", run.id(),
          run.validation().index().name(), labels_.index().name()));
    }
    if (confusion_matrix(run.validation(), labels_) != run.confusion()) {
      throw ValidationError(
          fmt::format("run '{}' was scored against different validation labels", run.id()));
    }
    if (!by_id_.emplace(run.id(), i).second) {
      throw ValidationError(fmt::format("duplicate run id '{}'", run.id()));
    }
  }
}

bool RunCatalog::contains(std::string_view run_id) const { return by_id_.contains(run_id); }

const ModelRun& RunCatalog::at(std::string_view run_id) const {
  if (auto it = by_id_.find(run_id); it != by_id_.end()) return runs_[it->second];
  throw ValidationError(fmt::format("unknown run id '{}'", run_id));
}

}  // namespace multimax
