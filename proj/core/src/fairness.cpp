#include "multimax/fairness.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "detail/packed_bits.hpp"
#include "detail/parallel.hpp"
#include "detail/rng.hpp"
#include "multimax/errors.hpp"

namespace multimax {

namespace {

std::vector<const ModelRun*> members_of(const PerformanceBand& band, const RunCatalog& catalog) {
  if (band.run_ids.empty()) {
    throw ValidationError(fmt::format("band '{}' has no runs", band.label));
  }
  std::vector<const ModelRun*> out;
  out.reserve(band.run_ids.size());
  for (const auto& id : band.run_ids) out.push_back(&catalog.at(id));
  return out;
}

EnsembleEvaluation evaluate_ensemble(std::string set_name, const PredictionVector& fstar,
                                     const LabelVector& labels,
                                     const std::vector<std::pair<std::string, const PredictionVector*>>& members) {
  EnsembleEvaluation eval;
  eval.set_name = std::move(set_name);
  eval.confusion = confusion_matrix(fstar, labels);
  eval.accuracy = metric(eval.confusion, MetricKind::accuracy);
  eval.recall = try_metric(eval.confusion, MetricKind::recall);
  eval.specificity = try_metric(eval.confusion, MetricKind::specificity);
  for (const auto& [id, preds] : members) {
    const auto cm = confusion_matrix(*preds, labels);
    MetricDeltas d;
    d.run_id = id;
    d.accuracy = eval.accuracy - metric(cm, MetricKind::accuracy);
    if (auto r = try_metric(cm, MetricKind::recall); r && eval.recall) {
      d.recall = *eval.recall - *r;
      if (*d.recall < SignedRatio{}) {
        throw ComputationError(fmt::format(
            "fair ensemble recall {} is below member '{}' recall {} on '{}'",
            eval.recall->str(), id, r->str(), eval.set_name));
      }
    }
    if (auto s = try_metric(cm, MetricKind::specificity); s && eval.specificity) {
      d.specificity = *eval.specificity - *s;
      if (*d.specificity > SignedRatio{}) {
        throw ComputationError(fmt::format(
            "fair ensemble specificity {} exceeds member '{}' specificity {} on '{}'",
            eval.specificity->str(), id, s->str(), eval.set_name));
      }
    }
    eval.deltas.push_back(std::move(d));
  }
  return eval;
}

}  // namespace

IndexRef band_fairness_index(const PerformanceBand& band, const RunCatalog& catalog) {
  IndexRef index;
  for (const auto* run : members_of(band, catalog)) {
    const auto& preds = run->fairness();
    if (!index) {
      index = preds.index_ref();
    } else if (!index->same_as(preds.index())) {
      throw ValidationError(fmt::format(
          "band '{}' mixes fairness indices '{}' and '{}' (run '{}')", band.label, index->name(),
          preds.index().name(), run->id()));
    }
  }
  return index;
}

DisputableSet disputable_instances(const PerformanceBand& band, const RunCatalog& catalog) {
  auto index = band_fairness_index(band, catalog);
  const auto members = members_of(band, catalog);
  std::vector<std::size_t> ones(index->size(), 0);
  for (const auto* run : members) {
    const auto values = run->fairness().values();
    for (std::size_t i = 0; i < values.size(); ++i) ones[i] += values[i];
  }
  DisputableSet out;
  out.band_label = band.label;
  out.fairness_index = index;
  const std::size_t m = members.size();
  for (std::size_t i = 0; i < ones.size(); ++i) {
    if (ones[i] > 0 && ones[i] < m) {
      out.instance_ids.push_back(index->id(i));
      out.votes.push_back({ones[i], m - ones[i]});
    }
  }
  return out;
}

FairnessVerdict is_individually_fair(std::string_view run_id, const PerformanceBand& band,
                                     const RunCatalog& catalog) {
  if (!band.contains(run_id)) {
    throw ValidationError(fmt::format("run '{}' is not a member of band '{}'", run_id, band.label));
  }
  const auto index = band_fairness_index(band, catalog);
  const auto& mine = catalog.at(run_id).fairness();
  for (const auto& other_id : band.run_ids) {
    if (other_id == run_id) continue;
    const auto& theirs = catalog.at(other_id).fairness();
    for (std::size_t i = 0; i < mine.size(); ++i) {
      if (mine[i] != theirs[i]) return {UnfairnessWitness{other_id, index->id(i)}};
    }
  }
  return {};
}

ExactRatio ambiguity(const PerformanceBand& band, const RunCatalog& catalog) {
  const auto set = disputable_instances(band, catalog);
  return {set.size(), set.fairness_index->size()};
}

std::optional<ExactRatio> DiscrepancyStats::min() const {
  if (pair_fractions.empty()) return std::nullopt;
  return *std::min_element(pair_fractions.begin(), pair_fractions.end());
}

std::optional<ExactRatio> DiscrepancyStats::max() const {
  if (pair_fractions.empty()) return std::nullopt;
  return *std::max_element(pair_fractions.begin(), pair_fractions.end());
}

std::optional<ExactRatio> DiscrepancyStats::mean() const {
  if (pair_fractions.empty()) return std::nullopt;
  std::uint64_t total = 0;
  for (const auto& f : pair_fractions) total += f.num();
  return ExactRatio(total, pair_fractions.size() * fairness_size);
}

DiscrepancyStats discrepancy(const PerformanceBand& band, const RunCatalog& catalog,
                             const DiscrepancyOptions& options) {
  const auto index = band_fairness_index(band, catalog);
  if (band.size() >= 2 && options.cap < 2) {
    throw ValidationError(
        fmt::format("discrepancy cap {} cannot hold a pair for band '{}'", options.cap, band.label));
  }
  DiscrepancyStats out;
  out.band_label = band.label;
  out.seed = options.seed;
  out.fairness_size = index->size();

  std::vector<std::string> ids = band.run_ids;  // sorted by construction
  std::sort(ids.begin(), ids.end());
  if (ids.size() > options.cap) {
    detail::Rng rng(options.seed);
    for (std::size_t i = 0; i < options.cap; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(ids.size() - i));
      std::swap(ids[i], ids[j]);
    }
    ids.resize(options.cap);
    std::sort(ids.begin(), ids.end());
  }
  out.sampled_run_ids = ids;
  out.sampled_runs = ids.size();
  out.single_run = ids.size() == 1;

  std::vector<detail::PackedBits> packed;
  packed.reserve(ids.size());
  for (const auto& id : ids) packed.emplace_back(catalog.at(id).fairness().values());

  const std::size_t m = ids.size();
  std::vector<std::size_t> row_offset(m, 0);
  for (std::size_t i = 1; i < m; ++i) row_offset[i] = row_offset[i - 1] + (m - i);
  std::vector<std::size_t> disagreements(m * (m - 1) / 2, 0);
  detail::parallel_for(m, options.threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      disagreements[row_offset[i] + (j - i - 1)] = packed[i].hamming(packed[j]);
    }
  });
  out.pair_fractions.reserve(disagreements.size());
  for (auto d : disagreements) out.pair_fractions.emplace_back(d, out.fairness_size);
  out.all_identical = !out.single_run &&
                      std::all_of(disagreements.begin(), disagreements.end(),
                                  [](auto d) { return d == 0; });
  return out;
}

PredictionVector fair_predictions(std::span<const PredictionVector* const> members) {
  if (members.empty()) throw ValidationError("fair ensemble needs at least one member");
  const auto& first = *members.front();
  std::vector<BinaryClass> out(first.size(), kUnfavourable);
  for (const auto* preds : members) {
    if (!preds->index().same_as(first.index())) {
      throw ValidationError(fmt::format("fair ensemble members use indices '{}' and '{}'",
                                        first.index().name(), preds->index().name()));
    }
    const auto values = preds->values();
    for (std::size_t i = 0; i < values.size(); ++i) out[i] |= values[i];
  }
  return {first.index_ref(), std::move(out)};
}

FairEnsembleReport fair_ensemble(const PerformanceBand& band, const RunCatalog& catalog,
                                 const LabelVector* fairness_labels) {
  const auto members = members_of(band, catalog);

  std::vector<const PredictionVector*> validation;
  std::vector<std::pair<std::string, const PredictionVector*>> named_validation;
  bool all_fair = true;
  for (const auto* run : members) {
    validation.push_back(&run->validation());
    named_validation.emplace_back(run->id(), &run->validation());
    all_fair &= run->has_fairness();
  }
  auto fstar = fair_predictions(validation);
  auto eval = evaluate_ensemble("validation", fstar, catalog.labels(), named_validation);
  FairEnsembleReport report{band.label, std::move(fstar), std::move(eval), std::nullopt,
                            std::nullopt};

  if (all_fair) {
    band_fairness_index(band, catalog);
    std::vector<const PredictionVector*> fairness;
    std::vector<std::pair<std::string, const PredictionVector*>> named_fairness;
    for (const auto* run : members) {
      fairness.push_back(&run->fairness());
      named_fairness.emplace_back(run->id(), &run->fairness());
    }
    report.fairness_preds = fair_predictions(fairness);
    if (fairness_labels != nullptr) {
      report.fairness =
          evaluate_ensemble("fairness", *report.fairness_preds, *fairness_labels, named_fairness);
    }
  } else if (fairness_labels != nullptr) {
    throw ValidationError(fmt::format(
        "fairness labels supplied but band '{}' has members without fairness predictions",
        band.label));
  }
  return report;
}

std::map<std::string, ExactRatio> ambiguity_by_group(
    const PerformanceBand& band, const RunCatalog& catalog,
    const std::map<std::string, std::string, std::less<>>& grouping) {
  const auto set = disputable_instances(band, catalog);
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> counts;  // disputed, size
  for (const auto& id : set.fairness_index->ids()) {
    auto it = grouping.find(id);
    if (it == grouping.end()) {
      throw ValidationError(fmt::format("instance '{}' has no group label", id));
    }
    ++counts[it->second].second;
  }
  for (const auto& id : set.instance_ids) ++counts[grouping.find(id)->second].first;
  std::map<std::string, ExactRatio> out;
  for (const auto& [group, c] : counts) out.emplace(group, ExactRatio(c.first, c.second));
  return out;
}

std::vector<VectorGroup> unique_prediction_vectors(const PerformanceBand& band,
                                                   const RunCatalog& catalog) {
  band_fairness_index(band, catalog);
  std::map<std::vector<BinaryClass>, std::vector<std::string>> groups;
  for (const auto& id : band.run_ids) {
    const auto values = catalog.at(id).fairness().values();
    groups[{values.begin(), values.end()}].push_back(id);
  }
  std::vector<VectorGroup> out;
  out.reserve(groups.size());
  for (auto& [preds, ids] : groups) {
    std::sort(ids.begin(), ids.end());
    out.push_back({preds, std::move(ids)});
  }
  std::sort(out.begin(), out.end(), [](const VectorGroup& a, const VectorGroup& b) {
    if (a.count() != b.count()) return a.count() > b.count();
    return a.run_ids.front() < b.run_ids.front();
  });
  return out;
}

}  // namespace multimax
