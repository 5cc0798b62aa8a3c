#include "multimax/report.hpp"

#include <fmt/format.h>

#include "multimax/errors.hpp"

namespace multimax::report {

using nlohmann::json;

namespace {

json ratio(const ExactRatio& r) { return {{"exact", r.str()}, {"decimal", r.decimal(6)}}; }
json ratio(const SignedRatio& r) { return {{"exact", r.str()}, {"decimal", r.decimal(6)}}; }

template <typename R>
json optional_ratio(const std::optional<R>& r) {
  return r ? ratio(*r) : json();
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(fmt::format("report: missing field '{}'", key));
  }
  return j.at(key);
}

ExactRatio read_ratio(const json& j) { return ExactRatio::parse(field(j, "exact").get<std::string>()); }
SignedRatio read_signed(const json& j) {
  return SignedRatio::parse(field(j, "exact").get<std::string>());
}

std::optional<ExactRatio> read_optional_ratio(const json& j) {
  if (j.is_null()) return std::nullopt;
  return read_ratio(j);
}

std::optional<std::string> read_optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

json confusion_json(const ConfusionMatrix& cm) {
  return {{"tp", cm.tp}, {"fn", cm.fn_}, {"fp", cm.fp}, {"tn", cm.tn}};
}

ConfusionMatrix read_confusion(const json& j) {
  return {field(j, "tp").get<std::uint64_t>(), field(j, "fn").get<std::uint64_t>(),
          field(j, "fp").get<std::uint64_t>(), field(j, "tn").get<std::uint64_t>()};
}

json ensemble_json(const EnsembleRecord& e) {
  json deltas = json::array();
  for (const auto& d : e.deltas) {
    deltas.push_back({{"run_id", d.run_id},
                      {"accuracy", ratio(d.accuracy)},
                      {"recall", optional_ratio(d.recall)},
                      {"specificity", optional_ratio(d.specificity)}});
  }
  return {{"set", e.set_name},
          {"confusion", confusion_json(e.confusion)},
          {"accuracy", ratio(e.accuracy)},
          {"recall", optional_ratio(e.recall)},
          {"specificity", optional_ratio(e.specificity)},
          {"deltas", std::move(deltas)}};
}

EnsembleRecord read_ensemble(const json& j) {
  EnsembleRecord e;
  e.set_name = field(j, "set").get<std::string>();
  e.confusion = read_confusion(field(j, "confusion"));
  e.accuracy = read_ratio(field(j, "accuracy"));
  e.recall = read_optional_ratio(field(j, "recall"));
  e.specificity = read_optional_ratio(field(j, "specificity"));
  for (const auto& d : field(j, "deltas")) {
    MetricDeltas md;
    md.run_id = field(d, "run_id").get<std::string>();
    md.accuracy = read_signed(field(d, "accuracy"));
    if (!field(d, "recall").is_null()) md.recall = read_signed(d.at("recall"));
    if (!field(d, "specificity").is_null()) md.specificity = read_signed(d.at("specificity"));
    e.deltas.push_back(std::move(md));
  }
  return e;
}

json band_json(const BandRecord& b) {
  json votes = json::array();
  for (const auto& v : b.disputable) {
    votes.push_back({{"instance_id", v.instance_id},
                     {"favourable", v.favourable},
                     {"unfavourable", v.unfavourable}});
  }
  json groups = json::object();
  for (const auto& [g, r] : b.group_ambiguity) groups[g] = ratio(r);
  const auto& d = b.discrepancy;
  return {{"label", b.label},
          {"epsilon_display", b.epsilon_display},
          {"epsilon", ratio(b.epsilon)},
          {"run_ids", b.run_ids},
          {"unique_vector_counts", b.unique_vector_counts},
          {"ambiguity", ratio(b.ambiguity)},
          {"discrepancy",
           {{"seed", d.seed},
            {"sampled_runs", d.sampled_runs},
            {"pairs", d.pairs},
            {"min", optional_ratio(d.min)},
            {"max", optional_ratio(d.max)},
            {"mean", optional_ratio(d.mean)},
            {"single_run", d.single_run},
            {"all_identical", d.all_identical}}},
          {"disputable", std::move(votes)},
          {"individually_fair_runs", b.individually_fair_runs},
          {"fair_ensemble",
           {{"validation", ensemble_json(b.fair_validation)},
            {"fairness", b.fair_fairness ? ensemble_json(*b.fair_fairness) : json()}}},
          {"group_ambiguity", std::move(groups)}};
}

BandRecord read_band(const json& j) {
  BandRecord b;
  b.label = field(j, "label").get<std::string>();
  b.epsilon_display = field(j, "epsilon_display").get<std::string>();
  b.epsilon = read_ratio(field(j, "epsilon"));
  b.run_ids = field(j, "run_ids").get<std::vector<std::string>>();
  b.unique_vector_counts = field(j, "unique_vector_counts").get<std::vector<std::size_t>>();
  b.ambiguity = read_ratio(field(j, "ambiguity"));
  const auto& d = field(j, "discrepancy");
  b.discrepancy.seed = field(d, "seed").get<std::uint64_t>();
  b.discrepancy.sampled_runs = field(d, "sampled_runs").get<std::size_t>();
  b.discrepancy.pairs = field(d, "pairs").get<std::size_t>();
  b.discrepancy.min = read_optional_ratio(field(d, "min"));
  b.discrepancy.max = read_optional_ratio(field(d, "max"));
  b.discrepancy.mean = read_optional_ratio(field(d, "mean"));
  b.discrepancy.single_run = field(d, "single_run").get<bool>();
  b.discrepancy.all_identical = field(d, "all_identical").get<bool>();
  for (const auto& v : field(j, "disputable")) {
    b.disputable.push_back({field(v, "instance_id").get<std::string>(),
                            field(v, "favourable").get<std::size_t>(),
                            field(v, "unfavourable").get<std::size_t>()});
  }
  b.individually_fair_runs = field(j, "individually_fair_runs").get<std::vector<std::string>>();
  const auto& fe = field(j, "fair_ensemble");
  b.fair_validation = read_ensemble(field(fe, "validation"));
  if (!field(fe, "fairness").is_null()) b.fair_fairness = read_ensemble(fe.at("fairness"));
  for (const auto& [g, r] : field(j, "group_ambiguity").items()) b.group_ambiguity[g] = read_ratio(r);
  return b;
}

json manifest_json(const ManifestEcho& m) {
  auto opt = [](const std::optional<std::string>& s) { return s ? json(*s) : json(); };
  return {{"fold", m.fold_id},
          {"labels", m.labels},
          {"predictions", m.predictions},
          {"fairness_predictions", opt(m.fairness_predictions)},
          {"fairness_labels", opt(m.fairness_labels)},
          {"group_map", opt(m.group_map)},
          {"favourable_label", m.favourable_label},
          {"unfavourable_label", m.unfavourable_label},
          {"band", m.band},
          {"tie_break", m.tie_break},
          {"discrepancy_cap", m.discrepancy_cap},
          {"seed", m.seed},
          {"seed_from_environment", m.seed_from_environment},
          {"top_n", m.top_n},
          {"max_instances", m.max_instances},
          {"profile_variant", m.profile_variant},
          {"provenance", m.provenance}};
}

ManifestEcho read_manifest(const json& j) {
  ManifestEcho m;
  m.fold_id = field(j, "fold").get<std::string>();
  m.labels = field(j, "labels").get<std::string>();
  m.predictions = field(j, "predictions").get<std::string>();
  m.fairness_predictions = read_optional_string(j, "fairness_predictions");
  m.fairness_labels = read_optional_string(j, "fairness_labels");
  m.group_map = read_optional_string(j, "group_map");
  m.favourable_label = field(j, "favourable_label").get<std::string>();
  m.unfavourable_label = field(j, "unfavourable_label").get<std::string>();
  m.band = field(j, "band").get<std::string>();
  m.tie_break = field(j, "tie_break").get<std::vector<std::string>>();
  m.discrepancy_cap = field(j, "discrepancy_cap").get<std::size_t>();
  m.seed = field(j, "seed").get<std::uint64_t>();
  m.seed_from_environment = field(j, "seed_from_environment").get<bool>();
  m.top_n = field(j, "top_n").get<std::size_t>();
  m.max_instances = field(j, "max_instances").get<std::size_t>();
  m.profile_variant = field(j, "profile_variant").get<std::string>();
  m.provenance = field(j, "provenance").get<std::map<std::string, std::string>>();
  return m;
}

}  // namespace

json to_json(const AuditReport& r) {
  json bands = json::array();
  for (const auto& b : r.bands) bands.push_back(band_json(b));
  json policies = json::array();
  for (const auto& p : r.policy_comparison) {
    policies.push_back({{"policy", p.policy},
                        {"bands", p.bands},
                        {"overlapping", p.overlapping},
                        {"top_band", p.top_band},
                        {"top_band_ambiguity", ratio(p.top_band_ambiguity)}});
  }
  return {{"format_version", r.format_version},
          {"manifest", manifest_json(r.manifest)},
          {"run_count", r.run_count},
          {"validation_size", r.validation_size},
          {"fairness_size", r.fairness_size},
          {"baseline_accuracy", ratio(r.baseline_accuracy)},
          {"overlapping_bands", r.overlapping_bands},
          {"bands", std::move(bands)},
          {"policy_comparison", std::move(policies)}};
}

AuditReport from_json(const json& doc) {
  try {
    AuditReport r;
    r.format_version = field(doc, "format_version").get<int>();
    if (r.format_version != kFormatVersion) {
      throw ValidationError(fmt::format("report: unsupported format_version {}", r.format_version));
    }
    r.manifest = read_manifest(field(doc, "manifest"));
    r.run_count = field(doc, "run_count").get<std::size_t>();
    r.validation_size = field(doc, "validation_size").get<std::size_t>();
    r.fairness_size = field(doc, "fairness_size").get<std::size_t>();
    r.baseline_accuracy = read_ratio(field(doc, "baseline_accuracy"));
    r.overlapping_bands = field(doc, "overlapping_bands").get<bool>();
    for (const auto& b : field(doc, "bands")) r.bands.push_back(read_band(b));
    for (const auto& p : field(doc, "policy_comparison")) {
      r.policy_comparison.push_back({field(p, "policy").get<std::string>(),
                                     field(p, "bands").get<std::size_t>(),
                                     field(p, "overlapping").get<bool>(),
                                     field(p, "top_band").get<std::string>(),
                                     read_ratio(field(p, "top_band_ambiguity"))});
    }
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("report: {}", e.what()));
  }
}

std::string emit(const AuditReport& report) { return to_json(report).dump(2) + "\n"; }

AuditReport parse(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(fmt::format("report: {}", e.what()));
  }
  return from_json(doc);
}

}  // namespace multimax::report
