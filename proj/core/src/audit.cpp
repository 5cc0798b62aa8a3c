#include "multimax/audit.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "detail/parallel.hpp"
#include "detail/rng.hpp"
#include "multimax/errors.hpp"

namespace multimax {

namespace fs = std::filesystem;

AuditSettings AuditSettings::from(const ingest::Manifest& m, unsigned threads) {
  AuditSettings s;
  s.banding = m.banding;
  s.discrepancy_cap = m.discrepancy_cap;
  s.seed = m.seed;
  s.top_n = m.top_n;
  s.max_instances = m.max_instances;
  s.profile_variant = m.profile_variant;
  s.threads = threads;
  return s;
}

std::uint64_t band_seed(std::uint64_t seed, std::size_t band_rank) noexcept {
  return detail::mix_seed(seed, band_rank);
}

namespace {

report::EnsembleRecord ensemble_record(const EnsembleEvaluation& e) {
  return {e.set_name, e.confusion, e.accuracy, e.recall, e.specificity, e.deltas};
}

report::ManifestEcho echo(const ingest::Manifest& m, const ingest::ClassCoding& coding) {
  const fs::path base = m.source.has_parent_path() ? m.source.parent_path() : fs::path(".");
  auto rel = [&](const fs::path& p) {
    auto r = p.lexically_relative(base);
    return (r.empty() ? p : r).generic_string();
  };
  auto opt = [&](const std::optional<fs::path>& p) {
    return p ? std::optional<std::string>(rel(*p)) : std::nullopt;
  };
  report::ManifestEcho e;
  e.fold_id = m.fold_id;
  e.labels = rel(m.labels);
  e.predictions = rel(m.predictions);
  e.fairness_predictions = opt(m.fairness_predictions);
  e.fairness_labels = opt(m.fairness_labels);
  e.group_map = opt(m.group_map);
  e.favourable_label = coding.favourable;
  e.unfavourable_label = coding.unfavourable;
  e.band = m.banding.str();
  for (auto k : m.banding.tie_break) e.tie_break.emplace_back(to_string(k));
  e.discrepancy_cap = m.discrepancy_cap;
  e.seed = m.seed;
  e.seed_from_environment = m.seed_from_environment;
  e.top_n = m.top_n;
  e.max_instances = m.max_instances;
  e.profile_variant =
      m.profile_variant == profiles::FairnessVariant::summary ? "summary" : "faithful";
  e.provenance = m.provenance;
  return e;
}

}  // namespace

report::BandRecord analyse_band(const PerformanceBand& band, const RunCatalog& catalog,
                                const DiscrepancyOptions& discrepancy_options,
                                const LabelVector* fairness_labels,
                                const ingest::GroupMap* groups) {
  report::BandRecord rec;
  rec.label = band.label;
  rec.epsilon_display = band.epsilon_display;
  rec.epsilon = band.epsilon;
  rec.run_ids = band.run_ids;

  const auto vectors = unique_prediction_vectors(band, catalog);
  for (const auto& g : vectors) rec.unique_vector_counts.push_back(g.count());
  // A member is individually fair only when nobody in the band disagrees with it.
  if (vectors.size() == 1) rec.individually_fair_runs = band.run_ids;

  const auto set = disputable_instances(band, catalog);
  rec.ambiguity = ExactRatio(set.size(), set.fairness_index->size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    rec.disputable.push_back(
        {set.instance_ids[i], set.votes[i].favourable, set.votes[i].unfavourable});
  }

  const auto stats = discrepancy(band, catalog, discrepancy_options);
  rec.discrepancy.seed = stats.seed;
  rec.discrepancy.sampled_runs = stats.sampled_runs;
  rec.discrepancy.pairs = stats.pair_fractions.size();
  rec.discrepancy.min = stats.min();
  rec.discrepancy.max = stats.max();
  rec.discrepancy.mean = stats.mean();
  rec.discrepancy.single_run = stats.single_run;
  rec.discrepancy.all_identical = stats.all_identical;

  const auto fe = fair_ensemble(band, catalog, fairness_labels);
  rec.fair_validation = ensemble_record(fe.validation);
  if (fe.fairness) rec.fair_fairness = ensemble_record(*fe.fairness);

  if (groups != nullptr) rec.group_ambiguity = ambiguity_by_group(band, catalog, *groups);
  return rec;
}

std::vector<report::PolicyRow> compare_policies(const RunCatalog& catalog,
                                                std::span<const BandingPolicy> policies) {
  if (policies.size() < 2) throw ValidationError("compare needs at least two policies");
  std::vector<BandingPolicy> ordered(policies.begin(), policies.end());
  std::stable_partition(ordered.begin(), ordered.end(),
                        [](const BandingPolicy& p) { return p.mode == BandingMode::strict; });
  std::vector<report::PolicyRow> rows;
  for (const auto& policy : ordered) {
    const auto banding = partition(catalog, policy);
    report::PolicyRow row;
    row.policy = policy.str();
    row.bands = banding.bands.size();
    row.overlapping = banding.overlapping;
    row.top_band = banding.bands.front().label;
    row.top_band_ambiguity = ambiguity(banding.bands.front(), catalog);
    rows.push_back(std::move(row));
  }
  return rows;
}

AuditResult run_audit(const RunCatalog& catalog, const AuditSettings& settings,
                      const LabelVector* fairness_labels, const ingest::GroupMap* groups) {
  const auto banding = partition(catalog, settings.banding);
  const auto& bands = banding.bands;

  AuditResult result;
  auto& rep = result.report;
  rep.run_count = catalog.size();
  rep.validation_size = catalog.labels().size();
  rep.fairness_size = catalog.runs().front().fairness().size();
  rep.baseline_accuracy = ExactRatio(catalog.labels().count_favourable(), catalog.labels().size());
  rep.overlapping_bands = banding.overlapping;

  rep.bands.resize(bands.size());
  std::vector<DiscrepancyStats> stats(bands.size());
  detail::parallel_for(bands.size(), settings.threads, [&](std::size_t i) {
    DiscrepancyOptions opts{settings.discrepancy_cap, band_seed(settings.seed, i), 1};
    rep.bands[i] = analyse_band(bands[i], catalog, opts, fairness_labels, groups);
    stats[i] = discrepancy(bands[i], catalog, opts);
  });

  std::vector<BandingPolicy> policies{BandingPolicy::strict(), BandingPolicy::rounded(3),
                                      BandingPolicy::rounded(2)};
  const bool listed = std::any_of(policies.begin(), policies.end(), [&](const BandingPolicy& p) {
    return p.str() == settings.banding.str();
  });
  if (!listed) {
    BandingPolicy plain = settings.banding;
    plain.tie_break.clear();
    policies.push_back(plain);
  }
  rep.policy_comparison = compare_policies(catalog, policies);

  // Figures.
  const profiles::ProfileStyle style;
  result.figures.push_back(
      {"stability", profiles::stability_profile(bands, catalog, settings.top_n, style)});
  profiles::FairnessProfileOptions fopts{settings.profile_variant, settings.max_instances,
                                         settings.seed};
  result.figures.push_back({"fairness", profiles::fairness_profile(bands, catalog, fopts, style)});

  profiles::FoldResult fold{"fold", {}};
  profiles::UtilityFold ufold{"fold", {}, rep.baseline_accuracy};
  for (std::size_t i = 0; i < bands.size(); ++i) {
    fold.bands.push_back({bands[i].label, bands[i].epsilon_display, bands[i].epsilon,
                          rep.bands[i].ambiguity, stats[i], bands[i].size()});
    ufold.points.push_back(
        {bands[i].label, bands[i].epsilon, rep.bands[i].fair_validation.accuracy});
  }
  result.figures.push_back({"panel", profiles::multiplicity_panel(std::span(&fold, 1), style)});
  result.figures.push_back({"utility", profiles::utility_plot(std::span(&ufold, 1), style)});
  return result;
}

AuditResult audit(const ingest::AuditInput& input, unsigned threads) {
  const auto settings = AuditSettings::from(input.manifest, threads);
  auto result = run_audit(input.catalog, settings,
                          input.fairness_labels ? &*input.fairness_labels : nullptr,
                          input.groups ? &*input.groups : nullptr);
  result.report.manifest = echo(input.manifest, input.coding);
  return result;
}

AuditResult audit(const ingest::Manifest& manifest, unsigned threads) {
  return audit(ingest::load_input(manifest), threads);
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw Error(fmt::format("write failed for '{}'", path.string()));
}

}  // namespace

void write_outputs(const AuditResult& result, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(fmt::format("cannot create '{}': {}", out_dir.string(), ec.message()));
  write_file(out_dir / "report.json", report::emit(result.report));
  for (const auto& f : result.figures) {
    write_file(out_dir / (f.name + ".svg"), f.figure.svg);
    write_file(out_dir / (f.name + ".json"), f.figure.sidecar.dump(2) + "\n");
  }
}

}  // namespace multimax
