#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "multimax/banding.hpp"
#include "multimax/fairness.hpp"
#include "multimax/ingest.hpp"
#include "multimax/profiles.hpp"
#include "multimax/report.hpp"

namespace multimax {

struct AuditSettings {
  BandingPolicy banding;
  std::size_t discrepancy_cap = 500;
  std::uint64_t seed = 0;
  std::size_t top_n = 10;
  std::size_t max_instances = 250;
  profiles::FairnessVariant profile_variant = profiles::FairnessVariant::summary;
  unsigned threads = 1;

  static AuditSettings from(const ingest::Manifest& manifest, unsigned threads = 1);
};

struct NamedFigure {
  std::string name;
  profiles::Figure figure;
};

struct AuditResult {
  report::AuditReport report;
  /// stability, fairness, panel, utility.
  std::vector<NamedFigure> figures;
};

/// Band i's discrepancy sample is seeded with a value derived from
/// (settings.seed, i), so each band samples independently.
std::uint64_t band_seed(std::uint64_t seed, std::size_t band_rank) noexcept;

/// Full per-band analysis of one band.
report::BandRecord analyse_band(const PerformanceBand& band, const RunCatalog& catalog,
                                const DiscrepancyOptions& discrepancy,
                                const LabelVector* fairness_labels = nullptr,
                                const ingest::GroupMap* groups = nullptr);

/// Band counts and top-band ambiguity per policy, strict policies first.
/// Throws ValidationError for fewer than two policies.
std::vector<report::PolicyRow> compare_policies(const RunCatalog& catalog,
                                                std::span<const BandingPolicy> policies);

/// The manifest echo is left empty; audit(AuditInput) fills it.
AuditResult run_audit(const RunCatalog& catalog, const AuditSettings& settings,
                      const LabelVector* fairness_labels = nullptr,
                      const ingest::GroupMap* groups = nullptr);

AuditResult audit(const ingest::AuditInput& input, unsigned threads = 1);
AuditResult audit(const ingest::Manifest& manifest, unsigned threads = 1);

/// Writes report.json plus <figure>.svg and <figure>.json side-cars.
void write_outputs(const AuditResult& result, const std::filesystem::path& out_dir);

}  // namespace multimax
