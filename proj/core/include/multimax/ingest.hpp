#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "multimax/banding.hpp"
#include "multimax/prediction.hpp"
#include "multimax/profiles.hpp"

namespace multimax::ingest {

/// Maps raw label strings onto binary classes.
struct ClassCoding {
  std::string favourable = "1";
  std::string unfavourable = "0";

  /// Throws ValidationError naming `where` for any other value.
  [[nodiscard]] BinaryClass encode(const std::string& raw, const std::string& where) const;
};

struct LoadedLabels {
  LabelVector labels;
  ClassCoding coding;
};

/// Labels CSV with header `instance_id,label`; the index follows file order.
/// The file may hold at most two distinct values and must contain the
/// favourable one. Without `unfavourable` the other value is taken from the
/// file (or "0"/"1" as the complement of "1"/"0").
LoadedLabels load_labels(const std::filesystem::path& path, const std::string& favourable,
                         const std::optional<std::string>& unfavourable = std::nullopt,
                         std::string index_name = "validation");

/// Labels for a separate fairness set, aligned to `index`.
LabelVector load_labels_on(const std::filesystem::path& path, const ClassCoding& coding,
                           const IndexRef& index);

/// Long-format predictions, header `run_id,instance_id,prediction`. An
/// optional `family` column sets the family tag (default "ingested").
///
/// Validation rows must cover every labelled instance for every run. The
/// fairness file, when given, defines its own index in order of first
/// appearance and must cover the same runs. Without it the validation
/// predictions double as fairness predictions. Runs come out in order of
/// first appearance.
std::vector<ModelRun> load_predictions(
    const std::filesystem::path& path, const LabelVector& labels, const ClassCoding& coding,
    const std::optional<std::filesystem::path>& fairness_path = std::nullopt);

using GroupMap = std::map<std::string, std::string, std::less<>>;

/// CSV with header `instance_id,group`.
GroupMap load_groups(const std::filesystem::path& path);

/// One audit over one fold.
///
/// Flat `key = value` file; `#` starts a comment line. Relative paths are
/// resolved against the manifest's directory. `provenance.<name>` keys are
/// echoed verbatim into the report.
struct Manifest {
  std::filesystem::path source;
  std::string fold_id;
  std::filesystem::path labels;
  std::filesystem::path predictions;
  std::optional<std::filesystem::path> fairness_predictions;
  std::optional<std::filesystem::path> fairness_labels;
  std::optional<std::filesystem::path> group_map;
  std::string favourable_label = "1";
  std::optional<std::string> unfavourable_label;
  BandingPolicy banding;
  std::size_t discrepancy_cap = 500;
  std::uint64_t seed = 0;
  bool seed_from_environment = false;
  std::size_t top_n = 10;
  std::size_t max_instances = 250;
  profiles::FairnessVariant profile_variant = profiles::FairnessVariant::summary;
  std::map<std::string, std::string> provenance;
};

/// Throws ValidationError with `source:line` context on unknown keys,
/// malformed values, missing required keys or unreadable paths.
Manifest parse_manifest(const std::string& text, const std::filesystem::path& source);

/// Reads the file, parses it and applies MULTIMAX_SEED when set.
Manifest load_manifest(const std::filesystem::path& path);

/// Overrides `seed` from MULTIMAX_SEED if the variable is set.
void apply_environment(Manifest& manifest);

std::string render_manifest(const Manifest& manifest);

/// Everything an audit needs, loaded and validated.
struct AuditInput {
  Manifest manifest;
  ClassCoding coding;
  RunCatalog catalog;
  std::optional<LabelVector> fairness_labels;
  std::optional<GroupMap> groups;
};

AuditInput load_input(const Manifest& manifest);

/// Writers for the same formats; output reloads to identical vectors.
void write_labels(const std::filesystem::path& path, const LabelVector& labels,
                  const ClassCoding& coding = {});
/// Validation predictions, or fairness predictions when `fairness` is set.
void write_predictions(const std::filesystem::path& path, std::span<const ModelRun> runs,
                       bool fairness, const ClassCoding& coding = {});

}  // namespace multimax::ingest
