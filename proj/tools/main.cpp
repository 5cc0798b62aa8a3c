#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "multimax/audit.hpp"
#include "multimax/errors.hpp"
#include "multimax/ingest.hpp"
#include "multimax/profiles.hpp"
#include "multimax/scenarios.hpp"
#include "multimax/zoo.hpp"

namespace fs = std::filesystem;
using namespace multimax;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitComputation = 3;

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text)) throw Error(fmt::format("cannot write '{}'", path.string()));
}

ingest::Manifest manifest_with_band(const std::string& path, const std::string& band) {
  auto m = ingest::load_manifest(path);
  if (!band.empty()) {
    auto tie_break = m.banding.tie_break;
    m.banding = BandingPolicy::parse(band);
    m.banding.tie_break = std::move(tie_break);
    m.banding.validate();
  }
  return m;
}

const PerformanceBand& find_band(const Banding& banding, const std::string& key) {
  for (const auto& b : banding.bands) {
    if (b.label == key || b.epsilon_display == key) return b;
  }
  std::string known;
  for (const auto& b : banding.bands) known += fmt::format("\n  {}", b.label);
  throw ValidationError(fmt::format("no band '{}'; bands are:{}", key, known));
}

nlohmann::json ratio_json(const ExactRatio& r) { return {{"exact", r.str()}, {"decimal", r.decimal(6)}}; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Performance-band multiplicity and fairness audits"};
  app.require_subcommand(1);

  // audit
  auto* audit_cmd = app.add_subcommand("audit", "Run a full audit and write report plus figures");
  std::string manifest_path;
  std::string out_path;
  std::string band_override;
  unsigned threads = 1;
  audit_cmd->add_option("--manifest", manifest_path, "Audit manifest")->required()->check(CLI::ExistingFile);
  audit_cmd->add_option("--out", out_path, "Output directory")->required();
  audit_cmd->add_option("--band", band_override, "Override the manifest banding policy");
  audit_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));

  // profile
  auto* profile_cmd = app.add_subcommand("profile", "Render one figure as SVG");
  std::string kind;
  std::string sidecar_path;
  std::string variant;
  profile_cmd->add_option("--manifest", manifest_path, "Audit manifest")->required()->check(CLI::ExistingFile);
  profile_cmd->add_option("--kind", kind, "Figure kind")
      ->required()
      ->check(CLI::IsMember({"stability", "fairness", "panel", "utility"}));
  profile_cmd->add_option("--out", out_path, "SVG output path")->required();
  profile_cmd->add_option("--sidecar", sidecar_path, "Optional JSON side-car path");
  profile_cmd->add_option("--variant", variant, "Fairness profile variant")
      ->check(CLI::IsMember({"summary", "faithful"}));
  profile_cmd->add_option("--band", band_override, "Override the manifest banding policy");
  profile_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));

  // fair-model
  auto* fair_cmd = app.add_subcommand("fair-model", "Build the favourable-wins ensemble of one band");
  std::string band_key;
  fair_cmd->add_option("--manifest", manifest_path, "Audit manifest")->required()->check(CLI::ExistingFile);
  fair_cmd->add_option("--band", band_key, "Band label or displayed epsilon")->required();
  fair_cmd->add_option("--policy", band_override, "Override the manifest banding policy");
  fair_cmd->add_option("--out", out_path, "Write ensemble predictions as CSV");

  // zoo
  auto* zoo_cmd = app.add_subcommand("zoo", "Generate a synthetic run collection");
  std::string family_text;
  std::uint64_t seed = 0;
  std::string layout = "two-errors";
  std::size_t n_per_class = 50;
  std::size_t fairness_per_class = 50;
  std::size_t angles = 0;
  std::size_t offsets = 0;
  std::size_t samples = 0;
  std::size_t dedup_res = 128;
  bool keep_duplicates = false;
  std::size_t region_res = 0;
  std::string zoo_band = "round:2";
  zoo_cmd->add_option("--family", family_text, "linear | poly:<d> | knn:<k> | tree:<d>")->required();
  zoo_cmd->add_option("--seed", seed, "Seed for data and family");
  zoo_cmd->add_option("--layout", layout, "Data layout")
      ->check(CLI::IsMember({"separable", "one-error", "two-errors", "blobs"}));
  zoo_cmd->add_option("--n-per-class", n_per_class, "Validation points per class");
  zoo_cmd->add_option("--fairness-per-class", fairness_per_class,
                      "Fairness points per class (0: reuse validation)");
  zoo_cmd->add_option("--angles", angles, "Linear family: angle grid size");
  zoo_cmd->add_option("--offsets", offsets, "Linear family: offset grid size");
  zoo_cmd->add_option("--samples", samples, "Polynomial/tree family: candidate count");
  zoo_cmd->add_option("--dedup-resolution", dedup_res, "Grid used to drop identical decision functions");
  zoo_cmd->add_flag("--keep-duplicates", keep_duplicates, "Keep runs with identical decision functions");
  zoo_cmd->add_option("--region-resolution", region_res, "Write the top band's disputable region (0: skip)");
  zoo_cmd->add_option("--band", zoo_band, "Banding policy written to the manifest");
  zoo_cmd->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  zoo_cmd->add_option("--out", out_path, "Output directory")->required();

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "Compare band counts across banding policies");
  std::vector<std::string> policies;
  compare_cmd->add_option("--manifest", manifest_path, "Audit manifest")->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("--band", policies, "Banding policy (repeatable)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*audit_cmd) {
      const auto manifest = manifest_with_band(manifest_path, band_override);
      const auto result = audit(manifest, threads);
      write_outputs(result, out_path);
      std::cout << fmt::format("{} runs, {} bands; report written to {}\n",
                               result.report.run_count, result.report.bands.size(),
                               (fs::path(out_path) / "report.json").string());
    } else if (*profile_cmd) {
      auto manifest = manifest_with_band(manifest_path, band_override);
      if (variant == "faithful") manifest.profile_variant = profiles::FairnessVariant::faithful;
      if (variant == "summary") manifest.profile_variant = profiles::FairnessVariant::summary;
      const auto result = audit(manifest, threads);
      for (const auto& f : result.figures) {
        if (f.name != kind) continue;
        write_text(out_path, f.figure.svg);
        if (!sidecar_path.empty()) write_text(sidecar_path, f.figure.sidecar.dump(2) + "\n");
      }
    } else if (*fair_cmd) {
      const auto manifest = manifest_with_band(manifest_path, band_override);
      const auto input = ingest::load_input(manifest);
      const auto banding = partition(input.catalog, manifest.banding);
      const auto& band = find_band(banding, band_key);
      const auto fe = fair_ensemble(band, input.catalog,
                                    input.fairness_labels ? &*input.fairness_labels : nullptr);
      nlohmann::json out{{"band", band.label},
                         {"members", band.run_ids},
                         {"validation_accuracy", ratio_json(fe.validation.accuracy)},
                         {"confusion",
                          {{"tp", fe.validation.confusion.tp},
                           {"fn", fe.validation.confusion.fn_},
                           {"fp", fe.validation.confusion.fp},
                           {"tn", fe.validation.confusion.tn}}}};
      nlohmann::json deltas = nlohmann::json::array();
      for (const auto& d : fe.validation.deltas) {
        deltas.push_back({{"run_id", d.run_id}, {"accuracy", d.accuracy.str()}});
      }
      out["accuracy_deltas"] = std::move(deltas);
      std::cout << out.dump(2) << "\n";
      if (!out_path.empty()) {
        const auto& preds = fe.fairness_preds ? *fe.fairness_preds : fe.validation_preds;
        std::string csv = "instance_id,prediction\n";
        for (std::size_t i = 0; i < preds.size(); ++i) {
          csv += fmt::format("{},{}\n", preds.index().id(i),
                             preds[i] == kFavourable ? input.coding.favourable : input.coding.unfavourable);
        }
        write_text(out_path, csv);
      }
    } else if (*zoo_cmd) {
      auto family = zoo::FamilySpec::parse(family_text);
      family.seed = seed;
      if (angles) family.angles = angles;
      if (offsets) family.offsets = offsets;
      if (samples) family.samples = samples;
      family.validate();
      const auto policy = BandingPolicy::parse(zoo_band);
      policy.validate();
      const auto spec = layout == "blobs" ? zoo::ClusterSpec{} : zoo::scenarios::layout(layout);
      const auto train = zoo::generate_dataset(spec, n_per_class, seed, "train", "t");
      const auto validation = zoo::generate_dataset(spec, n_per_class, seed + 1, "validation", "v");
      std::optional<zoo::Dataset2D> fairness;
      if (fairness_per_class > 0) {
        fairness = zoo::generate_dataset(spec, fairness_per_class, seed + 2, "fairness", "f");
      }
      auto runs = zoo::enumerate_family(family, train, validation,
                                        fairness ? &*fairness : nullptr, threads);
      if (!keep_duplicates) runs = zoo::deduplicate_on_grid(std::move(runs), spec.box, dedup_res);
      const auto catalog = zoo::make_catalog(runs, validation);

      const fs::path dir(out_path);
      fs::create_directories(dir);
      ingest::write_labels(dir / "labels.csv", validation.labels);
      ingest::write_predictions(dir / "predictions.csv", catalog.runs(), false);
      std::string manifest = fmt::format(
          "# {} runs of family {} on layout {}, seed {}\n"
          "labels = labels.csv\npredictions = predictions.csv\n",
          catalog.size(), family.tag(), layout, seed);
      if (fairness) {
        ingest::write_predictions(dir / "fairness_predictions.csv", catalog.runs(), true);
        ingest::write_labels(dir / "fairness_labels.csv", fairness->labels);
        manifest += "fairness_predictions = fairness_predictions.csv\n"
                    "fairness_labels = fairness_labels.csv\n";
      }
      manifest += fmt::format(
          "favourable_label = 1\nunfavourable_label = 0\nband = {}\nseed = {}\n"
          "provenance.family = {}\nprovenance.layout = {}\n",
          policy.str(), seed, family.tag(), layout);
      write_text(dir / "audit.manifest", manifest);

      if (region_res > 0) {
        const auto banding = partition(catalog, policy);
        const auto region = zoo::estimate_disputable_region(banding.bands.front(), runs, spec.box,
                                                            region_res, threads);
        write_text(dir / "region.pgm", zoo::region_pgm(region));
        write_text(dir / "region.svg", zoo::region_svg(region));
        std::cout << fmt::format("top band {}: disputable fraction {}\n", region.band_label,
                                 region.disputable_fraction.decimal(4));
      }
      std::cout << fmt::format("{} runs written to {}\n", catalog.size(), dir.string());
    } else if (*compare_cmd) {
      const auto manifest = ingest::load_manifest(manifest_path);
      const auto input = ingest::load_input(manifest);
      std::vector<BandingPolicy> parsed;
      for (const auto& p : policies) parsed.push_back(BandingPolicy::parse(p));
      const auto rows = compare_policies(input.catalog, parsed);
      std::cout << fmt::format("{:<12} {:>8}  {:<20} {}\n", "policy", "bands", "top band",
                               "top-band ambiguity");
      for (const auto& row : rows) {
        std::cout << fmt::format("{:<12} {:>8}  {:<20} {} ({})\n", row.policy, row.bands,
                                 row.top_band, row.top_band_ambiguity.decimal(4),
                                 row.top_band_ambiguity.str());
      }
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ComputationError& e) {
    std::cerr << "computation error: " << e.what() << "\n";
    return kExitComputation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
