#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "multimax/banding.hpp"
#include "multimax/fairness.hpp"
#include "multimax/prediction.hpp"

namespace multimax::profiles {

/// Visual parameters shared by every figure.
///
/// Bands take colours by descending-epsilon rank; past the palette the
/// colours repeat with the next dash pattern. Favourable cells are drawn at
/// full opacity and unfavourable cells at `unfavourable_opacity` of the
/// same hue (0.25 by default, roughly a 3:1 luminance contrast for the
/// default palette on white).
struct ProfileStyle {
  std::vector<std::string> band_palette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                        "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::vector<std::string> dash_patterns{"4,2", "1,2", "6,2,1,2"};
  int cell_px = 6;
  double favourable_opacity = 1.0;
  double unfavourable_opacity = 0.25;
  int max_width = 4000;
  int max_height = 4000;
  int font_px = 11;
  std::string font_family = "DejaVu Sans, Arial, sans-serif";

  [[nodiscard]] const std::string& colour(std::size_t rank) const;
  /// Empty for ranks inside the palette.
  [[nodiscard]] std::string dash(std::size_t rank) const;
};

/// An SVG document plus a JSON side-car describing what was drawn.
struct Figure {
  std::string svg;
  nlohmann::json sidecar;
};

/// One pyramid per band (first `top_n` bands): one segment per distinct
/// fairness prediction vector, width proportional to its run count, widest
/// at the bottom. Throws ValidationError for an empty band, top_n == 0, or
/// bands not sorted by descending epsilon.
Figure stability_profile(std::span<const PerformanceBand> bands, const RunCatalog& catalog,
                         std::size_t top_n, const ProfileStyle& style = {});

enum class FairnessVariant { faithful, summary };

struct FairnessProfileOptions {
  FairnessVariant variant = FairnessVariant::summary;
  std::size_t max_instances = 250;
  std::uint64_t seed = 0;
};

/// Run-by-instance prediction grid grouped by band. The summary variant
/// sorts each column within each band segment, favourable shade on top.
/// When the fairness set is wider than `max_instances`, disputable columns
/// are kept first (a seeded sample if there are too many) and stable
/// columns fill the remaining slots.
Figure fairness_profile(std::span<const PerformanceBand> bands, const RunCatalog& catalog,
                        const FairnessProfileOptions& options = {},
                        const ProfileStyle& style = {});

struct FoldBand {
  std::string label;
  std::string epsilon_display;
  ExactRatio epsilon;
  ExactRatio ambiguity;
  DiscrepancyStats discrepancy;
  std::size_t run_count = 0;
};

struct FoldResult {
  std::string fold_id;
  std::vector<FoldBand> bands;
};

/// Ambiguity trajectories (top), discrepancy violins drawn as mirrored
/// histograms (middle; x for single-run bands, a flat dash for bands with
/// no disagreement) and log-scale run counts (bottom).
Figure multiplicity_panel(std::span<const FoldResult> folds, const ProfileStyle& style = {});

struct UtilityPoint {
  std::string band_label;
  ExactRatio band_accuracy;
  ExactRatio fair_accuracy;
};

struct UtilityFold {
  std::string fold_id;
  std::vector<UtilityPoint> points;
  /// Accuracy of always predicting the favourable class.
  ExactRatio baseline;
};

/// Fair-ensemble accuracy against band accuracy with the identity diagonal
/// and one always-favourable baseline per fold.
Figure utility_plot(std::span<const UtilityFold> folds, const ProfileStyle& style = {});

}  // namespace multimax::profiles
