#include "multimax/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

#include "detail/rng.hpp"
#include "multimax/errors.hpp"
#include "svg.hpp"

namespace multimax::profiles {

using detail::SvgWriter;
using nlohmann::json;

const std::string& ProfileStyle::colour(std::size_t rank) const {
  if (band_palette.empty()) throw ValidationError("profile style has an empty palette");
  return band_palette[rank % band_palette.size()];
}

std::string ProfileStyle::dash(std::size_t rank) const {
  if (band_palette.empty() || rank < band_palette.size() || dash_patterns.empty()) return {};
  return dash_patterns[(rank / band_palette.size() - 1) % dash_patterns.size()];
}

namespace {

void require_descending(std::span<const PerformanceBand> bands) {
  for (std::size_t i = 1; i < bands.size(); ++i) {
    if (bands[i].epsilon > bands[i - 1].epsilon) {
      throw ValidationError("bands must be ordered by descending epsilon");
    }
  }
}

json ratio_json(const ExactRatio& r) { return {{"exact", r.str()}, {"decimal", r.to_double()}}; }

}  // namespace

// Stability profile.

Figure stability_profile(std::span<const PerformanceBand> bands, const RunCatalog& catalog,
                         std::size_t top_n, const ProfileStyle& style) {
  if (top_n == 0) throw ValidationError("stability profile needs top_n >= 1");
  if (bands.empty()) throw ValidationError("stability profile needs at least one band");
  require_descending(bands);
  const auto shown = bands.first(std::min(top_n, bands.size()));

  std::vector<std::vector<VectorGroup>> groups;
  std::size_t tallest = 1;
  for (const auto& band : shown) {
    if (band.run_ids.empty()) {
      throw ValidationError(fmt::format("band '{}' has zero runs", band.label));
    }
    groups.push_back(unique_prediction_vectors(band, catalog));
    tallest = std::max(tallest, groups.back().size());
  }

  constexpr double kColumn = 160.0;
  constexpr double kGap = 30.0;
  constexpr double kLeft = 20.0;
  constexpr double kTop = 40.0;
  constexpr double kBottom = 50.0;
  const double seg_h = std::clamp(
      (style.max_height - kTop - kBottom) / static_cast<double>(tallest), 2.0, 22.0);
  const double width = kLeft * 2 + static_cast<double>(shown.size()) * (kColumn + kGap) - kGap;
  const double height = kTop + seg_h * static_cast<double>(tallest) + kBottom;

  SvgWriter svg(width, height);
  svg.title("Stability profile");
  svg.text(kLeft, 22, "Stability profile: distinct fairness prediction vectors per band",
           style.font_px + 2);

  json sidecar{{"kind", "stability"}, {"bands", json::array()}};
  const double base_y = kTop + seg_h * static_cast<double>(tallest);
  for (std::size_t b = 0; b < shown.size(); ++b) {
    const auto& band = shown[b];
    const double x0 = kLeft + static_cast<double>(b) * (kColumn + kGap);
    const double centre = x0 + kColumn / 2;
    const auto total = static_cast<double>(band.size());
    json segments = json::array();
    for (std::size_t s = 0; s < groups[b].size(); ++s) {
      const auto& g = groups[b][s];
      const double w = kColumn * static_cast<double>(g.count()) / total;
      const double y = base_y - seg_h * static_cast<double>(s + 1);
      svg.rect(centre - w / 2, y, w, seg_h - 1, style.colour(b), 1.0, "#ffffff", style.dash(b));
      if (seg_h >= 9) {
        svg.text(centre, y + seg_h / 2 + 4, fmt::format("{}", g.count()),
                 std::min(style.font_px, static_cast<int>(seg_h) - 2), "middle", "#000000");
      }
      segments.push_back({{"count", g.count()}, {"first_run", g.run_ids.front()}});
    }
    svg.text(centre, base_y + 18, band.epsilon_display, style.font_px, "middle");
    svg.text(centre, base_y + 34, fmt::format("{} runs", band.size()), style.font_px, "middle");
    sidecar["bands"].push_back({{"label", band.label},
                                {"epsilon", ratio_json(band.epsilon)},
                                {"colour", style.colour(b)},
                                {"runs", band.size()},
                                {"segments", std::move(segments)}});
  }
  return {svg.finish(style.font_family), std::move(sidecar)};
}

// Fairness profile.

Figure fairness_profile(std::span<const PerformanceBand> bands, const RunCatalog& catalog,
                        const FairnessProfileOptions& options, const ProfileStyle& style) {
  if (bands.empty()) throw ValidationError("fairness profile needs at least one band");
  if (options.max_instances == 0) throw ValidationError("fairness profile needs max_instances >= 1");
  require_descending(bands);

  IndexRef index;
  struct Row {
    std::size_t band;
    const ModelRun* run;
  };
  std::vector<Row> rows;
  for (std::size_t b = 0; b < bands.size(); ++b) {
    auto band_index = band_fairness_index(bands[b], catalog);
    if (index && !index->same_as(*band_index)) {
      throw ValidationError("fairness profile bands use different fairness indices");
    }
    index = band_index;
    for (const auto& id : bands[b].run_ids) rows.push_back({b, &catalog.at(id)});
  }
  if (index->size() == 0) throw ValidationError("fairness index is empty");
  const std::size_t n = index->size();

  std::vector<std::size_t> disputable;
  std::vector<std::size_t> stable;
  for (std::size_t i = 0; i < n; ++i) {
    const BinaryClass first = rows.front().run->fairness()[i];
    bool mixed = false;
    for (const auto& row : rows) mixed |= row.run->fairness()[i] != first;
    (mixed ? disputable : stable).push_back(i);
  }

  // Column selection; each list stays in ingestion order.
  std::vector<std::size_t> chosen_disputable = disputable;
  std::vector<std::size_t> chosen_stable;
  bool sampled = false;
  if (n <= options.max_instances) {
    chosen_stable = stable;
  } else {
    if (disputable.size() > options.max_instances) {
      sampled = true;
      std::vector<std::size_t> pool = disputable;
      detail::Rng rng(options.seed);
      for (std::size_t i = 0; i < options.max_instances; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
      }
      pool.resize(options.max_instances);
      std::sort(pool.begin(), pool.end());
      chosen_disputable = std::move(pool);
    }
    const std::size_t room = options.max_instances - chosen_disputable.size();
    chosen_stable.assign(stable.begin(),
                         stable.begin() + static_cast<std::ptrdiff_t>(std::min(room, stable.size())));
  }
  std::vector<std::size_t> columns;
  if (options.variant == FairnessVariant::summary) {
    columns = chosen_disputable;
    columns.insert(columns.end(), chosen_stable.begin(), chosen_stable.end());
  } else {
    columns = chosen_disputable;
    columns.insert(columns.end(), chosen_stable.begin(), chosen_stable.end());
    std::sort(columns.begin(), columns.end());
  }

  // Cell values, rows x columns.
  std::vector<std::vector<BinaryClass>> cells(rows.size(), std::vector<BinaryClass>(columns.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) cells[r][c] = rows[r].run->fairness()[columns[c]];
  }
  if (options.variant == FairnessVariant::summary) {
    std::size_t start = 0;
    while (start < rows.size()) {
      std::size_t end = start;
      while (end < rows.size() && rows[end].band == rows[start].band) ++end;
      for (std::size_t c = 0; c < columns.size(); ++c) {
        std::size_t ones = 0;
        for (std::size_t r = start; r < end; ++r) ones += cells[r][c];
        for (std::size_t r = start; r < end; ++r) cells[r][c] = r - start < ones ? 1 : 0;
      }
      start = end;
    }
  }

  constexpr double kLeft = 110.0;
  constexpr double kTop = 46.0;
  constexpr double kBottom = 20.0;
  constexpr double kRight = 10.0;
  const double cell_w = std::clamp((style.max_width - kLeft - kRight) /
                                       static_cast<double>(std::max<std::size_t>(columns.size(), 1)),
                                   1.0, static_cast<double>(style.cell_px));
  const double cell_h = std::clamp((style.max_height - kTop - kBottom) /
                                       static_cast<double>(rows.size()),
                                   1.0, static_cast<double>(style.cell_px) * 2);
  const double width = std::max(kLeft + cell_w * static_cast<double>(columns.size()) + kRight, 420.0);
  const double height = kTop + cell_h * static_cast<double>(rows.size()) + kBottom;

  SvgWriter svg(width, height);
  const char* variant_name = options.variant == FairnessVariant::summary ? "summary" : "faithful";
  svg.title(fmt::format("Fairness profile ({})", variant_name));
  svg.text(4, 16,
           fmt::format("Fairness profile ({}): {} runs x {} instances", variant_name, rows.size(),
                       columns.size()),
           style.font_px + 1);
  std::string legend = fmt::format("{} of {} instances disputable", disputable.size(), n);
  if (sampled) {
    legend += fmt::format("; showing a seeded sample of {} (seed {})", chosen_disputable.size(),
                          options.seed);
  }
  if (options.variant == FairnessVariant::summary) {
    legend += "; columns sorted per band, favourable (dark) on top";
  }
  svg.text(4, 32, legend, style.font_px);

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto b = rows[r].band;
    const double y = kTop + cell_h * static_cast<double>(r);
    if (r == 0 || rows[r - 1].band != b) {
      svg.text(4, y + std::min(cell_h, 10.0), bands[b].epsilon_display,
               std::min(style.font_px, 10), "start", style.colour(b));
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const double opacity =
          cells[r][c] == kFavourable ? style.favourable_opacity : style.unfavourable_opacity;
      svg.rect(kLeft + cell_w * static_cast<double>(c), y, cell_w, cell_h, style.colour(b),
               opacity);
    }
  }

  json row_info = json::array();
  for (const auto& row : rows) {
    json entry{{"band", bands[row.band].label}};
    entry["run_id"] = options.variant == FairnessVariant::faithful ? json(row.run->id()) : json();
    row_info.push_back(std::move(entry));
  }
  json column_ids = json::array();
  for (auto c : columns) column_ids.push_back(index->id(c));
  json sidecar{{"kind", "fairness"},
               {"variant", variant_name},
               {"seed", options.seed},
               {"sampled", sampled},
               {"disputable_total", disputable.size()},
               {"columns", std::move(column_ids)},
               {"rows", std::move(row_info)},
               {"cells", cells}};
  return {svg.finish(style.font_family), std::move(sidecar)};
}

// Multiplicity panel.

namespace {

struct Slot {
  std::string label;
  std::string display;
  ExactRatio epsilon;
};

std::vector<Slot> collect_slots(std::span<const FoldResult> folds) {
  std::map<std::string, Slot> by_label;
  for (const auto& fold : folds) {
    for (const auto& band : fold.bands) {
      by_label.emplace(band.label, Slot{band.label, band.epsilon_display, band.epsilon});
    }
  }
  std::vector<Slot> slots;
  for (auto& [_, slot] : by_label) slots.push_back(std::move(slot));
  std::stable_sort(slots.begin(), slots.end(),
                   [](const Slot& a, const Slot& b) { return a.epsilon > b.epsilon; });
  return slots;
}

double nice_ceiling(double v) {
  if (v <= 0.0) return 0.05;
  return std::min(1.0, std::ceil(v * 20.0 - 1e-9) / 20.0);
}

}  // namespace

Figure multiplicity_panel(std::span<const FoldResult> folds, const ProfileStyle& style) {
  if (folds.empty()) throw ValidationError("multiplicity panel needs at least one fold");
  const auto slots = collect_slots(folds);
  if (slots.empty()) throw ValidationError("multiplicity panel has no bands");
  std::map<std::string, std::size_t> slot_of;
  for (std::size_t i = 0; i < slots.size(); ++i) slot_of[slots[i].label] = i;

  constexpr double kLeft = 70.0;
  constexpr double kRight = 20.0;
  constexpr double kTop = 30.0;
  constexpr double kPanel = 150.0;
  constexpr double kPanelGap = 40.0;
  constexpr double kBottom = 50.0;
  const double slot_w = std::clamp((style.max_width - kLeft - kRight) /
                                       static_cast<double>(slots.size()),
                                   8.0, 60.0);
  const double plot_w = slot_w * static_cast<double>(slots.size());
  const double width = kLeft + plot_w + kRight;
  const double height = kTop + 3 * kPanel + 2 * kPanelGap + kBottom;
  const double top[3] = {kTop, kTop + kPanel + kPanelGap, kTop + 2 * (kPanel + kPanelGap)};
  auto slot_centre = [&](std::size_t s) { return kLeft + slot_w * (static_cast<double>(s) + 0.5); };

  double amb_max = 0.0;
  double disc_max = 0.0;
  std::size_t count_max = 1;
  for (const auto& fold : folds) {
    for (const auto& band : fold.bands) {
      amb_max = std::max(amb_max, band.ambiguity.to_double());
      if (auto m = band.discrepancy.max()) disc_max = std::max(disc_max, m->to_double());
      count_max = std::max(count_max, band.run_count);
    }
  }
  const double amb_top = nice_ceiling(amb_max);
  const double disc_top = nice_ceiling(disc_max);
  const double log_top = std::max(1.0, std::ceil(std::log10(static_cast<double>(count_max)) - 1e-12));

  SvgWriter svg(width, height);
  svg.title("Ambiguity, discrepancy and run counts per band");
  const char* names[3] = {"ambiguity", "discrepancy", "runs (log10)"};
  for (int p = 0; p < 3; ++p) {
    svg.line(kLeft, top[p], kLeft, top[p] + kPanel, "#444444");
    svg.line(kLeft, top[p] + kPanel, kLeft + plot_w, top[p] + kPanel, "#444444");
    svg.text(4, top[p] - 8, names[p], style.font_px);
  }
  svg.text(kLeft - 4, top[0] + 4, fmt::format("{:.0f}%", amb_top * 100), style.font_px - 1, "end");
  svg.text(kLeft - 4, top[0] + kPanel, "0%", style.font_px - 1, "end");
  svg.text(kLeft - 4, top[1] + 4, fmt::format("{:.0f}%", disc_top * 100), style.font_px - 1, "end");
  svg.text(kLeft - 4, top[1] + kPanel, "0%", style.font_px - 1, "end");
  svg.text(kLeft - 4, top[2] + 4, fmt::format("1e{:.0f}", log_top), style.font_px - 1, "end");
  svg.text(kLeft - 4, top[2] + kPanel, "1", style.font_px - 1, "end");
  for (std::size_t s = 0; s < slots.size(); ++s) {
    svg.text(slot_centre(s), top[2] + kPanel + 16, slots[s].display, std::min(style.font_px, 9),
             "middle");
  }

  const auto nfolds = static_cast<double>(folds.size());
  json sidecar{{"kind", "multiplicity"}, {"folds", json::array()}};
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& fold = folds[f];
    const std::string& colour = style.colour(f);
    std::vector<std::pair<double, double>> trajectory;
    std::vector<const FoldBand*> ordered;
    for (const auto& band : fold.bands) ordered.push_back(&band);
    std::stable_sort(ordered.begin(), ordered.end(), [&](auto* a, auto* b) {
      return slot_of.at(a->label) < slot_of.at(b->label);
    });
    json fold_json{{"fold", fold.fold_id}, {"colour", colour}, {"bands", json::array()}};
    for (const auto* band : ordered) {
      const std::size_t s = slot_of.at(band->label);
      // Ambiguity.
      const double ax = slot_centre(s);
      const double ay = top[0] + kPanel * (1.0 - band->ambiguity.to_double() / amb_top);
      trajectory.emplace_back(ax, ay);
      svg.circle(ax, ay, 2.5, colour);

      // Discrepancy: fold f occupies a sub-slot of the band slot.
      const double sub_w = slot_w / nfolds;
      const double cx = kLeft + slot_w * static_cast<double>(s) + sub_w * (static_cast<double>(f) + 0.5);
      const double half = std::max(sub_w / 2 - 1, 1.0);
      const auto& disc = band->discrepancy;
      std::string marker;
      json bins = json::array();
      if (disc.single_run) {
        marker = "single";
        const double y = top[1] + kPanel - 6;
        const double r = std::min(half, 4.0);
        svg.line(cx - r, y - r, cx + r, y + r, colour, 1.5);
        svg.line(cx - r, y + r, cx + r, y - r, colour, 1.5);
      } else if (disc.all_identical) {
        marker = "flat";
        const double y = top[1] + kPanel;
        svg.line(cx - std::min(half, 5.0), y - 1, cx + std::min(half, 5.0), y - 1, colour, 2.0);
      } else {
        marker = "violin";
        constexpr std::size_t kBins = 20;
        std::vector<std::size_t> counts(kBins, 0);
        for (const auto& frac : disc.pair_fractions) {
          auto bin = static_cast<std::size_t>(frac.to_double() / disc_top * kBins);
          ++counts[std::min(bin, kBins - 1)];
        }
        const std::size_t peak = *std::max_element(counts.begin(), counts.end());
        const double bin_h = kPanel / kBins;
        for (std::size_t k = 0; k < kBins; ++k) {
          bins.push_back(counts[k]);
          if (counts[k] == 0) continue;
          const double w = 2 * half * static_cast<double>(counts[k]) / static_cast<double>(peak);
          svg.rect(cx - w / 2, top[1] + kPanel - bin_h * static_cast<double>(k + 1), w, bin_h,
                   colour, 0.7);
        }
      }

      // Run counts, log scale.
      const double bar_h =
          kPanel * std::log10(static_cast<double>(std::max<std::size_t>(band->run_count, 1))) / log_top;
      svg.rect(cx - half / 2, top[2] + kPanel - bar_h, std::max(half, 1.0), bar_h, colour, 0.8);

      json band_json{{"label", band->label},
                     {"ambiguity", ratio_json(band->ambiguity)},
                     {"marker", marker},
                     {"run_count", band->run_count},
                     {"pairs", disc.pair_fractions.size()}};
      if (!bins.empty()) band_json["bins"] = std::move(bins);
      fold_json["bands"].push_back(std::move(band_json));
    }
    if (trajectory.size() > 1) svg.polyline(trajectory, colour, 1.2);
    sidecar["folds"].push_back(std::move(fold_json));
  }
  return {svg.finish(style.font_family), std::move(sidecar)};
}

// Utility plot.

Figure utility_plot(std::span<const UtilityFold> folds, const ProfileStyle& style) {
  if (folds.empty()) throw ValidationError("utility plot needs at least one fold");
  double lo = 1.0;
  for (const auto& fold : folds) {
    lo = std::min(lo, fold.baseline.to_double());
    for (const auto& p : fold.points) {
      lo = std::min({lo, p.band_accuracy.to_double(), p.fair_accuracy.to_double()});
    }
  }
  lo = std::max(0.0, std::floor(lo * 20.0 - 1e-9) / 20.0);
  if (lo >= 1.0) lo = 0.95;
  constexpr double kLeft = 60.0;
  constexpr double kTop = 30.0;
  constexpr double kSize = 320.0;
  constexpr double kRight = 20.0;
  constexpr double kBottom = 50.0;
  auto px = [&](double v) { return kLeft + kSize * (v - lo) / (1.0 - lo); };
  auto py = [&](double v) { return kTop + kSize * (1.0 - (v - lo) / (1.0 - lo)); };

  SvgWriter svg(kLeft + kSize + kRight, kTop + kSize + kBottom);
  svg.title("Fair ensemble accuracy against band accuracy");
  svg.text(4, 18, "fair-ensemble accuracy vs band accuracy", style.font_px + 1);
  svg.line(kLeft, kTop, kLeft, kTop + kSize, "#444444");
  svg.line(kLeft, kTop + kSize, kLeft + kSize, kTop + kSize, "#444444");
  svg.line(px(lo), py(lo), px(1.0), py(1.0), "#999999", 1.0, "4,3");
  svg.text(kLeft - 4, kTop + 4, "1.00", style.font_px - 1, "end");
  svg.text(kLeft - 4, kTop + kSize, fmt::format("{:.2f}", lo), style.font_px - 1, "end");
  svg.text(kLeft + kSize, kTop + kSize + 16, "1.00", style.font_px - 1, "middle");
  svg.text(kLeft, kTop + kSize + 16, fmt::format("{:.2f}", lo), style.font_px - 1, "middle");
  svg.text(kLeft + kSize / 2, kTop + kSize + 36, "band accuracy", style.font_px, "middle");

  json sidecar{{"kind", "utility"}, {"folds", json::array()}};
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto& fold = folds[f];
    const auto& colour = style.colour(f);
    const double by = py(fold.baseline.to_double());
    svg.line(kLeft, by, kLeft + kSize, by, colour, 1.0, "2,2");
    json points = json::array();
    for (const auto& p : fold.points) {
      svg.circle(px(p.band_accuracy.to_double()), py(p.fair_accuracy.to_double()), 3.0, colour);
      points.push_back({{"band", p.band_label},
                        {"band_accuracy", ratio_json(p.band_accuracy)},
                        {"fair_accuracy", ratio_json(p.fair_accuracy)}});
    }
    sidecar["folds"].push_back({{"fold", fold.fold_id},
                                {"baseline", ratio_json(fold.baseline)},
                                {"points", std::move(points)}});
  }
  return {svg.finish(style.font_family), std::move(sidecar)};
}

}  // namespace multimax::profiles
