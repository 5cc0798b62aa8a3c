#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <regex>

#include "multimax/banding.hpp"
#include "multimax/errors.hpp"
#include "multimax/profiles.hpp"
#include "support/builders.hpp"

namespace multimax::profiles {
namespace {

using testing::build_catalog;
using testing::RunSpec;

double attr(const std::string& element, const std::string& name) {
  const std::regex re(" " + name + "=\"(-?[0-9.]+)\"");
  std::smatch m;
  if (!std::regex_search(element, m, re)) return 0.0;
  return std::stod(m[1]);
}

// Every drawable element lies inside the declared viewBox.
void expect_inside_viewbox(const std::string& svg) {
  std::smatch m;
  ASSERT_TRUE(std::regex_search(svg, m, std::regex(R"re(viewBox="0 0 ([0-9.]+) ([0-9.]+)")re")));
  const double w = std::stod(m[1]);
  const double h = std::stod(m[2]);
  const double eps = 1e-6;
  const std::regex element_re(R"(<(rect|line|circle|text|polyline)[^>]*>)");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), element_re); it != std::sregex_iterator(); ++it) {
    const std::string el = (*it)[0];
    const std::string tag = (*it)[1];
    std::vector<std::pair<double, double>> pts;
    if (tag == "rect") {
      const double x = attr(el, "x"), y = attr(el, "y");
      pts = {{x, y}, {x + attr(el, "width"), y + attr(el, "height")}};
    } else if (tag == "line") {
      pts = {{attr(el, "x1"), attr(el, "y1")}, {attr(el, "x2"), attr(el, "y2")}};
    } else if (tag == "circle") {
      const double r = attr(el, "r");
      pts = {{attr(el, "cx") - r, attr(el, "cy") - r}, {attr(el, "cx") + r, attr(el, "cy") + r}};
    } else if (tag == "text") {
      pts = {{attr(el, "x"), attr(el, "y")}};
    } else {
      std::smatch pm;
      std::regex_search(el, pm, std::regex(R"re(points="([^"]*)")re"));
      const std::string s = pm[1];
      const std::regex pair_re(R"((-?[0-9.]+),(-?[0-9.]+))");
      for (auto p = std::sregex_iterator(s.begin(), s.end(), pair_re); p != std::sregex_iterator(); ++p) {
        pts.emplace_back(std::stod((*p)[1]), std::stod((*p)[2]));
      }
    }
    for (auto [x, y] : pts) {
      EXPECT_GE(x, -eps) << el;
      EXPECT_LE(x, w + eps) << el;
      EXPECT_GE(y, -eps) << el;
      EXPECT_LE(y, h + eps) << el;
    }
  }
}

RunCatalog two_band_catalog() {
  // Validation: 4 instances all favourable; fairness: 6 instances.
  std::vector<RunSpec> specs{
      {"a1", {1, 1, 1, 1}, std::vector<BinaryClass>{1, 0, 1, 0, 1, 1}},
      {"a2", {1, 1, 1, 1}, std::vector<BinaryClass>{1, 1, 1, 0, 1, 1}},
      {"a3", {1, 1, 1, 1}, std::vector<BinaryClass>{1, 1, 1, 0, 1, 1}},
      {"b1", {1, 1, 1, 0}, std::vector<BinaryClass>{0, 0, 1, 0, 1, 0}},
      {"c1", {1, 1, 0, 0}, std::vector<BinaryClass>{0, 0, 0, 0, 0, 0}},
      {"c2", {1, 0, 1, 0}, std::vector<BinaryClass>{0, 0, 0, 0, 0, 1}},
  };
  return build_catalog({1, 1, 1, 1}, specs, 6);
}

TEST(StabilityProfile, SegmentsMatchUniqueVectors) {
  const auto catalog = two_band_catalog();
  const auto bands = partition(catalog, BandingPolicy::strict()).bands;
  const auto fig = stability_profile(bands, catalog, 10);
  const auto& sc = fig.sidecar["bands"];
  ASSERT_EQ(sc.size(), 3u);
  EXPECT_EQ(sc[0]["segments"].size(), 2u);
  EXPECT_EQ(sc[0]["segments"][0]["count"], 2);
  EXPECT_EQ(sc[0]["segments"][1]["count"], 1);
  EXPECT_EQ(sc[1]["segments"].size(), 1u);
  EXPECT_EQ(sc[1]["segments"][0]["count"], 1);
  expect_inside_viewbox(fig.svg);
  EXPECT_EQ(fig.svg, stability_profile(bands, catalog, 10).svg);
  EXPECT_EQ(stability_profile(bands, catalog, 1).sidecar["bands"].size(), 1u);
}

TEST(StabilityProfile, RejectsBadInput) {
  const auto catalog = two_band_catalog();
  auto bands = partition(catalog, BandingPolicy::strict()).bands;
  EXPECT_THROW(stability_profile(bands, catalog, 0), ValidationError);
  std::reverse(bands.begin(), bands.end());
  EXPECT_THROW(stability_profile(bands, catalog, 3), ValidationError);
  PerformanceBand empty;
  EXPECT_THROW(stability_profile(std::span(&empty, 1), catalog, 1), ValidationError);
}

// Per-(column, band) count of favourable cells.
std::map<std::pair<std::string, std::string>, int> column_counts(const nlohmann::json& sc) {
  std::map<std::pair<std::string, std::string>, int> out;
  const auto& cols = sc["columns"];
  for (std::size_t r = 0; r < sc["rows"].size(); ++r) {
    const std::string band = sc["rows"][r]["band"];
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out[{band, cols[c].get<std::string>()}] += sc["cells"][r][c].get<int>();
    }
  }
  return out;
}

TEST(FairnessProfile, SummaryPreservesColumnMultisets) {
  const auto catalog = two_band_catalog();
  const auto bands = partition(catalog, BandingPolicy::strict()).bands;
  const auto faithful = fairness_profile(bands, catalog, {FairnessVariant::faithful, 250, 0});
  const auto summary = fairness_profile(bands, catalog, {FairnessVariant::summary, 250, 0});
  EXPECT_EQ(column_counts(faithful.sidecar), column_counts(summary.sidecar));
  EXPECT_EQ(faithful.sidecar["rows"][0]["run_id"], "a1");
  EXPECT_TRUE(summary.sidecar["rows"][0]["run_id"].is_null());
  // Summary: disputable columns first.
  EXPECT_EQ(summary.sidecar["columns"][0], "f0000");
  expect_inside_viewbox(summary.svg);
  expect_inside_viewbox(faithful.svg);
}

TEST(FairnessProfile, SummaryPutsFavourableOnTop) {
  const auto catalog = two_band_catalog();
  const auto bands = partition(catalog, BandingPolicy::strict()).bands;
  const auto summary = fairness_profile(bands, catalog, {FairnessVariant::summary, 250, 0});
  const auto& rows = summary.sidecar["rows"];
  const auto& cells = summary.sidecar["cells"];
  for (std::size_t c = 0; c < summary.sidecar["columns"].size(); ++c) {
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (rows[r]["band"] == rows[r - 1]["band"]) {
        EXPECT_GE(cells[r - 1][c].get<int>(), cells[r][c].get<int>());
      }
    }
  }
}

TEST(FairnessProfile, AgreeingRunsGiveSingleShadeColumns) {
  auto catalog = build_catalog({1, 0}, {{"a", {1, 0}, std::vector<BinaryClass>{1, 0, 1}},
                                        {"b", {1, 0}, std::vector<BinaryClass>{1, 0, 1}}},
                               3);
  const auto bands = partition(catalog, BandingPolicy::strict()).bands;
  const auto fig = fairness_profile(bands, catalog, {FairnessVariant::faithful, 250, 0});
  EXPECT_EQ(fig.sidecar["disputable_total"], 0);
  EXPECT_EQ(fig.sidecar["cells"][0], fig.sidecar["cells"][1]);
}

TEST(FairnessProfile, SamplesDisputableColumnsWhenTooMany) {
  testing::TestRng rng(12);
  auto rb = testing::random_band(rng, 6, 300);
  const auto bands = partition(rb.catalog, BandingPolicy::rounded(1)).bands;
  const auto a = fairness_profile(bands, rb.catalog, {FairnessVariant::summary, 40, 5});
  const auto b = fairness_profile(bands, rb.catalog, {FairnessVariant::summary, 40, 5});
  const auto c = fairness_profile(bands, rb.catalog, {FairnessVariant::summary, 40, 6});
  EXPECT_TRUE(a.sidecar["sampled"].get<bool>());
  EXPECT_EQ(a.sidecar["columns"].size(), 40u);
  EXPECT_EQ(a.svg, b.svg);
  EXPECT_NE(a.sidecar["columns"], c.sidecar["columns"]);
  EXPECT_NE(a.svg.find("seed 5"), std::string::npos);
  EXPECT_THROW(fairness_profile(bands, rb.catalog, {FairnessVariant::summary, 0, 5}), ValidationError);
}

FoldBand fold_band(const std::string& label, ExactRatio eps, ExactRatio amb, DiscrepancyStats d,
                   std::size_t runs) {
  return {label, eps.decimal(2), eps, amb, std::move(d), runs};
}

TEST(MultiplicityPanel, MarkersForSingleAndIdenticalBands) {
  DiscrepancyStats single;
  single.single_run = true;
  DiscrepancyStats flat;
  flat.all_identical = true;
  flat.pair_fractions = {ExactRatio(0, 10)};
  DiscrepancyStats spread;
  spread.pair_fractions = {ExactRatio(1, 10), ExactRatio(3, 10), ExactRatio(2, 10)};
  FoldResult fold{"f0",
                  {fold_band("a", ExactRatio(9, 10), ExactRatio(0, 10), single, 1),
                   fold_band("b", ExactRatio(8, 10), ExactRatio(0, 10), flat, 2),
                   fold_band("c", ExactRatio(7, 10), ExactRatio(3, 10), spread, 3)}};
  const auto fig = multiplicity_panel(std::span(&fold, 1));
  const auto& bands = fig.sidecar["folds"][0]["bands"];
  EXPECT_EQ(bands[0]["marker"], "single");
  EXPECT_EQ(bands[1]["marker"], "flat");
  EXPECT_EQ(bands[2]["marker"], "violin");
  int total = 0;
  for (const auto& b : bands[2]["bins"]) total += b.get<int>();
  EXPECT_EQ(total, 3);
  expect_inside_viewbox(fig.svg);
  EXPECT_THROW(multiplicity_panel({}), ValidationError);
}

TEST(MultiplicityPanel, TenFlatFolds) {
  std::vector<FoldResult> folds;
  for (int f = 0; f < 10; ++f) {
    DiscrepancyStats flat;
    flat.all_identical = true;
    flat.pair_fractions = {ExactRatio(0, 5)};
    folds.push_back({fmt::format("fold{}", f),
                     {fold_band("x", ExactRatio(9, 10), ExactRatio(0, 5), flat, 2),
                      fold_band("y", ExactRatio(8, 10), ExactRatio(0, 5), flat, 2)}});
  }
  const auto fig = multiplicity_panel(folds);
  EXPECT_EQ(fig.sidecar["folds"].size(), 10u);
  expect_inside_viewbox(fig.svg);
}

TEST(UtilityPlot, RendersPointsAndBaselines) {
  UtilityFold fold{"f", {{"a", ExactRatio(9, 10), ExactRatio(8, 10)}}, ExactRatio(7, 10)};
  const auto fig = utility_plot(std::span(&fold, 1));
  EXPECT_EQ(fig.sidecar["folds"][0]["baseline"]["exact"], "7/10");
  expect_inside_viewbox(fig.svg);
  EXPECT_THROW(utility_plot({}), ValidationError);
}

TEST(ProfileStyle, CyclesPaletteWithDashes) {
  ProfileStyle style;
  EXPECT_EQ(style.colour(0), style.colour(10));
  EXPECT_TRUE(style.dash(3).empty());
  EXPECT_FALSE(style.dash(10).empty());
  EXPECT_NE(style.dash(10), style.dash(20));
}

}  // namespace
}  // namespace multimax::profiles
