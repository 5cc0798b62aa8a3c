#include "multimax/banding.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include <fmt/format.h>

#include "multimax/errors.hpp"

namespace multimax {

namespace {

constexpr int kStrictDisplayDigits = 4;

int parse_digits(std::string_view text) {
  int k = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError(fmt::format("cannot parse rounding digits '{}'", text));
  }
  return k;
}

std::string refinement_suffix(const std::vector<std::pair<MetricKind, ExactRatio>>& values) {
  std::string out;
  for (const auto& [kind, value] : values) {
    out += out.empty() ? " | " : ", ";
    out += fmt::format("{}={}", to_string(kind), value.str());
  }
  return out;
}

PerformanceBand make_band(BandingMode mode, std::string label, std::string display,
                          ExactRatio epsilon, std::vector<std::string> ids) {
  PerformanceBand band;
  band.mode = mode;
  band.label = std::move(label);
  band.epsilon_display = std::move(display);
  band.epsilon = epsilon;
  std::sort(ids.begin(), ids.end());
  band.run_ids = std::move(ids);
  return band;
}

std::vector<PerformanceBand> strict_bands(const RunCatalog& catalog) {
  // Key on the reduced utility so non-reduced representations collapse.
  std::map<ExactRatio, std::vector<const ModelRun*>> groups;
  for (const auto& run : catalog.runs()) groups[run.utility()].push_back(&run);
  std::vector<PerformanceBand> out;
  for (auto& [utility, members] : groups) {
    std::vector<std::string> ids;
    for (const auto* run : members) ids.push_back(run->id());
    // Label with the smallest run id's stored representation; all runs share
    // the validation denominator so this is canonical.
    const auto* first = *std::min_element(members.begin(), members.end(),
                                          [](auto* a, auto* b) { return a->id() < b->id(); });
    const auto& eps = first->utility();
    out.push_back(make_band(BandingMode::strict, eps.str(), eps.decimal(kStrictDisplayDigits), eps,
                            std::move(ids)));
  }
  return out;
}

std::vector<PerformanceBand> rounded_bands(const RunCatalog& catalog, int digits) {
  std::map<std::uint64_t, std::vector<std::string>> groups;
  for (const auto& run : catalog.runs()) {
    groups[round_to_digits(run.utility(), digits)].push_back(run.id());
  }
  std::vector<PerformanceBand> out;
  for (auto& [q, ids] : groups) {
    auto key = fixed_point(q, digits);
    auto band = make_band(BandingMode::rounded, key, key, ExactRatio(q, pow10(digits)),
                          std::move(ids));
    band.digits = digits;
    out.push_back(std::move(band));
  }
  return out;
}

std::vector<PerformanceBand> tolerance_bands(const RunCatalog& catalog,
                                             const BandingPolicy& policy) {
  std::set<ExactRatio> anchors(policy.anchors.begin(), policy.anchors.end());
  if (anchors.empty()) {
    for (const auto& run : catalog.runs()) anchors.insert(run.utility());
  }
  std::vector<PerformanceBand> out;
  for (const auto& anchor : anchors) {
    const SignedRatio lo = SignedRatio(anchor) - policy.delta;
    const SignedRatio hi = SignedRatio(anchor) + policy.delta;
    std::vector<std::string> ids;
    for (const auto& run : catalog.runs()) {
      const SignedRatio u(run.utility());
      if (lo <= u && u <= hi) ids.push_back(run.id());
    }
    if (ids.empty()) continue;
    auto band = make_band(BandingMode::tolerance, fmt::format("[{}, {}]", lo.str(), hi.str()),
                          fmt::format("{}±{}", anchor.decimal(kStrictDisplayDigits),
                                      policy.delta.decimal(kStrictDisplayDigits)),
                          anchor, std::move(ids));
    band.delta = policy.delta;
    out.push_back(std::move(band));
  }
  return out;
}

}  // namespace

BandingPolicy BandingPolicy::strict() {
  BandingPolicy p;
  p.mode = BandingMode::strict;
  return p;
}

BandingPolicy BandingPolicy::tolerance(SignedRatio delta, std::vector<ExactRatio> anchors) {
  BandingPolicy p;
  p.mode = BandingMode::tolerance;
  p.delta = delta;
  p.anchors = std::move(anchors);
  p.validate();
  return p;
}

BandingPolicy BandingPolicy::rounded(int digits) {
  BandingPolicy p;
  p.mode = BandingMode::rounded;
  p.digits = digits;
  p.validate();
  return p;
}

BandingPolicy BandingPolicy::parse(std::string_view text) {
  if (text == "strict") return strict();
  if (text.starts_with("tol:")) return tolerance(SignedRatio::parse(text.substr(4)));
  if (text.starts_with("round:")) return rounded(parse_digits(text.substr(6)));
  throw ValidationError(
      fmt::format("unknown banding policy '{}' (expected strict, tol:<delta> or round:<k>)", text));
}

std::string BandingPolicy::str() const {
  switch (mode) {
    case BandingMode::strict: return "strict";
    case BandingMode::tolerance: return fmt::format("tol:{}", delta.str());
    case BandingMode::rounded: return fmt::format("round:{}", digits);
  }
  return "unknown";
}

void BandingPolicy::validate() const {
  if (mode == BandingMode::tolerance && delta < SignedRatio{}) {
    throw ValidationError(fmt::format("tolerance delta {} is negative", delta.str()));
  }
  if (mode == BandingMode::rounded && (digits < 1 || digits > 15)) {
    throw ValidationError(fmt::format("rounding digits {} outside [1, 15]", digits));
  }
  if (!tie_break.empty() && tie_break.front() == MetricKind::accuracy) {
    throw ValidationError("tie-break order must not start with the banding metric (accuracy)");
  }
  std::set<MetricKind> seen;
  for (auto kind : tie_break) {
    if (!seen.insert(kind).second) {
      throw ValidationError(fmt::format("tie-break order repeats '{}'", to_string(kind)));
    }
  }
}

std::vector<MetricKind> parse_tie_break(std::string_view text) {
  std::vector<MetricKind> out;
  while (!text.empty()) {
    auto comma = text.find(',');
    auto item = text.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    out.push_back(parse_metric_kind(item));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

bool PerformanceBand::contains(std::string_view run_id) const {
  return std::binary_search(run_ids.begin(), run_ids.end(), run_id,
                            [](std::string_view a, std::string_view b) { return a < b; });
}

bool PerformanceBand::admits(const ExactRatio& utility) const {
  switch (mode) {
    case BandingMode::strict: return utility == epsilon;
    case BandingMode::rounded: return round_to_digits(utility, digits) == round_to_digits(epsilon, digits);
    case BandingMode::tolerance: {
      const SignedRatio u(utility);
      const SignedRatio e(epsilon);
      return e - delta <= u && u <= e + delta;
    }
  }
  return false;
}

bool PerformanceBand::admits(const ConfusionMatrix& cm) const {
  if (!admits(metric(cm, MetricKind::accuracy))) return false;
  return std::all_of(refinement.begin(), refinement.end(), [&](const auto& entry) {
    auto value = try_metric(cm, entry.first);
    return value && *value == entry.second;
  });
}

Banding partition(const RunCatalog& catalog, const BandingPolicy& policy) {
  policy.validate();
  Banding out;
  out.policy = policy;
  switch (policy.mode) {
    case BandingMode::strict: out.bands = strict_bands(catalog); break;
    case BandingMode::rounded: out.bands = rounded_bands(catalog, policy.digits); break;
    case BandingMode::tolerance: out.bands = tolerance_bands(catalog, policy); break;
  }
  std::stable_sort(out.bands.begin(), out.bands.end(),
                   [](const auto& a, const auto& b) { return a.epsilon > b.epsilon; });
  if (policy.mode == BandingMode::tolerance) {
    std::set<std::string_view> seen;
    for (const auto& band : out.bands) {
      for (const auto& id : band.run_ids) out.overlapping |= !seen.insert(id).second;
    }
  }
  if (!policy.tie_break.empty()) {
    std::vector<PerformanceBand> refined;
    for (const auto& band : out.bands) {
      auto parts = refine_lexicographic(band, catalog, policy.tie_break);
      std::move(parts.begin(), parts.end(), std::back_inserter(refined));
    }
    out.bands = std::move(refined);
  }
  return out;
}

std::vector<PerformanceBand> refine_lexicographic(const PerformanceBand& band,
                                                  const RunCatalog& catalog,
                                                  std::span<const MetricKind> order) {
  using Key = std::vector<ExactRatio>;
  std::map<Key, std::vector<std::string>, std::greater<>> groups;
  for (const auto& id : band.run_ids) {
    const auto& run = catalog.at(id);
    Key key;
    for (auto kind : order) {
      auto value = try_metric(run.confusion(), kind);
      if (!value) {
        throw ComputationError(fmt::format("{} is undefined for run '{}' in band '{}'",
                                           to_string(kind), id, band.label));
      }
      key.push_back(*value);
    }
    groups[std::move(key)].push_back(id);
  }
  std::vector<PerformanceBand> out;
  for (auto& [key, ids] : groups) {
    PerformanceBand sub = band;
    for (std::size_t i = 0; i < order.size(); ++i) sub.refinement.emplace_back(order[i], key[i]);
    std::vector<std::pair<MetricKind, ExactRatio>> added(sub.refinement.end() - order.size(),
                                                         sub.refinement.end());
    sub.label = band.label + refinement_suffix(added);
    sub.run_ids = std::move(ids);
    out.push_back(std::move(sub));
  }
  return out;
}

std::vector<BandCount> band_counts(const RunCatalog& catalog,
                                   std::span<const BandingPolicy> policies) {
  std::vector<BandCount> out;
  for (const auto& policy : policies) {
    auto banding = partition(catalog, policy);
    out.push_back({policy, banding.bands.size(), banding.overlapping});
  }
  return out;
}

}  // namespace multimax
