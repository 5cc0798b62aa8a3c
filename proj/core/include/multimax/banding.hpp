#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "multimax/prediction.hpp"
#include "multimax/ratio.hpp"

namespace multimax {

enum class BandingMode { strict, tolerance, rounded };

/// How runs are grouped into performance bands.
///
/// Textual form (CLI and manifests): `strict`, `tol:<delta>` or
/// `round:<k>`. Delta accepts decimals ("0.005") or fractions ("1/200").
struct BandingPolicy {
  BandingMode mode = BandingMode::rounded;
  /// Tolerance half-width; only meaningful for BandingMode::tolerance.
  SignedRatio delta{};
  /// Decimal digits; only meaningful for BandingMode::rounded.
  int digits = 2;
  /// Tolerance anchors; empty means "every distinct strict utility".
  std::vector<ExactRatio> anchors;
  /// Lexicographic refinement applied inside every band.
  std::vector<MetricKind> tie_break;

  static BandingPolicy strict();
  static BandingPolicy tolerance(SignedRatio delta, std::vector<ExactRatio> anchors = {});
  static BandingPolicy rounded(int digits);

  /// Throws ValidationError on malformed text.
  static BandingPolicy parse(std::string_view text);
  [[nodiscard]] std::string str() const;

  /// Throws ValidationError when an invariant does not hold.
  void validate() const;
};

/// Parses a comma-separated metric list such as "specificity,recall".
std::vector<MetricKind> parse_tie_break(std::string_view text);

/// A set of runs considered equivalent under a BandingPolicy.
struct PerformanceBand {
  /// Canonical key: exact ratio (strict), rounded decimal (rounded) or
  /// "[lo, hi]" interval (tolerance); refined sub-bands append the metric
  /// tuple.
  std::string label;
  /// Sorted ascending.
  std::vector<std::string> run_ids;
  std::string epsilon_display;
  /// Representative utility: the shared utility, the rounded value, or the
  /// tolerance anchor.
  ExactRatio epsilon;
  BandingMode mode = BandingMode::strict;
  int digits = 0;
  SignedRatio delta{};
  /// Metric values fixed by lexicographic refinement, in refinement order.
  std::vector<std::pair<MetricKind, ExactRatio>> refinement;

  [[nodiscard]] std::size_t size() const noexcept { return run_ids.size(); }
  [[nodiscard]] bool contains(std::string_view run_id) const;
  /// Whether a run with this utility belongs to the band's utility key.
  [[nodiscard]] bool admits(const ExactRatio& utility) const;
  /// Utility key plus every refinement metric; undefined metrics never match.
  [[nodiscard]] bool admits(const ConfusionMatrix& cm) const;
};

struct Banding {
  BandingPolicy policy;
  /// Sorted by descending epsilon.
  std::vector<PerformanceBand> bands;
  /// True when bands may share runs (tolerance mode); downstream code must
  /// not assume disjointness then.
  bool overlapping = false;
};

/// Throws ValidationError on an invalid policy; the catalog guarantees a
/// non-empty run set on a single validation index. Output is independent
/// of run order in the catalog.
Banding partition(const RunCatalog& catalog, const BandingPolicy& policy);

/// Splits a band by exact equality of the metric tuple in `order`; sub-bands
/// come out in lexicographically descending order. Throws ComputationError
/// naming the run and metric when a metric is undefined.
std::vector<PerformanceBand> refine_lexicographic(const PerformanceBand& band,
                                                  const RunCatalog& catalog,
                                                  std::span<const MetricKind> order);

struct BandCount {
  BandingPolicy policy;
  std::size_t bands = 0;
  bool overlapping = false;
};

std::vector<BandCount> band_counts(const RunCatalog& catalog,
                                   std::span<const BandingPolicy> policies);

}  // namespace multimax
