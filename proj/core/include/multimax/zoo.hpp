#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "multimax/banding.hpp"
#include "multimax/classifiers.hpp"
#include "multimax/prediction.hpp"
#include "multimax/ratio.hpp"

namespace multimax::zoo {

struct Box2D {
  double x1_min = -1.0;
  double x1_max = 1.0;
  double x2_min = -1.0;
  double x2_max = 1.0;

  [[nodiscard]] double width() const noexcept { return x1_max - x1_min; }
  [[nodiscard]] double height() const noexcept { return x2_max - x2_min; }
  [[nodiscard]] bool contains(Point2D p) const noexcept {
    return p.x1 >= x1_min && p.x1 <= x1_max && p.x2 >= x2_min && p.x2 <= x2_max;
  }
};

/// A hand-placed point near the class boundary.
struct BorderlinePoint {
  Point2D at;
  BinaryClass label = kFavourable;
};

/// Geometry of a synthetic two-class data set.
///
/// Gaussian blobs draw each class around its mean (resampled until inside
/// the box). Half planes draw the favourable class uniformly from
/// x1 <= -gap and the unfavourable class from x1 >= gap. Borderline points
/// count towards their class's quota.
struct ClusterSpec {
  enum class Shape { gaussian_blobs, half_planes };

  Shape shape = Shape::gaussian_blobs;
  Box2D box{};
  Point2D favourable_mean{-0.5, 0.0};
  Point2D unfavourable_mean{0.5, 0.0};
  double stddev = 0.15;
  double gap = 0.3;
  std::vector<BorderlinePoint> borderline;
};

struct Dataset2D {
  std::vector<Point2D> points;
  LabelVector labels;
  Box2D box;
  std::uint64_t seed = 0;

  [[nodiscard]] const IndexRef& index() const noexcept { return labels.index_ref(); }
  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
};

/// Deterministic for a fixed seed; each class gets exactly `n_per_class`
/// points. Throws ValidationError on n_per_class == 0, too many borderline
/// points, or a degenerate spec (zero spread with coincident means).
Dataset2D generate_dataset(const ClusterSpec& spec, std::size_t n_per_class, std::uint64_t seed,
                           std::string index_name = "validation", std::string id_prefix = "i");

/// Wraps explicit points as a data set.
Dataset2D make_dataset(std::vector<Point2D> points, std::vector<BinaryClass> labels, Box2D box,
                       std::string index_name = "validation", std::string id_prefix = "i");

enum class FamilyKind { linear, polynomial, knn, tree };

enum class TrainingPerturbation {
  none,            ///< train on the full training set
  leave_one_out,   ///< one candidate per dropped training point
  flip_one_label,  ///< one candidate per relabelled training point
  random_subsets,  ///< seeded drops of `drop_fraction` of the points
};

struct FamilySpec {
  FamilyKind kind = FamilyKind::linear;
  int degree = 2;     ///< polynomial
  std::size_t k = 1;  ///< knn default when `ks` is empty
  int max_depth = 2;  ///< tree
  std::uint64_t seed = 0;

  /// Linear: angles evenly over [0, 2pi) times offsets evenly over
  /// [-offset_span, offset_span]. Predicts 1 iff cos(a) x1 + sin(a) x2 > offset.
  std::size_t angles = 72;
  std::size_t offsets = 41;
  double offset_span = 1.0;

  /// Polynomial: base fit plus `samples - 1` Gaussian perturbations of its
  /// coefficients with relative scale `sigma`.
  std::size_t samples = 64;
  double sigma = 0.1;

  /// k-NN.
  std::vector<std::size_t> ks;
  TrainingPerturbation perturbation = TrainingPerturbation::none;
  double drop_fraction = 0.1;

  /// Flexibility bounds; candidates outside them are not enumerated.
  std::optional<std::size_t> min_k;
  std::optional<int> max_depth_limit;

  /// "linear", "poly:<d>", "knn:<k>", "tree:<d>".
  static FamilySpec parse(std::string_view text);
  [[nodiscard]] std::string tag() const;
  void validate() const;
};

/// Lazily indexed candidates of a family on a fixed training set.
/// Candidate i depends only on (spec, train, i).
class FamilyEnumerator {
 public:
  FamilyEnumerator(FamilySpec spec, const Dataset2D& train);

  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] Classifier2D build(std::size_t i) const;
  [[nodiscard]] std::string candidate_id(std::size_t i) const;
  [[nodiscard]] const FamilySpec& spec() const noexcept { return spec_; }

 private:
  FamilySpec spec_;
  const Dataset2D* train_;
  std::vector<std::size_t> ks_;
  std::size_t per_k_ = 1;
  std::size_t size_ = 0;
  std::optional<PolynomialModel> base_polynomial_;
};

/// A ModelRun that also keeps its decision function.
struct ZooRun {
  ModelRun run;
  Classifier2D model;
};

PredictionVector predict_all(const Classifier2D& model, const Dataset2D& data);

/// Scores candidate `model` as a run. `fairness` defaults to `validation`.
ZooRun make_zoo_run(std::string run_id, std::string family_tag, Classifier2D model,
                    const Dataset2D& validation, const Dataset2D* fairness = nullptr);

/// One run per enumerated candidate. Throws ValidationError on an empty
/// enumeration.
std::vector<ZooRun> enumerate_family(const FamilySpec& family, const Dataset2D& train,
                                     const Dataset2D& validation,
                                     const Dataset2D* fairness = nullptr, unsigned threads = 1);

/// Drops runs whose decision functions agree on every cell centre of a
/// `resolution`^2 grid over `box`, keeping the first of each class.
std::vector<ZooRun> deduplicate_on_grid(std::vector<ZooRun> runs, const Box2D& box,
                                        std::size_t resolution);

RunCatalog make_catalog(std::span<const ZooRun> runs, const Dataset2D& validation);

struct RegionEstimate {
  std::string band_label;
  std::size_t resolution = 0;
  ExactRatio disputable_fraction;
  /// Row-major, row = x2 cell, column = x1 cell, 1 = disputable.
  std::vector<std::uint8_t> mask;

  [[nodiscard]] bool at(std::size_t row, std::size_t col) const {
    return mask.at(row * resolution + col) != 0;
  }
};

/// Cell centre of (row, col) on a resolution^2 grid over `box`.
Point2D cell_centre(const Box2D& box, std::size_t resolution, std::size_t row, std::size_t col);

/// A cell is disputable iff two band members disagree at its centre.
/// Throws ValidationError when a band member has no decision function
/// among `runs`, or resolution < 2.
RegionEstimate estimate_disputable_region(const PerformanceBand& band, std::span<const ZooRun> runs,
                                          const Box2D& box, std::size_t resolution = 512,
                                          unsigned threads = 1);

/// Binary PGM (P5) of a region mask; disputable cells are black.
std::string region_pgm(const RegionEstimate& region);

/// SVG of the mask with one run-length rectangle per disputable row segment.
std::string region_svg(const RegionEstimate& region, double cell_px = 1.0);

struct FlipRequest {
  std::string target_instance;
  BinaryClass target_class = kFavourable;
  std::size_t budget = 1000;
};

struct FlipOutcome {
  std::optional<ZooRun> found;
  bool from_band = false;
  std::size_t candidates_examined = 0;

  [[nodiscard]] bool exhausted() const noexcept { return !found.has_value(); }
};

/// Looks for a family member inside `band` that assigns the target class to
/// the target fairness instance: existing band members first, then family
/// candidates in enumeration order up to the budget. Every hit is re-scored
/// and re-checked before it is returned. Throws ValidationError when the
/// target is not in the fairness set or the budget is zero.
FlipOutcome flip_search(const FamilySpec& family, const Dataset2D& train,
                        const Dataset2D& validation, const Dataset2D& fairness,
                        const PerformanceBand& band, std::span<const ZooRun> band_members,
                        const FlipRequest& request);

}  // namespace multimax::zoo
