#include "multimax/scenarios.hpp"

#include <fmt/format.h>

#include "multimax/errors.hpp"

namespace multimax::zoo::scenarios {

ClusterSpec separable_layout() {
  ClusterSpec spec;
  spec.shape = ClusterSpec::Shape::half_planes;
  spec.gap = 0.25;
  return spec;
}

ClusterSpec one_error_layout() {
  ClusterSpec spec;
  spec.shape = ClusterSpec::Shape::half_planes;
  spec.gap = 0.4;
  spec.borderline = {
      {{-0.1, 0.6}, kUnfavourable},
      {{-0.1, -0.6}, kUnfavourable},
      {{-0.05, 0.0}, kFavourable},
  };
  return spec;
}

ClusterSpec two_error_layout() {
  ClusterSpec spec;
  spec.shape = ClusterSpec::Shape::half_planes;
  spec.gap = 0.4;
  spec.borderline = {
      {{0.0, -0.8}, kUnfavourable},
      {{0.0, -0.4}, kFavourable},
      {{0.0, 0.0}, kFavourable},
      {{0.0, 0.4}, kUnfavourable},
      {{0.0, 0.8}, kUnfavourable},
  };
  return spec;
}

ClusterSpec layout(std::string_view name) {
  if (name == "separable") return separable_layout();
  if (name == "one-error") return one_error_layout();
  if (name == "two-errors") return two_error_layout();
  throw ValidationError(fmt::format(
      "unknown layout '{}' (expected separable, one-error or two-errors)", name));
}

std::vector<ZooRun> joined_lines_band(const Dataset2D& validation) {
  std::vector<ZooRun> out;
  // Tilted lines each pull one of the upper/lower unfavourable borderline
  // points onto the favourable side; the vertical line misses the
  // favourable borderline point instead.
  out.push_back(make_zoo_run("joined/line-a", "linear", LinearModel::favourable_left_of(0.0, 0.25),
                             validation));
  out.push_back(make_zoo_run("joined/line-b", "linear", LinearModel::favourable_left_of(0.0, -0.25),
                             validation));
  out.push_back(make_zoo_run("joined/line-c", "linear", LinearModel::favourable_left_of(-0.2, 0.0),
                             validation));
  return out;
}

FamilySpec label_flip_knn() {
  FamilySpec spec;
  spec.kind = FamilyKind::knn;
  spec.k = 1;
  spec.perturbation = TrainingPerturbation::flip_one_label;
  return spec;
}

}  // namespace multimax::zoo::scenarios
