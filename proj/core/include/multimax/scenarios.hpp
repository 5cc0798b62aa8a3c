#pragma once

#include <string_view>
#include <vector>

#include "multimax/zoo.hpp"

/// Synthetic layouts reproducing the classic multiplicity pictures: a
/// separable set, a set where every best line makes one error, and a set
/// where linear models make two errors of differing types.
namespace multimax::zoo::scenarios {

/// Half planes separated by a gap; a perfect linear separator exists.
ClusterSpec separable_layout();

/// Half planes plus three borderline points: two unfavourable points just
/// inside the favourable side at (-0.1, +-0.6) and one favourable point at
/// (-0.05, 0). The best lines make exactly one error.
ClusterSpec one_error_layout();

/// Half planes plus five borderline points on the x1 = 0 axis, ordered in
/// x2 as unfavourable, favourable, favourable, unfavourable, unfavourable.
/// Near-vertical lines realise all three two-error confusion matrices
/// (two false negatives; one of each; two false positives).
ClusterSpec two_error_layout();

/// Looks up a layout by name: "separable", "one-error", "two-errors".
ClusterSpec layout(std::string_view name);

/// Three hand-placed lines on one_error_layout() data, each with a single
/// error, whose favourable-wins join makes two errors.
std::vector<ZooRun> joined_lines_band(const Dataset2D& validation);

/// 1-NN trained on the validation set with one training label flipped per
/// candidate: every member has exactly one error, and every instance is
/// assigned the favourable class by some member.
FamilySpec label_flip_knn();

}  // namespace multimax::zoo::scenarios
