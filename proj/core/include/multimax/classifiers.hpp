#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "multimax/prediction.hpp"

namespace multimax::zoo {

struct Point2D {
  double x1 = 0.0;
  double x2 = 0.0;
  friend bool operator==(const Point2D&, const Point2D&) = default;
};

/// Predicts 1 iff w1*x1 + w2*x2 + bias > 0.
struct LinearModel {
  double w1 = 0.0;
  double w2 = 0.0;
  double bias = 0.0;

  [[nodiscard]] double score(Point2D p) const noexcept { return w1 * p.x1 + w2 * p.x2 + bias; }
  [[nodiscard]] BinaryClass predict(Point2D p) const noexcept { return score(p) > 0.0 ? 1 : 0; }
  /// Number of non-zero weights.
  [[nodiscard]] double complexity() const noexcept;

  /// The line x1 = offset + slope * x2 with the favourable class on the
  /// x1 < boundary side.
  static LinearModel favourable_left_of(double offset, double slope) noexcept;
};

/// Linear in parameters over monomials x1^i x2^j with i + j <= degree,
/// ordered by total degree then by descending power of x1.
struct PolynomialModel {
  int degree = 1;
  std::vector<double> coefficients;

  [[nodiscard]] double score(Point2D p) const;
  [[nodiscard]] BinaryClass predict(Point2D p) const { return score(p) > 0.0 ? 1 : 0; }
  [[nodiscard]] double complexity() const noexcept { return degree; }

  static std::size_t feature_count(int degree) noexcept;
  static std::vector<double> features(Point2D p, int degree);
};

/// Majority vote over the k nearest training points (Euclidean distance,
/// ties broken by training order). An even split goes to the class of the
/// single nearest neighbour.
struct KnnModel {
  std::vector<Point2D> points;
  std::vector<BinaryClass> labels;
  std::size_t k = 1;

  [[nodiscard]] BinaryClass predict(Point2D p) const;
  /// Effective parameter count n / k.
  [[nodiscard]] double complexity() const noexcept;
};

/// Axis-parallel binary tree: x[feature] <= threshold goes left.
struct TreeModel {
  struct Node {
    int feature = -1;  ///< -1 marks a leaf.
    double threshold = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    BinaryClass leaf_class = 0;
  };
  std::vector<Node> nodes;  ///< nodes[0] is the root.

  [[nodiscard]] BinaryClass predict(Point2D p) const;
  [[nodiscard]] int depth() const;
  [[nodiscard]] double complexity() const { return depth(); }
  /// Split thresholds used on `feature`.
  [[nodiscard]] std::vector<double> thresholds(int feature) const;

  static TreeModel leaf(BinaryClass c);
  static TreeModel stump(int feature, double threshold, BinaryClass left, BinaryClass right);
};

using Classifier2D = std::variant<LinearModel, PolynomialModel, KnnModel, TreeModel>;

BinaryClass predict(const Classifier2D& model, Point2D p);
double complexity(const Classifier2D& model);

/// Favourable-wins join of several decision functions at one point.
BinaryClass predict_fair(std::span<const Classifier2D* const> members, Point2D p);

/// Least-squares fit (small ridge) of a polynomial score to +1/-1 targets.
PolynomialModel fit_polynomial(std::span<const Point2D> points,
                               std::span<const BinaryClass> labels, int degree,
                               double ridge = 1e-6);

/// Greedy Gini tree of bounded depth. At each node the candidate features
/// are visited in an order drawn from `seed`; the first feature offering a
/// strictly positive impurity decrease is split at its best threshold.
TreeModel grow_tree(std::span<const Point2D> points, std::span<const BinaryClass> labels,
                    int max_depth, std::uint64_t seed);

}  // namespace multimax::zoo
