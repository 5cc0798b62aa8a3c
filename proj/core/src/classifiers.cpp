#include "multimax/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "detail/rng.hpp"
#include "multimax/errors.hpp"

namespace multimax::zoo {

double LinearModel::complexity() const noexcept {
  return static_cast<double>((w1 != 0.0) + (w2 != 0.0));
}

LinearModel LinearModel::favourable_left_of(double offset, double slope) noexcept {
  // x1 < offset + slope * x2  <=>  -x1 + slope * x2 + offset > 0
  return {-1.0, slope, offset};
}

std::size_t PolynomialModel::feature_count(int degree) noexcept {
  const auto d = static_cast<std::size_t>(degree);
  return (d + 1) * (d + 2) / 2;
}

std::vector<double> PolynomialModel::features(Point2D p, int degree) {
  std::vector<double> out;
  out.reserve(feature_count(degree));
  for (int total = 0; total <= degree; ++total) {
    for (int i = total; i >= 0; --i) {
      out.push_back(std::pow(p.x1, i) * std::pow(p.x2, total - i));
    }
  }
  return out;
}

double PolynomialModel::score(Point2D p) const {
  const auto f = features(p, degree);
  if (f.size() != coefficients.size()) {
    throw ValidationError(fmt::format("polynomial of degree {} expects {} coefficients, has {}",
                                      degree, f.size(), coefficients.size()));
  }
  return std::inner_product(f.begin(), f.end(), coefficients.begin(), 0.0);
}

BinaryClass KnnModel::predict(Point2D p) const {
  if (points.empty() || k == 0) throw ValidationError("k-NN model without training points");
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> dist(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double dx = points[i].x1 - p.x1;
    const double dy = points[i].x2 - p.x2;
    dist[i] = dx * dx + dy * dy;
  }
  const std::size_t kk = std::min(k, points.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(kk), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
                    });
  std::size_t ones = 0;
  for (std::size_t i = 0; i < kk; ++i) ones += labels[order[i]];
  if (2 * ones == kk) return labels[order.front()];
  return 2 * ones > kk ? 1 : 0;
}

double KnnModel::complexity() const noexcept {
  return k == 0 ? 0.0 : static_cast<double>(points.size()) / static_cast<double>(k);
}

BinaryClass TreeModel::predict(Point2D p) const {
  std::size_t at = 0;
  while (true) {
    const auto& node = nodes.at(at);
    if (node.feature < 0) return node.leaf_class;
    const double x = node.feature == 0 ? p.x1 : p.x2;
    at = x <= node.threshold ? node.left : node.right;
  }
}

int TreeModel::depth() const {
  // Iterative depth-first walk.
  int best = 0;
  std::vector<std::pair<std::size_t, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [at, d] = stack.back();
    stack.pop_back();
    const auto& node = nodes.at(at);
    if (node.feature < 0) {
      best = std::max(best, d);
    } else {
      stack.emplace_back(node.left, d + 1);
      stack.emplace_back(node.right, d + 1);
    }
  }
  return best;
}

std::vector<double> TreeModel::thresholds(int feature) const {
  std::vector<double> out;
  for (const auto& node : nodes) {
    if (node.feature == feature) out.push_back(node.threshold);
  }
  std::sort(out.begin(), out.end());
  return out;
}

TreeModel TreeModel::leaf(BinaryClass c) {
  TreeModel t;
  t.nodes.push_back({-1, 0.0, 0, 0, c});
  return t;
}

TreeModel TreeModel::stump(int feature, double threshold, BinaryClass left, BinaryClass right) {
  TreeModel t;
  t.nodes.push_back({feature, threshold, 1, 2, 0});
  t.nodes.push_back({-1, 0.0, 0, 0, left});
  t.nodes.push_back({-1, 0.0, 0, 0, right});
  return t;
}

BinaryClass predict(const Classifier2D& model, Point2D p) {
  return std::visit([&](const auto& m) { return m.predict(p); }, model);
}

double complexity(const Classifier2D& model) {
  return std::visit([](const auto& m) { return static_cast<double>(m.complexity()); }, model);
}

BinaryClass predict_fair(std::span<const Classifier2D* const> members, Point2D p) {
  if (members.empty()) throw ValidationError("fair decision function needs at least one member");
  for (const auto* m : members) {
    if (predict(*m, p) == kFavourable) return kFavourable;
  }
  return kUnfavourable;
}

PolynomialModel fit_polynomial(std::span<const Point2D> points,
                               std::span<const BinaryClass> labels, int degree, double ridge) {
  if (degree < 1) throw ValidationError(fmt::format("polynomial degree {} < 1", degree));
  if (points.size() != labels.size() || points.empty()) {
    throw ValidationError("polynomial fit needs aligned, non-empty points and labels");
  }
  const auto p = static_cast<Eigen::Index>(PolynomialModel::feature_count(degree));
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd design(n, p);
  Eigen::VectorXd target(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto f = PolynomialModel::features(points[static_cast<std::size_t>(r)], degree);
    for (Eigen::Index c = 0; c < p; ++c) design(r, c) = f[static_cast<std::size_t>(c)];
    target(r) = labels[static_cast<std::size_t>(r)] == kFavourable ? 1.0 : -1.0;
  }
  Eigen::MatrixXd normal = design.transpose() * design;
  normal.diagonal().array() += ridge;
  Eigen::VectorXd solution = normal.ldlt().solve(design.transpose() * target);
  PolynomialModel model;
  model.degree = degree;
  model.coefficients.assign(solution.data(), solution.data() + solution.size());
  return model;
}

namespace {

struct SplitChoice {
  double gain = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

double gini(std::size_t ones, std::size_t n) {
  if (n == 0) return 0.0;
  const double p = static_cast<double>(ones) / static_cast<double>(n);
  return 2.0 * p * (1.0 - p);
}

SplitChoice best_split(std::span<const Point2D> points, std::span<const BinaryClass> labels,
                       std::vector<std::size_t>& idx, int feature) {
  auto value = [&](std::size_t i) { return feature == 0 ? points[i].x1 : points[i].x2; };
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return value(a) != value(b) ? value(a) < value(b) : a < b;
  });
  std::size_t total_ones = 0;
  for (auto i : idx) total_ones += labels[i];
  const std::size_t n = idx.size();
  const double parent = gini(total_ones, n);
  SplitChoice best;
  std::size_t left_ones = 0;
  for (std::size_t cut = 1; cut < n; ++cut) {
    left_ones += labels[idx[cut - 1]];
    const double lo = value(idx[cut - 1]);
    const double hi = value(idx[cut]);
    if (lo == hi) continue;
    const double weighted =
        (static_cast<double>(cut) * gini(left_ones, cut) +
         static_cast<double>(n - cut) * gini(total_ones - left_ones, n - cut)) /
        static_cast<double>(n);
    const double gain = parent - weighted;
    if (gain > best.gain + 1e-12) best = {gain, lo, hi};
  }
  return best;
}

void grow(TreeModel& tree, std::size_t at, std::span<const Point2D> points,
          std::span<const BinaryClass> labels, std::vector<std::size_t> idx, int depth_left,
          detail::Rng& rng) {
  std::size_t ones = 0;
  for (auto i : idx) ones += labels[i];
  tree.nodes[at].leaf_class = 2 * ones >= idx.size() ? 1 : 0;
  if (depth_left == 0 || ones == 0 || ones == idx.size()) return;

  int order[2] = {0, 1};
  if (rng.below(2) == 1) std::swap(order[0], order[1]);
  for (int feature : order) {
    auto choice = best_split(points, labels, idx, feature);
    if (choice.gain <= 1e-12) continue;
    // Any threshold in the open gap separates the same training points.
    const double threshold = choice.lo + (0.1 + 0.8 * rng.uniform01()) * (choice.hi - choice.lo);
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (auto i : idx) {
      ((feature == 0 ? points[i].x1 : points[i].x2) <= threshold ? left : right).push_back(i);
    }
    const std::size_t l = tree.nodes.size();
    tree.nodes.push_back({});
    tree.nodes.push_back({});
    tree.nodes[at].feature = feature;
    tree.nodes[at].threshold = threshold;
    tree.nodes[at].left = l;
    tree.nodes[at].right = l + 1;
    grow(tree, l, points, labels, std::move(left), depth_left - 1, rng);
    grow(tree, l + 1, points, labels, std::move(right), depth_left - 1, rng);
    return;
  }
}

}  // namespace

TreeModel grow_tree(std::span<const Point2D> points, std::span<const BinaryClass> labels,
                    int max_depth, std::uint64_t seed) {
  if (max_depth < 1) throw ValidationError(fmt::format("tree max depth {} < 1", max_depth));
  if (points.size() != labels.size() || points.empty()) {
    throw ValidationError("tree growth needs aligned, non-empty points and labels");
  }
  TreeModel tree;
  tree.nodes.push_back({});
  std::vector<std::size_t> idx(points.size());
  std::iota(idx.begin(), idx.end(), 0);
  detail::Rng rng(seed);
  grow(tree, 0, points, labels, std::move(idx), max_depth, rng);
  return tree;
}

}  // namespace multimax::zoo
