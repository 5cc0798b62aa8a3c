#include "multimax/zoo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>

#include <fmt/format.h>

#include "detail/packed_bits.hpp"
#include "detail/parallel.hpp"
#include "detail/rng.hpp"
#include "multimax/errors.hpp"
#include "svg.hpp"

namespace multimax::zoo {

namespace {

std::vector<std::string> make_ids(std::size_t n, std::string_view prefix) {
  const auto width = fmt::formatted_size("{}", n > 0 ? n - 1 : 0);
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back(fmt::format("{}{:0{}}", prefix, i, width));
  return ids;
}

Point2D draw_blob(detail::Rng& rng, Point2D mean, double stddev, const Box2D& box) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Point2D p{mean.x1 + stddev * rng.normal(), mean.x2 + stddev * rng.normal()};
    if (box.contains(p)) return p;
  }
  return {std::clamp(mean.x1, box.x1_min, box.x1_max), std::clamp(mean.x2, box.x2_min, box.x2_max)};
}

std::size_t parse_size(std::string_view text, std::string_view what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError(fmt::format("cannot parse {} '{}'", what, text));
  }
  return v;
}

}  // namespace

Dataset2D make_dataset(std::vector<Point2D> points, std::vector<BinaryClass> labels, Box2D box,
                       std::string index_name, std::string id_prefix) {
  if (points.size() != labels.size()) {
    throw ValidationError("data set points and labels differ in length");
  }
  for (const auto& p : points) {
    if (!box.contains(p)) {
      throw ValidationError(fmt::format("point ({}, {}) lies outside the domain box", p.x1, p.x2));
    }
  }
  auto index = make_index(std::move(index_name), make_ids(points.size(), id_prefix));
  return {std::move(points), LabelVector(std::move(index), std::move(labels)), box, 0};
}

Dataset2D generate_dataset(const ClusterSpec& spec, std::size_t n_per_class, std::uint64_t seed,
                           std::string index_name, std::string id_prefix) {
  if (n_per_class == 0) throw ValidationError("n_per_class must be at least 1");
  if (spec.box.width() <= 0 || spec.box.height() <= 0) {
    throw ValidationError("domain box has no area");
  }
  std::size_t border[2] = {0, 0};
  for (const auto& b : spec.borderline) {
    if (b.label > 1) throw ValidationError("borderline point with non-binary label");
    ++border[b.label];
  }
  if (border[0] > n_per_class || border[1] > n_per_class) {
    throw ValidationError("more borderline points than the per-class quota");
  }
  if (spec.shape == ClusterSpec::Shape::gaussian_blobs && spec.stddev <= 0.0 &&
      spec.favourable_mean == spec.unfavourable_mean) {
    throw ValidationError("degenerate cluster spec: zero spread and coincident means");
  }
  if (spec.shape == ClusterSpec::Shape::half_planes &&
      (spec.gap < 0.0 || -spec.gap <= spec.box.x1_min || spec.gap >= spec.box.x1_max)) {
    throw ValidationError("half-plane gap leaves no room for one of the classes");
  }

  detail::Rng rng(seed);
  std::vector<Point2D> points;
  std::vector<BinaryClass> labels;
  for (BinaryClass c : {kFavourable, kUnfavourable}) {
    const std::size_t core = n_per_class - border[c];
    for (std::size_t i = 0; i < core; ++i) {
      Point2D p;
      if (spec.shape == ClusterSpec::Shape::gaussian_blobs) {
        p = draw_blob(rng, c == kFavourable ? spec.favourable_mean : spec.unfavourable_mean,
                      spec.stddev, spec.box);
      } else {
        const double x1 = c == kFavourable ? rng.uniform(spec.box.x1_min, -spec.gap)
                                           : rng.uniform(spec.gap, spec.box.x1_max);
        p = {x1, rng.uniform(spec.box.x2_min, spec.box.x2_max)};
      }
      points.push_back(p);
      labels.push_back(c);
    }
    for (const auto& b : spec.borderline) {
      if (b.label != c) continue;
      points.push_back(b.at);
      labels.push_back(c);
    }
  }
  auto data = make_dataset(std::move(points), std::move(labels), spec.box, std::move(index_name),
                           std::move(id_prefix));
  data.seed = seed;
  return data;
}

// FamilySpec

FamilySpec FamilySpec::parse(std::string_view text) {
  FamilySpec spec;
  auto colon = text.find(':');
  auto head = text.substr(0, colon);
  auto arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  if (head == "linear" && arg.empty()) {
    spec.kind = FamilyKind::linear;
  } else if (head == "poly") {
    spec.kind = FamilyKind::polynomial;
    spec.degree = static_cast<int>(parse_size(arg, "polynomial degree"));
  } else if (head == "knn") {
    spec.kind = FamilyKind::knn;
    spec.k = parse_size(arg, "neighbour count");
  } else if (head == "tree") {
    spec.kind = FamilyKind::tree;
    spec.max_depth = static_cast<int>(parse_size(arg, "tree depth"));
  } else {
    throw ValidationError(fmt::format(
        "unknown family '{}' (expected linear, poly:<d>, knn:<k> or tree:<d>)", text));
  }
  spec.validate();
  return spec;
}

std::string FamilySpec::tag() const {
  switch (kind) {
    case FamilyKind::linear: return "linear";
    case FamilyKind::polynomial: return fmt::format("poly:{}", degree);
    case FamilyKind::knn: return fmt::format("knn:{}", k);
    case FamilyKind::tree: return fmt::format("tree:{}", max_depth);
  }
  return "unknown";
}

void FamilySpec::validate() const {
  if (degree < 1) throw ValidationError(fmt::format("polynomial degree {} < 1", degree));
  if (k < 1) throw ValidationError("k must be at least 1");
  for (auto kk : ks) {
    if (kk < 1) throw ValidationError("k must be at least 1");
  }
  if (max_depth < 1) throw ValidationError(fmt::format("tree depth {} < 1", max_depth));
  if (kind == FamilyKind::linear && (angles == 0 || offsets == 0)) {
    throw ValidationError("linear grid needs at least one angle and one offset");
  }
  if (drop_fraction < 0.0 || drop_fraction >= 1.0) {
    throw ValidationError("drop fraction must lie in [0, 1)");
  }
}

// FamilyEnumerator

FamilyEnumerator::FamilyEnumerator(FamilySpec spec, const Dataset2D& train)
    : spec_(std::move(spec)), train_(&train) {
  spec_.validate();
  const std::size_t n = train.size();
  switch (spec_.kind) {
    case FamilyKind::linear:
      size_ = spec_.angles * spec_.offsets;
      break;
    case FamilyKind::polynomial:
      base_polynomial_ = fit_polynomial(train.points, train.labels.values(), spec_.degree);
      size_ = spec_.samples;
      break;
    case FamilyKind::knn: {
      ks_ = spec_.ks.empty() ? std::vector<std::size_t>{spec_.k} : spec_.ks;
      if (spec_.min_k) {
        std::erase_if(ks_, [&](std::size_t kk) { return kk < *spec_.min_k; });
      }
      switch (spec_.perturbation) {
        case TrainingPerturbation::none: per_k_ = 1; break;
        case TrainingPerturbation::leave_one_out:
        case TrainingPerturbation::flip_one_label: per_k_ = n; break;
        case TrainingPerturbation::random_subsets: per_k_ = spec_.samples; break;
      }
      size_ = ks_.size() * per_k_;
      break;
    }
    case FamilyKind::tree:
      size_ = spec_.max_depth_limit && spec_.max_depth > *spec_.max_depth_limit ? 0 : spec_.samples;
      break;
  }
}

std::string FamilyEnumerator::candidate_id(std::size_t i) const {
  return fmt::format("{}/{:06}", spec_.tag(), i);
}

Classifier2D FamilyEnumerator::build(std::size_t i) const {
  if (i >= size_) throw ValidationError(fmt::format("candidate {} outside enumeration", i));
  const auto& train = *train_;
  switch (spec_.kind) {
    case FamilyKind::linear: {
      const std::size_t a = i / spec_.offsets;
      const std::size_t o = i % spec_.offsets;
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(a) /
                           static_cast<double>(spec_.angles);
      const double offset =
          spec_.offsets == 1 ? 0.0
                             : -spec_.offset_span + 2.0 * spec_.offset_span * static_cast<double>(o) /
                                                        static_cast<double>(spec_.offsets - 1);
      auto snap = [](double w) { return std::abs(w) < 1e-12 ? 0.0 : w; };
      return LinearModel{snap(std::cos(angle)), snap(std::sin(angle)), -offset};
    }
    case FamilyKind::polynomial: {
      PolynomialModel model = *base_polynomial_;
      if (i == 0) return model;
      double scale = 0.0;
      for (double c : model.coefficients) scale = std::max(scale, std::abs(c));
      detail::Rng rng(detail::mix_seed(spec_.seed, i));
      for (double& c : model.coefficients) c += spec_.sigma * scale * rng.normal();
      return model;
    }
    case FamilyKind::knn: {
      const std::size_t kk = ks_[i / per_k_];
      const std::size_t j = i % per_k_;
      KnnModel model;
      model.k = kk;
      const auto labels = train.labels.values();
      for (std::size_t t = 0; t < train.size(); ++t) {
        model.points.push_back(train.points[t]);
        model.labels.push_back(labels[t]);
      }
      switch (spec_.perturbation) {
        case TrainingPerturbation::none: break;
        case TrainingPerturbation::leave_one_out:
          model.points.erase(model.points.begin() + static_cast<std::ptrdiff_t>(j));
          model.labels.erase(model.labels.begin() + static_cast<std::ptrdiff_t>(j));
          break;
        case TrainingPerturbation::flip_one_label:
          model.labels[j] ^= 1;
          break;
        case TrainingPerturbation::random_subsets: {
          detail::Rng rng(detail::mix_seed(spec_.seed, i));
          KnnModel kept;
          kept.k = kk;
          for (std::size_t t = 0; t < model.points.size(); ++t) {
            if (rng.uniform01() >= spec_.drop_fraction) {
              kept.points.push_back(model.points[t]);
              kept.labels.push_back(model.labels[t]);
            }
          }
          if (!kept.points.empty()) model = std::move(kept);
          break;
        }
      }
      return model;
    }
    case FamilyKind::tree:
      return grow_tree(train.points, train.labels.values(), spec_.max_depth,
                       detail::mix_seed(spec_.seed, i));
  }
  throw ValidationError("unknown family kind");
}

// Runs

PredictionVector predict_all(const Classifier2D& model, const Dataset2D& data) {
  std::vector<BinaryClass> out;
  out.reserve(data.size());
  for (const auto& p : data.points) out.push_back(predict(model, p));
  return {data.index(), std::move(out)};
}

ZooRun make_zoo_run(std::string run_id, std::string family_tag, Classifier2D model,
                    const Dataset2D& validation, const Dataset2D* fairness) {
  auto validation_preds = predict_all(model, validation);
  auto fairness_preds = predict_all(model, fairness != nullptr ? *fairness : validation);
  const double cx = complexity(model);
  auto run = ModelRun::evaluate(std::move(run_id), std::move(family_tag),
                                std::move(validation_preds), std::move(fairness_preds),
                                validation.labels, cx);
  return {std::move(run), std::move(model)};
}

std::vector<ZooRun> enumerate_family(const FamilySpec& family, const Dataset2D& train,
                                     const Dataset2D& validation, const Dataset2D* fairness,
                                     unsigned threads) {
  FamilyEnumerator enumerator(family, train);
  if (enumerator.size() == 0) {
    throw ValidationError(fmt::format("family '{}' enumerates no candidates", family.tag()));
  }
  std::vector<std::optional<ZooRun>> slots(enumerator.size());
  detail::parallel_for(enumerator.size(), threads, [&](std::size_t i) {
    slots[i] = make_zoo_run(enumerator.candidate_id(i), family.tag(), enumerator.build(i),
                            validation, fairness);
  });
  std::vector<ZooRun> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

Point2D cell_centre(const Box2D& box, std::size_t resolution, std::size_t row, std::size_t col) {
  const double r = static_cast<double>(resolution);
  return {box.x1_min + (static_cast<double>(col) + 0.5) * box.width() / r,
          box.x2_min + (static_cast<double>(row) + 0.5) * box.height() / r};
}

std::vector<ZooRun> deduplicate_on_grid(std::vector<ZooRun> runs, const Box2D& box,
                                        std::size_t resolution) {
  if (resolution < 1) throw ValidationError("deduplication grid needs resolution >= 1");
  std::map<std::vector<std::uint64_t>, bool> seen;
  std::vector<ZooRun> out;
  for (auto& zr : runs) {
    std::vector<BinaryClass> grid;
    grid.reserve(resolution * resolution);
    for (std::size_t r = 0; r < resolution; ++r) {
      for (std::size_t c = 0; c < resolution; ++c) {
        grid.push_back(predict(zr.model, cell_centre(box, resolution, r, c)));
      }
    }
    detail::PackedBits bits(grid);
    std::vector<std::uint64_t> key(bits.words().begin(), bits.words().end());
    if (seen.emplace(std::move(key), true).second) out.push_back(std::move(zr));
  }
  return out;
}

RunCatalog make_catalog(std::span<const ZooRun> runs, const Dataset2D& validation) {
  std::vector<ModelRun> copies;
  copies.reserve(runs.size());
  for (const auto& zr : runs) copies.push_back(zr.run);
  return {validation.labels, std::move(copies)};
}

RegionEstimate estimate_disputable_region(const PerformanceBand& band, std::span<const ZooRun> runs,
                                          const Box2D& box, std::size_t resolution,
                                          unsigned threads) {
  if (resolution < 2) throw ValidationError("region resolution must be at least 2");
  std::map<std::string_view, const Classifier2D*> by_id;
  for (const auto& zr : runs) by_id.emplace(zr.run.id(), &zr.model);
  std::vector<const Classifier2D*> members;
  for (const auto& id : band.run_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw ValidationError(fmt::format(
          "band member '{}' has no decision function (ingested-only run)", id));
    }
    members.push_back(it->second);
  }
  RegionEstimate out;
  out.band_label = band.label;
  out.resolution = resolution;
  out.mask.assign(resolution * resolution, 0);
  detail::parallel_for(resolution, threads, [&](std::size_t row) {
    for (std::size_t col = 0; col < resolution; ++col) {
      const auto p = cell_centre(box, resolution, row, col);
      const BinaryClass first = predict(*members.front(), p);
      for (std::size_t m = 1; m < members.size(); ++m) {
        if (predict(*members[m], p) != first) {
          out.mask[row * resolution + col] = 1;
          break;
        }
      }
    }
  });
  const auto marked = static_cast<std::uint64_t>(std::count(out.mask.begin(), out.mask.end(), 1));
  out.disputable_fraction = ExactRatio(marked, resolution * resolution);
  return out;
}

std::string region_pgm(const RegionEstimate& region) {
  std::string out = fmt::format("P5\n{} {}\n255\n", region.resolution, region.resolution);
  for (std::size_t r = region.resolution; r-- > 0;) {
    for (std::size_t c = 0; c < region.resolution; ++c) {
      out.push_back(region.at(r, c) ? '\0' : static_cast<char>(255));
    }
  }
  return out;
}

std::string region_svg(const RegionEstimate& region, double cell_px) {
  const auto res = static_cast<double>(region.resolution);
  detail::SvgWriter svg(res * cell_px, res * cell_px);
  svg.title(fmt::format("Disputable region of band {}", region.band_label));
  for (std::size_t r = 0; r < region.resolution; ++r) {
    // Top row of the image is the largest x2.
    const double y = static_cast<double>(region.resolution - 1 - r) * cell_px;
    std::size_t c = 0;
    while (c < region.resolution) {
      if (!region.at(r, c)) {
        ++c;
        continue;
      }
      std::size_t end = c;
      while (end < region.resolution && region.at(r, end)) ++end;
      svg.rect(static_cast<double>(c) * cell_px, y, static_cast<double>(end - c) * cell_px, cell_px,
               "#000000");
      c = end;
    }
  }
  return svg.finish("sans-serif");
}

FlipOutcome flip_search(const FamilySpec& family, const Dataset2D& train,
                        const Dataset2D& validation, const Dataset2D& fairness,
                        const PerformanceBand& band, std::span<const ZooRun> band_members,
                        const FlipRequest& request) {
  if (request.budget == 0) throw ValidationError("flip search budget must be at least 1");
  const auto pos = fairness.index()->position(request.target_instance);
  if (!pos) {
    throw ValidationError(fmt::format("family cannot evaluate target '{}': not in the fairness set",
                                      request.target_instance));
  }
  const Point2D target = fairness.points[*pos];

  FlipOutcome outcome;
  std::vector<const ZooRun*> members;
  for (const auto& zr : band_members) {
    if (band.contains(zr.run.id())) members.push_back(&zr);
  }
  std::sort(members.begin(), members.end(),
            [](auto* a, auto* b) { return a->run.id() < b->run.id(); });
  for (const auto* zr : members) {
    if (zr->run.fairness()[*pos] == request.target_class) {
      outcome.found = *zr;
      outcome.from_band = true;
      return outcome;
    }
  }

  FamilyEnumerator enumerator(family, train);
  const std::size_t limit = std::min(request.budget, enumerator.size());
  for (std::size_t i = 0; i < limit; ++i) {
    ++outcome.candidates_examined;
    auto model = enumerator.build(i);
    if (predict(model, target) != request.target_class) continue;
    auto candidate = make_zoo_run("flip/" + enumerator.candidate_id(i), family.tag(),
                                  std::move(model), validation, &fairness);
    if (!band.admits(candidate.run.confusion())) continue;
    // Re-verify from scratch rather than trusting the cached fields.
    const auto recomputed = confusion_matrix(predict_all(candidate.model, validation),
                                             validation.labels);
    if (!band.admits(recomputed) ||
        predict(candidate.model, target) != request.target_class ||
        candidate.run.fairness()[*pos] != request.target_class) {
      throw ComputationError(fmt::format("flip candidate '{}' failed re-verification",
                                         candidate.run.id()));
    }
    outcome.found = std::move(candidate);
    return outcome;
  }
  return outcome;
}

}  // namespace multimax::zoo
