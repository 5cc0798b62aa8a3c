#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "multimax/prediction.hpp"

namespace multimax::testing {

inline std::vector<std::string> ids(std::size_t n, const std::string& prefix = "x") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(fmt::format("{}{:04}", prefix, i));
  return out;
}

/// Run spec for catalog construction; `fairness` defaults to `validation`.
struct RunSpec {
  std::string id;
  std::vector<BinaryClass> validation;
  std::optional<std::vector<BinaryClass>> fairness;
};

inline RunCatalog build_catalog(const std::vector<BinaryClass>& labels,
                                const std::vector<RunSpec>& specs,
                                std::optional<std::size_t> fairness_size = std::nullopt) {
  auto vindex = make_index("validation", ids(labels.size(), "v"));
  IndexRef findex = fairness_size ? make_index("fairness", ids(*fairness_size, "f")) : vindex;
  LabelVector lv(vindex, labels);
  std::vector<ModelRun> runs;
  for (const auto& s : specs) {
    PredictionVector v(vindex, s.validation);
    PredictionVector f(findex, s.fairness ? *s.fairness : s.validation);
    runs.push_back(ModelRun::evaluate(s.id, "test", std::move(v), std::move(f), lv));
  }
  return RunCatalog(std::move(lv), std::move(runs));
}

/// Independent RNG for test data; std::mt19937_64 output is specified by the standard.
class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : engine_(seed) {}
  std::size_t between(std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(engine_() % (hi - lo + 1));
  }
  BinaryClass bit() { return static_cast<BinaryClass>(engine_() & 1U); }
  std::vector<BinaryClass> bits(std::size_t n) {
    std::vector<BinaryClass> out(n);
    for (auto& b : out) b = bit();
    return out;
  }
  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// A random band: every run in one catalog, random labels and predictions.
struct RandomBand {
  RunCatalog catalog;
  std::vector<std::string> run_ids;
};

inline RandomBand random_band(TestRng& rng, std::size_t runs, std::size_t instances,
                              bool correlated = false) {
  auto labels = rng.bits(instances);
  std::vector<RunSpec> specs;
  const auto base = rng.bits(instances);
  for (std::size_t r = 0; r < runs; ++r) {
    std::vector<BinaryClass> v = correlated ? base : rng.bits(instances);
    if (correlated) {
      for (auto& b : v) {
        if (rng.between(0, 9) == 0) b ^= 1;
      }
    }
    specs.push_back({fmt::format("r{:03}", r), std::move(v), std::nullopt});
  }
  auto catalog = build_catalog(labels, specs);
  std::vector<std::string> run_ids;
  for (const auto& s : specs) run_ids.push_back(s.id);
  return {std::move(catalog), std::move(run_ids)};
}

}  // namespace multimax::testing
