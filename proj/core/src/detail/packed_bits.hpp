#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "multimax/prediction.hpp"

namespace multimax::detail {

/// Bit-packed prediction vector for fast pairwise comparison.
class PackedBits {
 public:
  explicit PackedBits(std::span<const BinaryClass> values)
      : size_(values.size()), words_((values.size() + 63) / 64, 0) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i]) words_[i / 64] |= std::uint64_t{1} << (i % 64);
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] std::span<const std::uint64_t> words() const noexcept { return words_; }

  [[nodiscard]] std::size_t hamming(const PackedBits& other) const noexcept {
    std::size_t d = 0;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      d += static_cast<std::size_t>(std::popcount(words_[w] ^ other.words_[w]));
    }
    return d;
  }

 private:
  std::size_t size_;
  std::vector<std::uint64_t> words_;
};

}  // namespace multimax::detail
