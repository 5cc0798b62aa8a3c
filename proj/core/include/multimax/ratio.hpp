#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace multimax {

/// A count ratio in [0, 1], kept exactly as `num / den`.
///
/// Representations are not reduced: 98/100 stays 98/100 so that reports echo
/// the underlying counts. Equality and ordering use cross-multiplication,
/// so 2/4 == 1/2.
class ExactRatio {
 public:
  constexpr ExactRatio() = default;
  /// Throws ValidationError unless 0 <= num <= den and den > 0.
  ExactRatio(std::uint64_t num, std::uint64_t den);

  [[nodiscard]] constexpr std::uint64_t num() const noexcept { return num_; }
  [[nodiscard]] constexpr std::uint64_t den() const noexcept { return den_; }

  [[nodiscard]] ExactRatio reduced() const;
  [[nodiscard]] double to_double() const noexcept;

  /// "num/den" exactly as stored.
  [[nodiscard]] std::string str() const;
  /// Decimal rendering rounded half away from zero to `digits` places.
  [[nodiscard]] std::string decimal(int digits = 4) const;

  /// Parses "num/den" or a plain decimal such as "0.93".
  static ExactRatio parse(std::string_view text);

  friend bool operator==(const ExactRatio& a, const ExactRatio& b) noexcept;
  friend std::strong_ordering operator<=>(const ExactRatio& a, const ExactRatio& b) noexcept;

 private:
  std::uint64_t num_ = 0;
  std::uint64_t den_ = 1;
};

/// Signed rational in lowest terms; used for metric deltas and tolerance
/// arithmetic where values leave [0, 1].
class SignedRatio {
 public:
  constexpr SignedRatio() = default;
  SignedRatio(std::int64_t num, std::int64_t den);
  explicit SignedRatio(const ExactRatio& r);

  [[nodiscard]] constexpr std::int64_t num() const noexcept { return num_; }
  [[nodiscard]] constexpr std::int64_t den() const noexcept { return den_; }
  [[nodiscard]] double to_double() const noexcept;
  [[nodiscard]] std::string str() const;
  [[nodiscard]] std::string decimal(int digits = 4) const;

  static SignedRatio parse(std::string_view text);

  friend SignedRatio operator+(const SignedRatio& a, const SignedRatio& b);
  friend SignedRatio operator-(const SignedRatio& a, const SignedRatio& b);
  friend SignedRatio operator-(const SignedRatio& a);
  friend bool operator==(const SignedRatio& a, const SignedRatio& b) noexcept = default;
  friend std::strong_ordering operator<=>(const SignedRatio& a, const SignedRatio& b) noexcept;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Difference a - b of two exact ratios.
SignedRatio operator-(const ExactRatio& a, const ExactRatio& b);

/// Round-half-away-from-zero of `value` to `digits` decimal places, returned
/// as the integer q such that the rounded value is q / 10^digits.
///
/// Computed on the exact ratio: q = floor(num * 10^k / den), bumped by one
/// when 2 * num * 10^k >= den * (2q + 1).
std::uint64_t round_to_digits(const ExactRatio& value, int digits);

/// Renders q / 10^digits as a fixed-point string ("0.93", "1.000").
std::string fixed_point(std::uint64_t scaled, int digits, bool negative = false);

/// 10^k for 0 <= k <= 18.
std::uint64_t pow10(int k);

}  // namespace multimax
