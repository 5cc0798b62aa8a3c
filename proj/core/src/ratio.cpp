#include "multimax/ratio.hpp"

#include <charconv>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "multimax/errors.hpp"

namespace multimax {

namespace {

__extension__ using i128 = __int128;
__extension__ using u128 = unsigned __int128;

std::uint64_t parse_unsigned(std::string_view text, std::string_view context) {
  std::uint64_t value = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last) {
    throw ValidationError(fmt::format("cannot parse '{}' as a non-negative integer in '{}'",
                                      text, context));
  }
  return value;
}

// Parses "a/b" or a decimal literal "12.345" into (num, den), unsigned.
std::pair<std::uint64_t, std::uint64_t> parse_unsigned_ratio(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return {parse_unsigned(text.substr(0, slash), text), parse_unsigned(text.substr(slash + 1), text)};
  }
  auto dot = text.find('.');
  if (dot == std::string_view::npos) {
    return {parse_unsigned(text, text), 1};
  }
  std::string_view whole = text.substr(0, dot);
  std::string_view frac = text.substr(dot + 1);
  if (frac.empty() || frac.size() > 18) {
    throw ValidationError(fmt::format("cannot parse '{}' as a decimal", text));
  }
  std::uint64_t den = pow10(static_cast<int>(frac.size()));
  std::uint64_t w = whole.empty() ? 0 : parse_unsigned(whole, text);
  std::uint64_t f = parse_unsigned(frac, text);
  return {w * den + f, den};
}

}  // namespace

std::uint64_t pow10(int k) {
  if (k < 0 || k > 18) {
    throw ValidationError(fmt::format("decimal digit count {} outside [0, 18]", k));
  }
  std::uint64_t p = 1;
  for (int i = 0; i < k; ++i) p *= 10;
  return p;
}

ExactRatio::ExactRatio(std::uint64_t num, std::uint64_t den) : num_(num), den_(den) {
  if (den == 0) throw ValidationError(fmt::format("ratio {}/0 has a zero denominator", num));
  if (num > den) throw ValidationError(fmt::format("ratio {}/{} exceeds 1", num, den));
}

ExactRatio ExactRatio::reduced() const {
  const auto g = std::gcd(num_, den_);
  return {num_ / g, den_ / g};
}

double ExactRatio::to_double() const noexcept {
  return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string ExactRatio::str() const { return fmt::format("{}/{}", num_, den_); }

std::string ExactRatio::decimal(int digits) const {
  return fixed_point(round_to_digits(*this, digits), digits);
}

ExactRatio ExactRatio::parse(std::string_view text) {
  auto [n, d] = parse_unsigned_ratio(text);
  return {n, d};
}

bool operator==(const ExactRatio& a, const ExactRatio& b) noexcept {
  return static_cast<u128>(a.num_) * b.den_ == static_cast<u128>(b.num_) * a.den_;
}

std::strong_ordering operator<=>(const ExactRatio& a, const ExactRatio& b) noexcept {
  const u128 lhs = static_cast<u128>(a.num_) * b.den_;
  const u128 rhs = static_cast<u128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::uint64_t round_to_digits(const ExactRatio& value, int digits) {
  const u128 scaled = static_cast<u128>(value.num()) * pow10(digits);
  u128 q = scaled / value.den();
  if (2 * scaled >= static_cast<u128>(value.den()) * (2 * q + 1)) ++q;
  return static_cast<std::uint64_t>(q);
}

std::string fixed_point(std::uint64_t scaled, int digits, bool negative) {
  const std::uint64_t p = pow10(digits);
  const char* sign = negative && scaled != 0 ? "-" : "";
  if (digits == 0) return fmt::format("{}{}", sign, scaled);
  return fmt::format("{}{}.{:0{}}", sign, scaled / p, scaled % p, digits);
}

// SignedRatio

SignedRatio::SignedRatio(std::int64_t num, std::int64_t den) {
  if (den == 0) throw ValidationError(fmt::format("ratio {}/0 has a zero denominator", num));
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const auto g = std::gcd(num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
}

SignedRatio::SignedRatio(const ExactRatio& r)
    : SignedRatio(static_cast<std::int64_t>(r.num()), static_cast<std::int64_t>(r.den())) {}

double SignedRatio::to_double() const noexcept {
  return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string SignedRatio::str() const { return fmt::format("{}/{}", num_, den_); }

std::string SignedRatio::decimal(int digits) const {
  const bool negative = num_ < 0;
  const auto magnitude = static_cast<std::uint64_t>(negative ? -num_ : num_);
  const u128 scaled = static_cast<u128>(magnitude) * pow10(digits);
  const auto den = static_cast<std::uint64_t>(den_);
  u128 q = scaled / den;
  if (2 * scaled >= static_cast<u128>(den) * (2 * q + 1)) ++q;
  return fixed_point(static_cast<std::uint64_t>(q), digits, negative);
}

SignedRatio SignedRatio::parse(std::string_view text) {
  bool negative = !text.empty() && text.front() == '-';
  if (negative) text.remove_prefix(1);
  auto [n, d] = parse_unsigned_ratio(text);
  auto num = static_cast<std::int64_t>(n);
  return {negative ? -num : num, static_cast<std::int64_t>(d)};
}

namespace {

SignedRatio from_wide(i128 num, i128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 a = num < 0 ? -num : num;
  i128 b = den;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  const i128 g = a == 0 ? 1 : a;
  num /= g;
  den /= g;
  constexpr i128 limit = std::numeric_limits<std::int64_t>::max();
  if (num > limit || num < -limit || den > limit) {
    throw ComputationError("rational arithmetic overflow");
  }
  return {static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

}  // namespace

SignedRatio operator+(const SignedRatio& a, const SignedRatio& b) {
  return from_wide(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                   static_cast<i128>(a.den_) * b.den_);
}

SignedRatio operator-(const SignedRatio& a, const SignedRatio& b) { return a + (-b); }

SignedRatio operator-(const SignedRatio& a) { return {-a.num_, a.den_}; }

std::strong_ordering operator<=>(const SignedRatio& a, const SignedRatio& b) noexcept {
  const i128 lhs = static_cast<i128>(a.num_) * b.den_;
  const i128 rhs = static_cast<i128>(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

SignedRatio operator-(const ExactRatio& a, const ExactRatio& b) {
  return SignedRatio(a) - SignedRatio(b);
}

}  // namespace multimax
