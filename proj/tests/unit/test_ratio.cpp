#include <gtest/gtest.h>

#include <string>

#include "multimax/errors.hpp"
#include "multimax/ratio.hpp"

namespace multimax {
namespace {

// Decimal expansion by schoolbook long division, then round half away from
// zero on the next digit plus remainder.
std::string long_division_round(std::uint64_t num, std::uint64_t den, int digits) {
  std::uint64_t whole = num / den;
  std::uint64_t rem = num % den;
  std::string frac;
  for (int i = 0; i < digits; ++i) {
    rem *= 10;
    frac.push_back(static_cast<char>('0' + rem / den));
    rem %= den;
  }
  // Half-way test: 2 * rem >= den.
  if (2 * rem >= den) {
    int i = digits - 1;
    while (i >= 0 && frac[i] == '9') frac[i--] = '0';
    if (i >= 0) {
      ++frac[i];
    } else {
      ++whole;
    }
  }
  return digits == 0 ? std::to_string(whole) : std::to_string(whole) + "." + frac;
}

TEST(ExactRatio, RejectsInvalidRanges) {
  EXPECT_THROW(ExactRatio(1, 0), ValidationError);
  EXPECT_THROW(ExactRatio(3, 2), ValidationError);
  EXPECT_NO_THROW(ExactRatio(0, 5));
  EXPECT_NO_THROW(ExactRatio(5, 5));
}

TEST(ExactRatio, KeepsStoredRepresentation) {
  ExactRatio r(98, 100);
  EXPECT_EQ(r.str(), "98/100");
  EXPECT_EQ(r.reduced().str(), "49/50");
  EXPECT_EQ(r, ExactRatio(49, 50));
}

TEST(ExactRatio, OrdersByCrossMultiplication) {
  EXPECT_LT(ExactRatio(1, 3), ExactRatio(334, 1000));
  EXPECT_GT(ExactRatio(2, 3), ExactRatio(666, 1000));
  EXPECT_EQ(ExactRatio(0, 7), ExactRatio(0, 9));
  EXPECT_EQ(ExactRatio(std::uint64_t{1} << 62, std::uint64_t{1} << 63), ExactRatio(1, 2));
}

TEST(ExactRatio, ParsesFractionsAndDecimals) {
  EXPECT_EQ(ExactRatio::parse("93/100").str(), "93/100");
  EXPECT_EQ(ExactRatio::parse("0.93"), ExactRatio(93, 100));
  EXPECT_EQ(ExactRatio::parse("1"), ExactRatio(1, 1));
  EXPECT_THROW(ExactRatio::parse("1.5"), ValidationError);
  EXPECT_THROW(ExactRatio::parse("a/b"), ValidationError);
  EXPECT_THROW(ExactRatio::parse("3/0"), ValidationError);
}

TEST(ExactRatio, DecimalMatchesLongDivisionOracle) {
  for (std::uint64_t den = 1; den <= 240; ++den) {
    for (std::uint64_t num = 0; num <= den; ++num) {
      for (int k : {0, 1, 2, 3, 4}) {
        ASSERT_EQ(ExactRatio(num, den).decimal(k), long_division_round(num, den, k))
            << num << "/" << den << " k=" << k;
      }
    }
  }
}

TEST(RoundToDigits, HalfWayRoundsAwayFromZero) {
  EXPECT_EQ(round_to_digits(ExactRatio(1, 8), 2), 13u);    // 0.125
  EXPECT_EQ(round_to_digits(ExactRatio(3, 8), 2), 38u);    // 0.375
  EXPECT_EQ(round_to_digits(ExactRatio(1, 200), 2), 1u);   // 0.005
  EXPECT_EQ(round_to_digits(ExactRatio(999, 1000), 2), 100u);
  EXPECT_EQ(fixed_point(100, 2), "1.00");
  EXPECT_EQ(fixed_point(7, 3), "0.007");
  EXPECT_EQ(fixed_point(7, 3, true), "-0.007");
}

TEST(RoundToDigits, AgreesWithOracleOverDenominator4885) {
  for (std::uint64_t num = 0; num <= 4885; ++num) {
    for (int k : {2, 3}) {
      const auto q = round_to_digits(ExactRatio(num, 4885), k);
      ASSERT_EQ(fixed_point(q, k), long_division_round(num, 4885, k)) << num;
    }
  }
}

TEST(Pow10, CoversSupportedRange) {
  EXPECT_EQ(pow10(0), 1u);
  EXPECT_EQ(pow10(18), 1000000000000000000ULL);
  EXPECT_THROW(pow10(19), ValidationError);
  EXPECT_THROW(pow10(-1), ValidationError);
}

TEST(SignedRatio, ArithmeticIsExactAndReduced) {
  const SignedRatio a(1, 4);
  const SignedRatio b(-1, 6);
  EXPECT_EQ((a + b).str(), "1/12");
  EXPECT_EQ((a - b).str(), "5/12");
  EXPECT_EQ((-a).str(), "-1/4");
  EXPECT_EQ(SignedRatio(2, -4), SignedRatio(-1, 2));
  EXPECT_EQ((ExactRatio(97, 100) - ExactRatio(98, 100)).str(), "-1/100");
  EXPECT_EQ(SignedRatio::parse("-0.005"), SignedRatio(-1, 200));
  EXPECT_EQ(SignedRatio(-1, 200).decimal(3), "-0.005");
  EXPECT_LT(SignedRatio(-1, 2), SignedRatio(1, 3));
}

}  // namespace
}  // namespace multimax
