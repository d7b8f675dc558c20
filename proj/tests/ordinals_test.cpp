#include "spectra/ordinals.hpp"

#include <gtest/gtest.h>

#include <random>

namespace spectra {
namespace {

Ordinal O(const char* s) { return parse_ordinal(s); }

Ordinal random_ordinal(std::mt19937_64& rng, int depth = 2) {
  std::uniform_int_distribution<int> nterms(0, 3);
  std::uniform_int_distribution<std::uint64_t> coef(1, 4);
  std::vector<Ordinal> exps;
  int n = nterms(rng);
  for (int i = 0; i < n; ++i)
    exps.push_back(depth > 0 ? random_ordinal(rng, depth - 1) : Ordinal::finite(coef(rng) - 1));
  std::sort(exps.begin(), exps.end(), [](const auto& a, const auto& b) { return a > b; });
  exps.erase(std::unique(exps.begin(), exps.end()), exps.end());
  std::vector<Ordinal::Term> terms;
  for (auto& e : exps) terms.push_back({e, coef(rng)});
  return Ordinal::from_terms(std::move(terms));
}

TEST(Ordinals, CompareExamples) {
  EXPECT_GT(O("w^2"), O("w*3"));
  EXPECT_EQ(O("0"), O("0"));
  EXPECT_LT(O("w+1"), O("w*2"));
  EXPECT_LT(O("w^w"), O("w^(w+1)"));
}

TEST(Ordinals, Addition) {
  EXPECT_EQ(O("1") + O("w"), O("w"));
  EXPECT_EQ(O("w*2") + O("w*3"), O("w*5"));
  EXPECT_EQ(O("w^2 + w + 3") + O("w*2 + 1"), O("w^2 + w*3 + 1"));
  EXPECT_EQ(O("w + 5") + O("w^2"), O("w^2"));
}

TEST(Ordinals, OmegaTimesAndPower) {
  EXPECT_EQ(omega_times(O("3")), O("w*3"));
  EXPECT_EQ(omega_times(O("w + 1")), O("w^2 + w"));
  EXPECT_EQ(omega_times(O("w^w")), O("w^w"));
  EXPECT_EQ(omega_pow(O("2")), O("w^2"));
  EXPECT_EQ(omega_times(O("0")), O("0"));
}

TEST(Ordinals, DoubleAndHalf) {
  EXPECT_EQ(twice(O("w+3")), O("w+6"));
  EXPECT_EQ(twice(O("0")), O("0"));
  EXPECT_EQ(half_floor(O("w+5")), (HalfFloor{O("w+2"), true}));
  EXPECT_EQ(half_floor(O("w^2")), (HalfFloor{O("w^2"), false}));
}

TEST(Ordinals, FundamentalSequences) {
  EXPECT_EQ(fund_seq(O("w"), 3), O("7"));
  EXPECT_EQ(fund_seq(O("5"), 0), O("4"));
  EXPECT_EQ(fund_seq(O("5"), 99), O("4"));
  EXPECT_EQ(fund_seq(O("w^2"), 2), O("w*2+1"));
  EXPECT_THROW(fund_seq(O("0"), 1), std::domain_error);
}

TEST(Ordinals, FundamentalSequenceIsOddIncreasingCofinal) {
  for (const char* lim : {"w", "w*2", "w^2", "w^2 + w", "w^3", "w^w", "w^(w+1)*2", "w^(w^2)"}) {
    Ordinal a = O(lim);
    ASSERT_TRUE(a.is_limit());
    for (std::uint64_t s = 0; s <= 100; ++s) {
      Ordinal cur = fund_seq(a, s);
      EXPECT_TRUE(is_odd(cur)) << lim << " s=" << s;
      EXPECT_LT(cur, a);
      EXPECT_LT(cur, fund_seq(a, s + 1)) << lim << " s=" << s;
    }
  }
  // Cofinality by brute enumeration: every ordinal below w*2 + w is passed.
  Ordinal a = O("w*3");
  for (std::uint64_t k = 0; k < 40; ++k) {
    Ordinal target = O("w*2") + k;
    bool passed = false;
    for (std::uint64_t s = 0; s < 100 && !passed; ++s) passed = fund_seq(a, s) > target;
    EXPECT_TRUE(passed) << target.to_string();
  }
}

TEST(Ordinals, ParsePrintRoundTrip) {
  for (const char* s : {"0", "7", "w", "w*3", "w^2*3 + w + 4", "w^w + 1", "w^(w+1)*2 + w^3", "w^(w^2)"}) {
    Ordinal a = O(s);
    EXPECT_EQ(parse_ordinal(a.to_string()), a) << s;
  }
  EXPECT_EQ(O("w^2*3 + w + 4").to_string(), "w^2*3 + w + 4");
  EXPECT_THROW(O("w^"), OrdinalParseError);
  EXPECT_THROW(O("3 x"), OrdinalParseError);
}

TEST(Ordinals, RejectsNonCanonicalTerms) {
  EXPECT_THROW(Ordinal::from_terms({{Ordinal::finite(1), 1}, {Ordinal::finite(2), 1}}), std::invalid_argument);
  EXPECT_THROW(Ordinal::from_terms({{Ordinal::finite(1), 0}}), std::invalid_argument);
}

TEST(Ordinals, RandomAlgebraicProperties) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    Ordinal a = random_ordinal(rng), b = random_ordinal(rng), c = random_ordinal(rng);
    EXPECT_EQ(a + Ordinal{}, a);
    EXPECT_EQ(Ordinal{} + a, a);
    EXPECT_EQ((a + b) + c, a + (b + c));
    // total order: exactly one relation holds, and it is consistent under swap
    auto ab = a <=> b;
    auto ba = b <=> a;
    EXPECT_EQ(ab == 0, ba == 0);
    EXPECT_EQ(ab < 0, ba > 0);
    if (!b.is_zero()) {
      EXPECT_GT(a + b, a);
    }
    EXPECT_GE(a + b, b);
    EXPECT_EQ(half_floor(twice(a)), (HalfFloor{a, false}));
    EXPECT_EQ(parse_ordinal(a.to_string()), a);
  }
}

TEST(Ordinals, NestingBound) {
  Ordinal a = Ordinal::finite(1);
  EXPECT_THROW(
      {
        for (int i = 0; i < 40; ++i) a = omega_pow(a);
      },
      std::overflow_error);
}

}  // namespace
}  // namespace spectra
