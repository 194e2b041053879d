#include <doctest.h>

#include <cmath>
#include <random>

#include "nnverify/fxp.hpp"
#include "oracle.hpp"

using namespace nnverify;

TEST_CASE("format validation and parsing") {
  CHECK_THROWS_AS(FxpFormat(0, 4), Error);
  CHECK_THROWS_AS(FxpFormat(4, -1), Error);
  CHECK_THROWS_AS(FxpFormat(40, 30), Error);
  CHECK_NOTHROW(FxpFormat(32, 32));
  CHECK_NOTHROW(FxpFormat(1, 63));

  CHECK(FxpFormat::parse("<32,32>") == FxpFormat(32, 32));
  CHECK(FxpFormat::parse(" < 4 , 6 > ") == FxpFormat(4, 6));
  CHECK(FxpFormat::parse("8,8") == FxpFormat(8, 8));
  CHECK_THROWS_AS(FxpFormat::parse("<4;6>"), Error);
  CHECK_THROWS_AS(FxpFormat::parse("<4,6"), Error);
  CHECK_THROWS_AS(FxpFormat::parse("<a,6>"), Error);
  CHECK(FxpFormat(4, 6).to_string() == "<4,6>");
}

TEST_CASE("format range and resolution") {
  const FxpFormat f(4, 6);
  CHECK(f.resolution() == 0.015625);
  CHECK(f.raw_min() == -512);
  CHECK(f.raw_max() == 511);
  CHECK(f.min_real() == -8.0L);
  CHECK(f.max_real() == 7.984375L);
  const FxpFormat w(32, 32);
  CHECK(w.raw_min() == std::numeric_limits<std::int64_t>::min());
  CHECK(w.raw_max() == std::numeric_limits<std::int64_t>::max());
}

TEST_CASE("from_real") {
  const FxpFormat f(4, 6);
  CHECK(from_real(0.749, f).raw() == 48);
  CHECK(from_real(0.749, f).to_double() == 0.75);
  CHECK(from_real(0.0, f).raw() == 0);
  CHECK(from_real(100.0, f).to_double() == 7.984375);
  CHECK(from_real(-100.0, f).to_double() == -8.0);
  CHECK(from_real(0.749, f, Rounding::toward_zero).raw() == 47);
  CHECK(from_real(-0.749, f, Rounding::toward_zero).raw() == -47);
  // Ties go to even.
  CHECK(from_real(0.5 / 64, f).raw() == 0);
  CHECK(from_real(1.5 / 64, f).raw() == 2);
  CHECK(from_real(-1.5 / 64, f).raw() == -2);
  CHECK_THROWS_AS(from_real(std::nan(""), f), Error);
  CHECK_THROWS_AS(from_real(INFINITY, f), Error);
}

TEST_CASE("to_real") {
  const FxpFormat f(4, 6);
  CHECK(to_real(FxpValue::from_raw(48, f)) == 0.75);
  CHECK(to_real(FxpValue::from_raw(-1, f)) == -0.015625);
  CHECK_THROWS_AS(FxpValue::from_raw(512, f), Error);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-7.9, 7.9);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    CHECK(std::fabs(to_real(from_real(x, f)) - x) <= std::ldexp(1.0, -7));
  }
}

TEST_CASE("add, sub, mul, div examples") {
  const FxpFormat f(4, 6);
  const auto v = [&](double x) { return from_real(x, f); };
  CHECK(fxp_add(v(0.75), v(0)) == v(0.75));
  const FxpFormat g(2, 2);
  CHECK(to_real(fxp_add(from_real(1.75, g), from_real(1.75, g))) == 1.75);
  CHECK(fxp_sub(v(3.25), v(3.25)).raw() == 0);
  CHECK(fxp_mul(v(1.0), v(-2.484375)) == v(-2.484375));
  // 0.5 * 2^-6 is exactly half a step: ties to even gives 0.
  CHECK(fxp_mul(v(0.5), v(0.015625)).raw() == 0);
  CHECK(fxp_mul(v(1.5), v(0.015625)).raw() == 2);
  CHECK(to_real(fxp_div(v(3.0), v(2.0))) == 1.5);
  CHECK(fxp_div(v(-1.25), v(1.0)) == v(-1.25));
  CHECK_THROWS_AS(fxp_div(v(1.0), v(0.0)), Error);
  try {
    fxp_div(v(1.0), v(0.0));
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::division_by_zero);
  }
  CHECK_THROWS_AS(fxp_add(v(1.0), from_real(1.0, g)), Error);
  CHECK_THROWS_AS(fxp_mul(v(1.0), from_real(1.0, g)), Error);
}

TEST_CASE("operators agree with the exact rational oracle") {
  std::mt19937_64 rng(11);
  const FxpFormat formats[] = {{2, 2}, {4, 6}, {8, 8}, {16, 16}, {32, 32}, {1, 63}, {64, 0}};
  for (const auto &f : formats) {
    const FxpArith ar(f);
    for (int i = 0; i < 2000; ++i) {
      const auto a = oracle::random_raw(rng, f);
      const auto b = oracle::random_raw(rng, f);
      REQUIRE(ar.add(a, b) == oracle::add(a, b, f));
      REQUIRE(ar.sub(a, b) == oracle::sub(a, b, f));
      REQUIRE(ar.mul(a, b) == oracle::mul(a, b, f));
      if (b != 0)
        REQUIRE(ar.div(a, b) == oracle::div(a, b, f));
    }
  }
}

TEST_CASE("saturation matches clamp of the exact sum") {
  const FxpFormat f(3, 2);
  for (std::int64_t a = f.raw_min(); a <= f.raw_max(); ++a)
    for (std::int64_t b = f.raw_min(); b <= f.raw_max(); ++b) {
      const auto s = std::clamp<std::int64_t>(a + b, f.raw_min(), f.raw_max());
      REQUIRE(fxp_add(FxpValue::from_raw(a, f), FxpValue::from_raw(b, f)).raw() == s);
    }
}

TEST_CASE("rounding mode names") {
  CHECK(parse_rounding("nearest") == Rounding::nearest_even);
  CHECK(parse_rounding("truncate") == Rounding::toward_zero);
  CHECK_THROWS_AS(parse_rounding("up"), Error);
}
