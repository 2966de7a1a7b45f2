/*
 * Copyright 2026 The fpmimo Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fpmimo/fp_emu.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace fpmimo {
namespace {

// Brute-force oracle: the representable neighbours of x in a format with t
// significand bits are consecutive multiples of 2^(e-t+1) where 2^e <= |x|.
// Pick the nearer one, ties to the even multiple.
double oracle_nearest(double x, int t) {
  if (x == 0.0) return x;
  const int e = std::ilogb(x);
  const double q = std::ldexp(1.0, e - t + 1);
  const double k = std::floor(std::fabs(x) / q);
  const double lo = k * q, hi = (k + 1) * q;
  const double dlo = std::fabs(x) - lo, dhi = hi - std::fabs(x);
  double r;
  if (dlo < dhi) r = lo;
  else if (dhi < dlo) r = hi;
  else r = (std::fmod(k, 2.0) == 0.0) ? lo : hi;
  return std::copysign(r, x);
}

TEST(FloatFormat, PresetParameters) {
  EXPECT_EQ(FloatFormat::fp16().significand_bits(), 11);
  EXPECT_EQ(FloatFormat::bfloat16().significand_bits(), 8);
  EXPECT_EQ(FloatFormat::fp32().significand_bits(), 24);
  EXPECT_DOUBLE_EQ(FloatFormat::fp16().unit_roundoff(), std::ldexp(1.0, -11));
  EXPECT_DOUBLE_EQ(FloatFormat::fp64().unit_roundoff(), std::ldexp(1.0, -53));
  EXPECT_DOUBLE_EQ(FloatFormat::fp16().max_finite(), 65504.0);
  EXPECT_DOUBLE_EQ(FloatFormat::fp16().min_normal(), std::ldexp(1.0, -14));
  EXPECT_DOUBLE_EQ(FloatFormat::fp32().max_finite(), static_cast<double>(std::numeric_limits<float>::max()));
}

TEST(FloatFormat, FromName) {
  EXPECT_EQ(FloatFormat::from_name("fp16"), FloatFormat::fp16());
  EXPECT_EQ(FloatFormat::from_name("bfloat16"), FloatFormat::bfloat16());
  const auto c = FloatFormat::from_name("custom(6,-10,10)");
  EXPECT_EQ(c.significand_bits(), 6);
  EXPECT_EQ(c.exponent_min(), -10);
  EXPECT_EQ(c.exponent_max(), 10);
  EXPECT_THROW(FloatFormat::from_name("fp8"), std::invalid_argument);
  EXPECT_THROW(FloatFormat::from_name("custom(6,-10)"), std::invalid_argument);
  EXPECT_THROW(FloatFormat(1, -10, 10), std::invalid_argument);
  EXPECT_THROW(FloatFormat(54, -10, 10), std::invalid_argument);
  EXPECT_THROW(FloatFormat(10, 5, 5), std::invalid_argument);
}

TEST(RoundNearest, HalfwayCasesTieToEven) {
  const auto h = FloatFormat::fp16();
  EXPECT_EQ(round_to_format(1.0 + std::ldexp(1.0, -11), h), 1.0);
  EXPECT_EQ(round_to_format(1.0 + 3 * std::ldexp(1.0, -11), h), 1.0 + std::ldexp(1.0, -9));
  EXPECT_EQ(round_to_format(-1.0 - std::ldexp(1.0, -11), h), -1.0);
  // just above the tie goes up
  EXPECT_EQ(round_to_format(std::nextafter(1.0 + std::ldexp(1.0, -11), 2.0), h),
            1.0 + std::ldexp(1.0, -10));
  // carry into the exponent
  EXPECT_EQ(round_to_format(2.0 - std::ldexp(1.0, -12), h), 2.0);
}

TEST(RoundNearest, MatchesNeighbourEnumerationFp16AndBfloat16) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-12, 14);
  for (int t : {11, 8, 5}) {
    const FloatFormat fmt(t, -126, 127);
    for (int i = 0; i < 200000; ++i) {
      const double x = std::ldexp(mant(gen), expo(gen));
      ASSERT_EQ(round_to_format(x, fmt), oracle_nearest(x, t)) << "x=" << x << " t=" << t;
    }
  }
}

TEST(RoundNearest, ExhaustiveOverFp16GridMidpoints) {
  // every fp16 value in [1, 2) and the midpoints between consecutive ones
  const auto h = FloatFormat::fp16();
  const double q = std::ldexp(1.0, -10);
  for (int k = 0; k < 1024; ++k) {
    const double v = 1.0 + k * q;
    ASSERT_EQ(round_to_format(v, h), v);
    const double mid = v + q / 2;
    const double expect = (k % 2 == 0) ? v : v + q;
    ASSERT_EQ(round_to_format(mid, h), expect);
  }
}

TEST(RoundNearest, Fp32MatchesHardwareCast) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-100, 100);
  const auto f = FloatFormat::fp32();
  for (int i = 0; i < 200000; ++i) {
    const double x = std::ldexp(mant(gen), expo(gen));
    ASSERT_EQ(round_to_format(x, f), static_cast<double>(static_cast<float>(x))) << x;
  }
}

TEST(RoundNearest, CarrierSubnormalsMatchOracle) {
  const FloatFormat fmt(11, -14, 15);
  for (double x : {std::ldexp(1.2345, -1060), std::ldexp(-1.75, -1040), std::ldexp(1.0009765625, -1030)}) {
    const int e = std::ilogb(x);
    const double q = std::ldexp(1.0, e - 10);
    const double expect = std::nearbyint(x / q) * q;
    EXPECT_EQ(round_to_format(x, fmt), expect);
  }
}

TEST(RoundNearest, Fp64IsBitIdenticalPassthrough) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  Arithmetic ar(FloatFormat::fp64());
  EXPECT_TRUE(ar.is_passthrough());
  for (int i = 0; i < 10000; ++i) {
    const double a = nd(gen), b = nd(gen);
    ASSERT_EQ(std::bit_cast<std::uint64_t>(ar.mul(a, b)), std::bit_cast<std::uint64_t>(a * b));
    ASSERT_EQ(std::bit_cast<std::uint64_t>(ar.add(a, b)), std::bit_cast<std::uint64_t>(a + b));
    ASSERT_EQ(round_to_format(a, FloatFormat::fp64()), a);
  }
}

TEST(RoundProperties, IdempotentAndMonotone) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd(0.0, 100.0);
  std::vector<double> xs(50000);
  for (auto& x : xs) x = nd(gen);
  std::sort(xs.begin(), xs.end());
  for (const auto& fmt : {FloatFormat::fp16(), FloatFormat::bfloat16(), FloatFormat::fp32()}) {
    double prev = -INFINITY;
    for (double x : xs) {
      const double r = round_to_format(x, fmt);
      ASSERT_EQ(round_to_format(r, fmt), r);
      ASSERT_GE(r, prev);
      ASSERT_LE(std::fabs(r - x), fmt.unit_roundoff() * std::fabs(x));
      prev = r;
    }
  }
}

TEST(RoundStochastic, RepresentableValuesAreFixed) {
  Arithmetic ar(FloatFormat::fp16(), RoundingMode::stochastic(9));
  for (int k = 0; k < 1024; ++k) {
    const double v = 1.0 + k * std::ldexp(1.0, -10);
    ASSERT_EQ(ar.round(v), v);
    ASSERT_EQ(ar.round(-v * 8), -v * 8);
  }
}

TEST(RoundStochastic, ZeroMeanAndCorrectProbability) {
  const double q = std::ldexp(1.0, -10);
  const double x = 1.0 + 0.3 * q;
  Arithmetic ar(FloatFormat::fp16(), RoundingMode::stochastic(123));
  const int n = 200000;
  int ups = 0;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = ar.round(x);
    ASSERT_TRUE(r == 1.0 || r == 1.0 + q);
    ups += (r != 1.0);
    sum += r - x;
  }
  const double p = static_cast<double>(ups) / n;
  EXPECT_NEAR(p, 0.3, 4 * std::sqrt(0.3 * 0.7 / n));
  EXPECT_NEAR(sum / n, 0.0, 4 * q * std::sqrt(0.3 * 0.7 / n));
}

TEST(RoundStochastic, DeterministicPerSeedAndStream) {
  auto run = [](std::uint64_t seed, std::uint64_t stream) {
    Arithmetic ar(FloatFormat::fp16(), RoundingMode::stochastic(seed), RangeMode::kUnbounded, stream);
    std::vector<double> out;
    for (int i = 0; i < 64; ++i) out.push_back(ar.round(1.0 + 0.5 * std::ldexp(1.0, -10) + i));
    return out;
  };
  EXPECT_EQ(run(1, 2), run(1, 2));
  EXPECT_NE(run(1, 2), run(1, 3));
  EXPECT_NE(run(1, 2), run(4, 2));
  const auto mode = RoundingMode::stochastic(77);
  const double x = 1.0 + 0.5 * std::ldexp(1.0, -10);
  EXPECT_EQ(round_to_format(x, FloatFormat::fp16(), mode), round_to_format(x, FloatFormat::fp16(), mode));
}

TEST(RangeMode, StrictClampsAndFlushes) {
  const auto h = FloatFormat::fp16();
  EXPECT_EQ(round_to_format(1e6, h, RoundingMode::nearest_even(), RangeMode::kStrictIEEE), 65504.0);
  EXPECT_EQ(round_to_format(-1e6, h, RoundingMode::nearest_even(), RangeMode::kStrictIEEE), -65504.0);
  EXPECT_EQ(round_to_format(1e-6, h, RoundingMode::nearest_even(), RangeMode::kStrictIEEE), 0.0);
  EXPECT_EQ(round_to_format(1e6, h), 999936.0);  // unbounded keeps 11 bits only
  EXPECT_EQ(round_to_format(1e-6, h), oracle_nearest(1e-6, 11));
}

TEST(Arithmetic, ErrorsOnInvalidInput) {
  Arithmetic ar(FloatFormat::fp16());
  EXPECT_THROW(ar.round(NAN), std::domain_error);
  EXPECT_THROW(ar.round(INFINITY), std::domain_error);
  EXPECT_THROW(ar.div(1.0, 0.0), std::domain_error);
  EXPECT_THROW(ar.sqrt(-1.0), std::domain_error);
  EXPECT_THROW(fl_op(1.0, 0.0, Op::kDiv, FloatFormat::fp16()), std::domain_error);
  EXPECT_THROW(round_to_format(NAN, FloatFormat::fp64()), std::domain_error);
}

TEST(Arithmetic, FlOpRoundsExactResult) {
  const auto h = FloatFormat::fp16();
  const double a = 1.0 + std::ldexp(1.0, -10), b = 1.0 + std::ldexp(1.0, -10);
  EXPECT_EQ(fl_op(a, b, Op::kMul, h), round_to_format(a * b, h));
  EXPECT_EQ(fl_op(a, b, Op::kAdd, h), 2.0 + std::ldexp(1.0, -9));
  EXPECT_EQ(fl_op(1.0, std::ldexp(1.0, -11), Op::kAdd, h), 1.0);
  EXPECT_EQ(fl_op(1.0, 3.0, Op::kDiv, h), oracle_nearest(1.0 / 3.0, 11));
  EXPECT_EQ(fl_op(a, b, Op::kSub, h), 0.0);
}

TEST(Arithmetic, ComplexProductWithinStandardBound) {
  std::mt19937_64 gen(21);
  std::normal_distribution<double> nd;
  for (const auto& fmt : {FloatFormat::fp16(), FloatFormat::bfloat16(), FloatFormat::fp32()}) {
    const double u = fmt.unit_roundoff();
    const double gamma2 = 2 * u / (1 - 2 * u);
    for (int i = 0; i < 100000; ++i) {
      const Complex a(round_to_format(nd(gen), fmt), round_to_format(nd(gen), fmt));
      const Complex b(round_to_format(nd(gen), fmt), round_to_format(nd(gen), fmt));
      const Complex got = fl_cmul(a, b, fmt);
      ASSERT_LE(std::abs(got - a * b), std::sqrt(2.0) * gamma2 * std::abs(a) * std::abs(b) * (1 + 1e-12));
    }
  }
}

TEST(Arithmetic, ComplexAddAndDivide) {
  const auto h = FloatFormat::fp16();
  Arithmetic ar(h);
  const Complex a(1.5, -2.25), b(0.75, 4.0);
  EXPECT_EQ(fl_cadd(a, b, h), Complex(2.25, 1.75));
  const Complex q = ar.cdiv(a, b);
  EXPECT_NEAR(std::abs(q - a / b), 0.0, 8 * h.unit_roundoff() * std::abs(a / b));
  EXPECT_EQ(ar.cdiv(Complex(3.0, 1.5), Complex(1.5, 0.0)), Complex(2.0, 1.0));
}

}  // namespace
}  // namespace fpmimo
