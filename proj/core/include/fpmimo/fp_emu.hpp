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

// Emulation of binary floating-point formats with t <= 53 significand bits on
// top of IEEE double. Every elementary operation is evaluated exactly (or
// correctly rounded) in double and the result is then rounded to the target
// significand width. For t <= 26 this two-step scheme has no double-rounding
// hazard for + - * / sqrt, which covers bfloat16, fp16 and fp32.

#ifndef FPMIMO_FP_EMU_HPP_
#define FPMIMO_FP_EMU_HPP_

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fpmimo {

using Complex = std::complex<double>;

/// A binary floating-point number system: significand width t (including the
/// implicit bit) and normalized exponent range [exponent_min, exponent_max].
class FloatFormat {
 public:
  static constexpr int kCarrierBits = 53;

  /// Throws std::invalid_argument unless 2 <= t <= 53 and emin < emax.
  FloatFormat(int significand_bits, int exponent_min, int exponent_max,
              std::string name = {});

  static FloatFormat bfloat16();
  static FloatFormat fp16();
  static FloatFormat fp32();
  static FloatFormat fp64();

  /// Accepts "bfloat16", "fp16", "fp32", "fp64" and "custom(t,emin,emax)".
  static FloatFormat from_name(std::string_view name);

  int significand_bits() const { return significand_bits_; }
  int exponent_min() const { return exponent_min_; }
  int exponent_max() const { return exponent_max_; }
  const std::string& name() const { return name_; }

  /// u = 2^-t, half the gap between 1 and its successor.
  double unit_roundoff() const { return unit_roundoff_; }
  /// Smallest positive normalized number, 2^emin.
  double min_normal() const;
  /// Largest finite number, 2^emax * (2 - 2^(1-t)).
  double max_finite() const;

  friend bool operator==(const FloatFormat& a, const FloatFormat& b) {
    return a.significand_bits_ == b.significand_bits_ &&
           a.exponent_min_ == b.exponent_min_ &&
           a.exponent_max_ == b.exponent_max_;
  }

 private:
  int significand_bits_;
  int exponent_min_;
  int exponent_max_;
  double unit_roundoff_;
  std::string name_;
};

class RoundingMode {
 public:
  enum class Kind { kNearestEven, kStochastic };

  static constexpr RoundingMode nearest_even() { return {Kind::kNearestEven, 0}; }
  static constexpr RoundingMode stochastic(std::uint64_t seed) {
    return {Kind::kStochastic, seed};
  }

  constexpr Kind kind() const { return kind_; }
  constexpr std::uint64_t seed() const { return seed_; }
  constexpr bool is_stochastic() const { return kind_ == Kind::kStochastic; }

 private:
  constexpr RoundingMode(Kind kind, std::uint64_t seed) : kind_(kind), seed_(seed) {}
  Kind kind_;
  std::uint64_t seed_;
};

/// kUnbounded rounds the significand only. kStrictIEEE additionally clamps
/// magnitudes above max_finite() and flushes magnitudes below min_normal().
enum class RangeMode { kUnbounded, kStrictIEEE };

enum class Op { kAdd, kSub, kMul, kDiv };

/// SplitMix64 finalizer; used to derive rounding draws and RNG substreams.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace detail {

double round_significand_slow(double x, int t, bool stochastic, std::uint64_t draw);
[[noreturn]] void throw_non_finite(double x);
[[noreturn]] void throw_carrier_overflow(double x);
double apply_range(double x, const FloatFormat& fmt);

// Rounds a finite double to t significand bits by integer arithmetic on its
// IEEE encoding. Stochastic mode adds a uniform draw below the cut so the
// result rounds away from zero with probability equal to the discarded
// fraction of an ulp.
inline double round_significand(double x, int t, bool stochastic, std::uint64_t draw) {
  if (t >= FloatFormat::kCarrierBits) return x;
  std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  if (((bits >> 52) & 0x7ffU) == 0) {
    return round_significand_slow(x, t, stochastic, draw);
  }
  const int shift = FloatFormat::kCarrierBits - t;
  const std::uint64_t cut = (std::uint64_t{1} << shift) - 1;
  if (stochastic) {
    bits += draw & cut;
  } else {
    bits += (cut >> 1) + ((bits >> shift) & 1U);
  }
  bits &= ~cut;
  const double r = std::bit_cast<double>(bits);
  if (std::isinf(r)) throw_carrier_overflow(x);
  return r;
}

}  // namespace detail

/// Rounds x into fmt. Stochastic draws are a pure function of (seed, x).
/// Throws std::domain_error for non-finite x.
double round_to_format(double x, const FloatFormat& fmt,
                       RoundingMode mode = RoundingMode::nearest_even(),
                       RangeMode range = RangeMode::kUnbounded);

/// fl(a op b): the exact carrier result rounded into fmt. Division by zero
/// throws std::domain_error.
double fl_op(double a, double b, Op op, const FloatFormat& fmt,
             RoundingMode mode = RoundingMode::nearest_even(),
             RangeMode range = RangeMode::kUnbounded);

/// Naive complex product: four rounded multiplies and two rounded additions.
Complex fl_cmul(Complex a, Complex b, const FloatFormat& fmt,
                RoundingMode mode = RoundingMode::nearest_even(),
                RangeMode range = RangeMode::kUnbounded);

Complex fl_cadd(Complex a, Complex b, const FloatFormat& fmt,
                RoundingMode mode = RoundingMode::nearest_even(),
                RangeMode range = RangeMode::kUnbounded);

/// A rounding unit bound to one format. Stochastic rounding consumes one draw
/// per rounded value from a counter-based stream, so an Arithmetic instance is
/// stateful; use one instance per sequential computation.
class Arithmetic {
 public:
  explicit Arithmetic(FloatFormat fmt,
                      RoundingMode mode = RoundingMode::nearest_even(),
                      RangeMode range = RangeMode::kUnbounded,
                      std::uint64_t stream = 0);

  const FloatFormat& format() const { return fmt_; }
  RoundingMode rounding() const { return mode_; }
  RangeMode range() const { return range_; }
  double unit_roundoff() const { return fmt_.unit_roundoff(); }

  /// True when rounding is the identity (fp64, nearest, unbounded).
  bool is_passthrough() const { return passthrough_; }

  double round(double x) {
    if (!std::isfinite(x)) detail::throw_non_finite(x);
    if (passthrough_) return x;
    std::uint64_t draw = 0;
    if (stochastic_) draw = mix64(stream_ ^ (counter_++ * 0xd1b54a32d192ed03ULL));
    double r = detail::round_significand(x, fmt_.significand_bits(), stochastic_, draw);
    if (range_ == RangeMode::kStrictIEEE) r = detail::apply_range(r, fmt_);
    return r;
  }
  Complex round(Complex z) { return {round(z.real()), round(z.imag())}; }

  double add(double a, double b) { return round(a + b); }
  double sub(double a, double b) { return round(a - b); }
  double mul(double a, double b) { return round(a * b); }
  double div(double a, double b) {
    if (b == 0.0) throw std::domain_error("fpmimo: division by zero");
    return round(a / b);
  }
  double sqrt(double a) {
    if (a < 0.0) throw std::domain_error("fpmimo: sqrt of negative value");
    return round(std::sqrt(a));
  }
  double apply(double a, double b, Op op);

  Complex cadd(Complex a, Complex b) {
    return {add(a.real(), b.real()), add(a.imag(), b.imag())};
  }
  Complex csub(Complex a, Complex b) {
    return {sub(a.real(), b.real()), sub(a.imag(), b.imag())};
  }
  Complex cmul(Complex a, Complex b) {
    return {sub(mul(a.real(), b.real()), mul(a.imag(), b.imag())),
            add(mul(a.real(), b.imag()), mul(a.imag(), b.real()))};
  }
  /// Complex division; a real divisor takes the componentwise path.
  Complex cdiv(Complex a, Complex b);

 private:
  FloatFormat fmt_;
  RoundingMode mode_;
  RangeMode range_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  bool stochastic_;
  bool passthrough_;
};

std::string_view to_string(RangeMode range);
std::string to_string(RoundingMode mode);

}  // namespace fpmimo

#endif  // FPMIMO_FP_EMU_HPP_
