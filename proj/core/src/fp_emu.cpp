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

#include <cstdio>
#include <limits>
#include <sstream>

namespace fpmimo {

FloatFormat::FloatFormat(int significand_bits, int exponent_min, int exponent_max,
                         std::string name)
    : significand_bits_(significand_bits),
      exponent_min_(exponent_min),
      exponent_max_(exponent_max),
      unit_roundoff_(std::ldexp(1.0, -significand_bits)),
      name_(std::move(name)) {
  if (significand_bits < 2 || significand_bits > kCarrierBits) {
    throw std::invalid_argument("fpmimo: significand bits must lie in [2, 53]");
  }
  if (exponent_min >= exponent_max || exponent_min < -1022 || exponent_max > 1023) {
    throw std::invalid_argument("fpmimo: exponent range must satisfy -1022 <= emin < emax <= 1023");
  }
  if (name_.empty()) {
    name_ = "custom(" + std::to_string(significand_bits) + "," +
            std::to_string(exponent_min) + "," + std::to_string(exponent_max) + ")";
  }
}

FloatFormat FloatFormat::bfloat16() { return {8, -126, 127, "bfloat16"}; }
FloatFormat FloatFormat::fp16() { return {11, -14, 15, "fp16"}; }
FloatFormat FloatFormat::fp32() { return {24, -126, 127, "fp32"}; }
FloatFormat FloatFormat::fp64() { return {53, -1022, 1023, "fp64"}; }

FloatFormat FloatFormat::from_name(std::string_view name) {
  if (name == "bfloat16") return bfloat16();
  if (name == "fp16") return fp16();
  if (name == "fp32") return fp32();
  if (name == "fp64") return fp64();
  int t = 0, emin = 0, emax = 0;
  const std::string s(name);
  char tail = 0;
  if (std::sscanf(s.c_str(), "custom(%d,%d,%d%c", &t, &emin, &emax, &tail) == 4 && tail == ')') {
    return {t, emin, emax};
  }
  throw std::invalid_argument("fpmimo: unknown float format '" + s + "'");
}

double FloatFormat::min_normal() const { return std::ldexp(1.0, exponent_min_); }

double FloatFormat::max_finite() const {
  return std::ldexp(2.0 - std::ldexp(1.0, 1 - significand_bits_), exponent_max_);
}

namespace detail {

double round_significand_slow(double x, int t, bool stochastic, std::uint64_t draw) {
  if (x == 0.0) return x;
  int e = 0;
  const double m = std::frexp(x, &e);  // |m| in [0.5, 1)
  const double scaled = std::ldexp(std::fabs(m), t);
  double q;
  if (stochastic) {
    const double lo = std::floor(scaled);
    const double u01 = static_cast<double>(draw >> 11) * 0x1.0p-53;
    q = (u01 < scaled - lo) ? lo + 1.0 : lo;
  } else {
    q = std::nearbyint(scaled);
  }
  return std::copysign(std::ldexp(q, e - t), x);
}

void throw_non_finite(double x) {
  std::ostringstream os;
  os << "fpmimo: cannot round non-finite value " << x;
  throw std::domain_error(os.str());
}

void throw_carrier_overflow(double x) {
  std::ostringstream os;
  os << "fpmimo: rounding " << x << " overflows the 64-bit carrier";
  throw std::overflow_error(os.str());
}

double apply_range(double x, const FloatFormat& fmt) {
  const double mag = std::fabs(x);
  if (mag > fmt.max_finite()) return std::copysign(fmt.max_finite(), x);
  if (mag < fmt.min_normal()) return std::copysign(0.0, x);
  return x;
}

}  // namespace detail

double round_to_format(double x, const FloatFormat& fmt, RoundingMode mode, RangeMode range) {
  if (!std::isfinite(x)) detail::throw_non_finite(x);
  const bool stochastic = mode.is_stochastic();
  const std::uint64_t draw =
      stochastic ? mix64(mode.seed() ^ mix64(std::bit_cast<std::uint64_t>(x))) : 0;
  double r = detail::round_significand(x, fmt.significand_bits(), stochastic, draw);
  if (range == RangeMode::kStrictIEEE) r = detail::apply_range(r, fmt);
  return r;
}

double fl_op(double a, double b, Op op, const FloatFormat& fmt, RoundingMode mode,
             RangeMode range) {
  Arithmetic ar(fmt, mode, range, mode.seed());
  return ar.apply(a, b, op);
}

Complex fl_cmul(Complex a, Complex b, const FloatFormat& fmt, RoundingMode mode,
                RangeMode range) {
  Arithmetic ar(fmt, mode, range, mode.seed());
  return ar.cmul(a, b);
}

Complex fl_cadd(Complex a, Complex b, const FloatFormat& fmt, RoundingMode mode,
                RangeMode range) {
  Arithmetic ar(fmt, mode, range, mode.seed());
  return ar.cadd(a, b);
}

Arithmetic::Arithmetic(FloatFormat fmt, RoundingMode mode, RangeMode range,
                       std::uint64_t stream)
    : fmt_(std::move(fmt)),
      mode_(mode),
      range_(range),
      stream_(mix64(mode.seed() ^ mix64(stream))),
      stochastic_(mode.is_stochastic()),
      passthrough_(fmt_.significand_bits() == FloatFormat::kCarrierBits &&
                   range == RangeMode::kUnbounded) {}

double Arithmetic::apply(double a, double b, Op op) {
  switch (op) {
    case Op::kAdd: return add(a, b);
    case Op::kSub: return sub(a, b);
    case Op::kMul: return mul(a, b);
    case Op::kDiv: return div(a, b);
  }
  throw std::invalid_argument("fpmimo: unknown op");
}

Complex Arithmetic::cdiv(Complex a, Complex b) {
  if (b.imag() == 0.0) return {div(a.real(), b.real()), div(a.imag(), b.real())};
  const Complex num = cmul(a, std::conj(b));
  const double den = add(mul(b.real(), b.real()), mul(b.imag(), b.imag()));
  return {div(num.real(), den), div(num.imag(), den)};
}

std::string_view to_string(RangeMode range) {
  return range == RangeMode::kUnbounded ? "unbounded" : "strict";
}

std::string to_string(RoundingMode mode) {
  if (!mode.is_stochastic()) return "nearest";
  return "stochastic:" + std::to_string(mode.seed());
}

}  // namespace fpmimo
