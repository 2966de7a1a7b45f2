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

#include "fpmimo/linalg.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace fpmimo {

namespace {

constexpr std::uint64_t kHighStreamSalt = 0x5851f42d4c957f2dULL;

// Sum of the 2n real terms of a complex dot product. Terms are grouped into
// consecutive blocks of bs; each block is reduced in lo and the block sums are
// reduced in hi. bs >= 2n degenerates to a single recursive sum in lo.
// term(j) returns the rounded j-th product of the expansion.
template <class Term>
double blocked_sum(Eigen::Index terms, Term&& term, Arithmetic& lo, Arithmetic& hi,
                   Eigen::Index bs) {
  if (terms == 0) return 0.0;
  double total = 0.0;
  for (Eigen::Index start = 0; start < terms; start += bs) {
    const Eigen::Index stop = std::min(terms, start + bs);
    double block = term(start);
    for (Eigen::Index j = start + 1; j < stop; ++j) block = lo.add(block, term(j));
    total = (start == 0) ? block : hi.add(total, block);
  }
  return total;
}

// conj ? sum conj(a_k) b_k : sum a_k b_k, with a(k), b(k) accessors.
//   conj:  Re = [ar br, ai bi],  Im = [ar bi, -ai br]
//   plain: Re = [ar br, -ai bi], Im = [ar bi,  ai br]
template <class A, class B>
Complex dot_expansion(Eigen::Index n, A&& a, B&& b, bool conj, Arithmetic& lo, Arithmetic& hi,
                      Eigen::Index bs) {
  auto re_term = [&](Eigen::Index j) {
    const Complex x = a(j / 2), y = b(j / 2);
    if ((j & 1) == 0) return lo.mul(x.real(), y.real());
    const double p = lo.mul(x.imag(), y.imag());
    return conj ? p : -p;
  };
  auto im_term = [&](Eigen::Index j) {
    const Complex x = a(j / 2), y = b(j / 2);
    if ((j & 1) == 0) return lo.mul(x.real(), y.imag());
    const double p = lo.mul(x.imag(), y.real());
    return conj ? -p : p;
  };
  const double re = blocked_sum(2 * n, re_term, lo, hi, bs);
  const double im = blocked_sum(2 * n, im_term, lo, hi, bs);
  return {re, im};
}

Eigen::Index effective_block(const Precision& prec) {
  const auto& pol = prec.policy();
  return pol.is_mixed() ? static_cast<Eigen::Index>(pol.block_size)
                        : std::numeric_limits<Eigen::Index>::max();
}

template <class A, class B>
Complex dot(Eigen::Index n, A&& a, B&& b, bool conj, Precision& prec) {
  return dot_expansion(n, a, b, conj, prec.working(), prec.high(), effective_block(prec));
}

void require_mixed(const Precision& prec) {
  if (!prec.policy().is_mixed()) {
    throw std::invalid_argument("fpmimo: blocked mixed kernel requires a mixed policy");
  }
}

}  // namespace

PrecisionPolicy PrecisionPolicy::uniform(FloatFormat fmt) {
  PrecisionPolicy p;
  p.low = fmt;
  p.high = fmt;
  p.mode = PrecisionMode::kUniformLow;
  return p;
}

PrecisionPolicy PrecisionPolicy::mixed(FloatFormat low, FloatFormat high, int block_size) {
  PrecisionPolicy p;
  p.low = std::move(low);
  p.high = std::move(high);
  p.mode = PrecisionMode::kMixed;
  p.block_size = block_size;
  p.validate();
  return p;
}

void PrecisionPolicy::validate() const {
  if (mode != PrecisionMode::kMixed) return;
  if (block_size < 1) throw std::invalid_argument("fpmimo: block size must be positive");
  if (high.significand_bits() < low.significand_bits()) {
    throw std::invalid_argument("fpmimo: high format must be at least as precise as low");
  }
}

std::string PrecisionPolicy::format_label() const {
  switch (mode) {
    case PrecisionMode::kUniformLow: return low.name();
    case PrecisionMode::kUniformHigh: return high.name();
    case PrecisionMode::kMixed: return low.name() + "/" + high.name();
  }
  return {};
}

std::string_view to_string(PrecisionMode mode) {
  switch (mode) {
    case PrecisionMode::kUniformLow: return "uniform_low";
    case PrecisionMode::kUniformHigh: return "uniform_high";
    case PrecisionMode::kMixed: return "mixed";
  }
  return "unknown";
}

PrecisionMode precision_mode_from_string(std::string_view s) {
  if (s == "uniform_low" || s == "uniform") return PrecisionMode::kUniformLow;
  if (s == "uniform_high") return PrecisionMode::kUniformHigh;
  if (s == "mixed") return PrecisionMode::kMixed;
  throw std::invalid_argument("fpmimo: unknown precision mode '" + std::string(s) + "'");
}

Precision::Precision(const PrecisionPolicy& policy, std::uint64_t stream)
    : policy_(policy),
      working_(policy.working_format(), policy.rounding, policy.range, stream),
      high_(policy.high, policy.rounding, policy.range, stream ^ kHighStreamSalt) {
  policy_.validate();
}

ComplexVector Precision::round(const ComplexVector& v) {
  ComplexVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = working_.round(v(i));
  return out;
}

ComplexMatrix Precision::round(const ComplexMatrix& m) {
  ComplexMatrix out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) out(i, j) = working_.round(m(i, j));
  }
  return out;
}

PrecisionBreakdown::PrecisionBreakdown(std::size_t pivot, double value)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "fpmimo: non-positive Cholesky pivot " << value << " at index " << pivot;
        return os.str();
      }()),
      pivot_(pivot),
      value_(value) {}

Complex inner_product_fp(const ComplexVector& a, const ComplexVector& b, Precision& prec) {
  if (a.size() != b.size()) throw std::invalid_argument("fpmimo: inner product size mismatch");
  return dot(
      a.size(), [&](Eigen::Index k) { return a(k); }, [&](Eigen::Index k) { return b(k); }, true,
      prec);
}

Complex inner_product_fp(const ComplexVector& a, const ComplexVector& b,
                         const PrecisionPolicy& policy) {
  Precision prec(policy);
  return inner_product_fp(a, b, prec);
}

Complex blocked_inner_mixed(const ComplexVector& a, const ComplexVector& d, Precision& prec) {
  require_mixed(prec);
  return inner_product_fp(a, d, prec);
}

Complex blocked_inner_mixed(const ComplexVector& a, const ComplexVector& d,
                            const PrecisionPolicy& policy) {
  Precision prec(policy);
  return blocked_inner_mixed(a, d, prec);
}

ComplexVector matvec_fp(const ComplexMatrix& a, const ComplexVector& x, Precision& prec) {
  if (a.cols() != x.size()) throw std::invalid_argument("fpmimo: matvec size mismatch");
  ComplexVector y(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    y(i) = dot(
        a.cols(), [&](Eigen::Index k) { return a(i, k); }, [&](Eigen::Index k) { return x(k); },
        false, prec);
  }
  return y;
}

ComplexVector matvec_fp(const ComplexMatrix& a, const ComplexVector& x,
                        const PrecisionPolicy& policy) {
  Precision prec(policy);
  return matvec_fp(a, x, prec);
}

ComplexMatrix matmul_fp(const ComplexMatrix& a, const ComplexMatrix& b, Precision& prec) {
  if (a.cols() != b.rows()) throw std::invalid_argument("fpmimo: matmul size mismatch");
  ComplexMatrix c(a.rows(), b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      c(i, j) = dot(
          a.cols(), [&](Eigen::Index k) { return a(i, k); },
          [&](Eigen::Index k) { return b(k, j); }, false, prec);
    }
  }
  return c;
}

ComplexMatrix matmul_fp(const ComplexMatrix& a, const ComplexMatrix& b,
                        const PrecisionPolicy& policy) {
  Precision prec(policy);
  return matmul_fp(a, b, prec);
}

ComplexMatrix blocked_matmul_mixed(const ComplexMatrix& a, const ComplexMatrix& b,
                                   Precision& prec) {
  require_mixed(prec);
  return matmul_fp(a, b, prec);
}

ComplexMatrix blocked_matmul_mixed(const ComplexMatrix& a, const ComplexMatrix& b,
                                   const PrecisionPolicy& policy) {
  Precision prec(policy);
  return blocked_matmul_mixed(a, b, prec);
}

ComplexMatrix gram_fp(const ComplexMatrix& h, Precision& prec) {
  const Eigen::Index k = h.cols();
  ComplexMatrix g(k, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      g(i, j) = dot(
          h.rows(), [&](Eigen::Index m) { return h(m, i); },
          [&](Eigen::Index m) { return h(m, j); }, true, prec);
      if (i != j) g(j, i) = std::conj(g(i, j));
    }
  }
  return g;
}

ComplexMatrix cholesky_fp(const ComplexMatrix& c, Precision& prec) {
  if (c.rows() != c.cols()) throw std::invalid_argument("fpmimo: Cholesky needs a square matrix");
  const Eigen::Index n = c.rows();
  Arithmetic& w = prec.working();
  ComplexMatrix r = ComplexMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      const Complex s = dot(
          i, [&](Eigen::Index k) { return r(k, i); }, [&](Eigen::Index k) { return r(k, j); },
          true, prec);
      const Complex num = w.csub(c(i, j), s);
      r(i, j) = {w.div(num.real(), r(i, i).real()), w.div(num.imag(), r(i, i).real())};
    }
    const Complex s = dot(
        j, [&](Eigen::Index k) { return r(k, j); }, [&](Eigen::Index k) { return r(k, j); }, true,
        prec);
    // The imaginary part of a column's squared norm is zero in exact
    // arithmetic and is dropped.
    const double pivot = w.sub(c(j, j).real(), s.real());
    if (!(pivot > 0.0)) throw PrecisionBreakdown(static_cast<std::size_t>(j), pivot);
    r(j, j) = w.sqrt(pivot);
  }
  return r;
}

ComplexMatrix cholesky_fp(const ComplexMatrix& c, const PrecisionPolicy& policy) {
  Precision prec(policy);
  return cholesky_fp(c, prec);
}

ComplexVector trisolve_fp(const ComplexMatrix& r, const ComplexVector& rhs, TriangularSide side,
                          Precision& prec) {
  const Eigen::Index n = r.rows();
  if (r.cols() != n || rhs.size() != n) {
    throw std::invalid_argument("fpmimo: triangular solve size mismatch");
  }
  Arithmetic& w = prec.working();
  ComplexVector x = ComplexVector::Zero(n);
  auto finish = [&](Eigen::Index i, Complex s, Complex diag) {
    if (diag == Complex(0.0, 0.0)) {
      throw std::domain_error("fpmimo: zero diagonal in triangular solve");
    }
    x(i) = w.cdiv(w.csub(rhs(i), s), diag);
  };
  if (side == TriangularSide::kLowerConjugate) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Complex s = dot(
          i, [&](Eigen::Index k) { return r(k, i); }, [&](Eigen::Index k) { return x(k); }, true,
          prec);
      finish(i, s, std::conj(r(i, i)));
    }
  } else {
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      const Eigen::Index len = n - 1 - i;
      const Complex s = dot(
          len, [&](Eigen::Index k) { return r(i, i + 1 + k); },
          [&](Eigen::Index k) { return x(i + 1 + k); }, false, prec);
      finish(i, s, r(i, i));
    }
  }
  return x;
}

ComplexVector trisolve_fp(const ComplexMatrix& r, const ComplexVector& rhs, TriangularSide side,
                          const PrecisionPolicy& policy) {
  Precision prec(policy);
  return trisolve_fp(r, rhs, side, prec);
}

}  // namespace fpmimo
