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

// Complex linear-algebra kernels in which every elementary operation is rounded
// through fp_emu. Complex inner products are evaluated on their widely-linear
// real expansion: for conj(a)^T b the real part is the 2n-term sum
//   Re(a1)Re(b1) + Im(a1)Im(b1) + Re(a2)Re(b2) + ...
// and the imaginary part the matching 2n-term sum, each reduced recursively in
// index order. The reduction order is part of the contract.

#ifndef FPMIMO_LINALG_HPP_
#define FPMIMO_LINALG_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fpmimo/fp_emu.hpp"

namespace fpmimo {

using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

enum class PrecisionMode { kUniformLow, kUniformHigh, kMixed };

/// Which format and rounding each stage of a kernel uses. In kMixed mode,
/// products and intra-block partial sums of size block_size run in `low` and
/// the block partial sums are combined in `high`; all other scalar work runs in
/// `low`.
struct PrecisionPolicy {
  FloatFormat low = FloatFormat::fp16();
  FloatFormat high = FloatFormat::fp32();
  PrecisionMode mode = PrecisionMode::kUniformLow;
  int block_size = 32;
  RoundingMode rounding = RoundingMode::nearest_even();
  RangeMode range = RangeMode::kUnbounded;

  static PrecisionPolicy uniform(FloatFormat fmt);
  static PrecisionPolicy mixed(FloatFormat low, FloatFormat high, int block_size);
  static PrecisionPolicy full() { return uniform(FloatFormat::fp64()); }

  /// Format used for products, inputs and non-reduction scalar work.
  const FloatFormat& working_format() const {
    return mode == PrecisionMode::kUniformHigh ? high : low;
  }
  bool is_mixed() const { return mode == PrecisionMode::kMixed; }
  /// Throws std::invalid_argument for a non-positive block size in mixed mode.
  void validate() const;
  /// "fp16", "fp32" or "fp16/fp32" style label.
  std::string format_label() const;
};

std::string_view to_string(PrecisionMode mode);
PrecisionMode precision_mode_from_string(std::string_view s);

/// Mutable execution state for one policy: the rounding units for the working
/// and high formats. Pass one instance through a sequential computation.
class Precision {
 public:
  explicit Precision(const PrecisionPolicy& policy, std::uint64_t stream = 0);

  const PrecisionPolicy& policy() const { return policy_; }
  Arithmetic& working() { return working_; }
  Arithmetic& high() { return high_; }

  Complex round(Complex z) { return working_.round(z); }
  ComplexVector round(const ComplexVector& v);
  ComplexMatrix round(const ComplexMatrix& m);

 private:
  PrecisionPolicy policy_;
  Arithmetic working_;
  Arithmetic high_;
};

/// Raised when a Cholesky pivot is not positive at the working precision.
class PrecisionBreakdown : public std::runtime_error {
 public:
  PrecisionBreakdown(std::size_t pivot, double value);
  std::size_t pivot() const { return pivot_; }
  double value() const { return value_; }

 private:
  std::size_t pivot_;
  double value_;
};

/// s = a^H b by recursive summation. A mixed policy dispatches to
/// blocked_inner_mixed. Kernels take their inputs as given; round them with
/// Precision::round beforehand to model storage in the working format.
Complex inner_product_fp(const ComplexVector& a, const ComplexVector& b, Precision& prec);
Complex inner_product_fp(const ComplexVector& a, const ComplexVector& b,
                         const PrecisionPolicy& policy);

/// Mixed-precision blocked a^H b: low-precision products and size-b partial
/// sums over the 2n-term real expansion, combined in high precision. Requires
/// a kMixed policy. The result is representable in the high format.
Complex blocked_inner_mixed(const ComplexVector& a, const ComplexVector& d, Precision& prec);
Complex blocked_inner_mixed(const ComplexVector& a, const ComplexVector& d,
                            const PrecisionPolicy& policy);

/// y = A x, each entry a row inner product (no conjugation).
ComplexVector matvec_fp(const ComplexMatrix& a, const ComplexVector& x, Precision& prec);
ComplexVector matvec_fp(const ComplexMatrix& a, const ComplexVector& x,
                        const PrecisionPolicy& policy);

/// C = A B, each entry a row-by-column inner product (no conjugation).
ComplexMatrix matmul_fp(const ComplexMatrix& a, const ComplexMatrix& b, Precision& prec);
ComplexMatrix matmul_fp(const ComplexMatrix& a, const ComplexMatrix& b,
                        const PrecisionPolicy& policy);

/// matmul_fp restricted to mixed policies.
ComplexMatrix blocked_matmul_mixed(const ComplexMatrix& a, const ComplexMatrix& b,
                                   Precision& prec);
ComplexMatrix blocked_matmul_mixed(const ComplexMatrix& a, const ComplexMatrix& b,
                                   const PrecisionPolicy& policy);

/// G = H^H H, the Gram matrix of the columns of H.
ComplexMatrix gram_fp(const ComplexMatrix& h, Precision& prec);

/// Upper-triangular R with real positive diagonal and R^H R = C, computed
/// column by column (gaxpy ordering). Only the upper triangle of C is read.
/// Throws PrecisionBreakdown on a non-positive pivot.
ComplexMatrix cholesky_fp(const ComplexMatrix& c, Precision& prec);
ComplexMatrix cholesky_fp(const ComplexMatrix& c, const PrecisionPolicy& policy);

enum class TriangularSide {
  kLowerConjugate,  // solve R^H x = rhs with R upper triangular
  kUpper,           // solve R x = rhs with R upper triangular
};

/// Substitution with every operation rounded. Throws std::domain_error on a
/// zero diagonal entry.
ComplexVector trisolve_fp(const ComplexMatrix& r, const ComplexVector& rhs, TriangularSide side,
                          Precision& prec);
ComplexVector trisolve_fp(const ComplexMatrix& r, const ComplexVector& rhs, TriangularSide side,
                          const PrecisionPolicy& policy);

}  // namespace fpmimo

#endif  // FPMIMO_LINALG_HPP_
