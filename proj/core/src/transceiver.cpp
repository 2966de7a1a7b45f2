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

#include "fpmimo/transceiver.hpp"

#include <cmath>
#include <stdexcept>

namespace fpmimo {

namespace {

void check_zf_shape(const ComplexMatrix& H) {
  if (H.cols() < 1 || H.rows() < H.cols()) {
    throw std::invalid_argument("fpmimo: zero-forcing needs M >= K >= 1");
  }
}

}  // namespace

Complex mrc_combine(const ComplexVector& h, const ComplexVector& z, Precision& prec) {
  if (h.size() != z.size()) throw std::invalid_argument("fpmimo: MRC length mismatch");
  return inner_product_fp(h, z, prec);
}

Complex mrc_combine(const ComplexVector& h, const ComplexVector& z, const PrecisionPolicy& policy) {
  Precision prec(policy);
  return mrc_combine(h, z, prec);
}

ComplexVector mrt_precode(const ComplexVector& h, Complex x, Precision& prec) {
  const double norm = h.norm();
  if (norm == 0.0) throw std::invalid_argument("fpmimo: MRT with a zero channel");
  ComplexVector s(h.size());
  for (Eigen::Index m = 0; m < h.size(); ++m) s(m) = prec.working().cmul(h(m) / norm, x);
  return s;
}

ComplexVector mrt_precode(const ComplexVector& h, Complex x, const PrecisionPolicy& policy) {
  Precision prec(policy);
  return mrt_precode(h, x, prec);
}

ComplexVector ne_solve(const ComplexMatrix& c, const ComplexVector& rhs, Precision& prec) {
  const ComplexMatrix r = cholesky_fp(c, prec);
  const ComplexVector q = trisolve_fp(r, rhs, TriangularSide::kLowerConjugate, prec);
  return trisolve_fp(r, q, TriangularSide::kUpper, prec);
}

ComplexVector zf_detect_ne(const ComplexMatrix& H, const ComplexVector& z, Precision& prec) {
  check_zf_shape(H);
  if (z.size() != H.rows()) throw std::invalid_argument("fpmimo: ZF detection size mismatch");
  ComplexVector c(H.cols());
  for (Eigen::Index k = 0; k < H.cols(); ++k) c(k) = inner_product_fp(H.col(k), z, prec);
  const ComplexMatrix gram = gram_fp(H, prec);
  return ne_solve(gram, c, prec);
}

ComplexVector zf_detect_ne(const ComplexMatrix& H, const ComplexVector& z,
                           const PrecisionPolicy& policy) {
  Precision prec(policy);
  return zf_detect_ne(H, z, prec);
}

ComplexVector zf_precode_ne(const ComplexMatrix& H, const ComplexVector& x, Precision& prec,
                            std::optional<double> beta) {
  check_zf_shape(H);
  if (x.size() != H.cols()) throw std::invalid_argument("fpmimo: ZF precoding size mismatch");
  const double b = beta ? *beta : zf_beta(H.rows(), H.cols());
  if (!(b > 0.0)) throw std::invalid_argument("fpmimo: precoding normalization must be positive");
  const ComplexMatrix gram = gram_fp(H, prec);
  const ComplexVector e = ne_solve(gram, x, prec);
  ComplexVector s = matvec_fp(H, e, prec);
  if (b != 1.0) s *= std::sqrt(b);
  return s;
}

ComplexVector zf_precode_ne(const ComplexMatrix& H, const ComplexVector& x,
                            const PrecisionPolicy& policy, std::optional<double> beta) {
  Precision prec(policy);
  return zf_precode_ne(H, x, prec, beta);
}

double zf_beta(Eigen::Index M, Eigen::Index K) {
  if (M <= K) throw std::invalid_argument("fpmimo: analytic ZF normalization needs M > K");
  return static_cast<double>(M - K);
}

}  // namespace fpmimo
